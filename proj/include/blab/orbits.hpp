#ifndef BLAB_ORBITS_HPP
#define BLAB_ORBITS_HPP

#include "blab/boundary.hpp"
#include "blab/dynamics.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace blab {

enum class Classification { maximum, saddle, other };

std::string_view to_string(Classification c);

/// A three-period orbit. Vertices are stored counterclockwise with t[0] the
/// smallest reduced parameter; theta[i] is the outgoing angle at vertex i.
struct OrbitTriple {
    std::array<double, 3> t{};
    std::array<double, 3> theta{};
    double perimeter = 0.0;
    Classification classification = Classification::other;
    double gradient_norm = 0.0;

    PhasePoint phase(int i = 0) const { return {t[static_cast<std::size_t>(i)], theta[static_cast<std::size_t>(i)]}; }
};

double perimeter(const BoundaryCurve& curve, double t0, double t1, double t2);

/// d perimeter / d t_i in closed form; vanishes exactly when the reflection law holds.
Eigen::Vector3d perimeter_gradient(const BoundaryCurve& curve, double t0, double t1, double t2);

/// Hessian of the perimeter by central differences of the closed-form gradient.
Eigen::Matrix3d perimeter_hessian(const BoundaryCurve& curve, const Eigen::Vector3d& t);

struct FinderOptions {
    int max_iterations = 60;
    /// Eigenvalues with |lambda| below this are neither sign.
    double classification_threshold = 1e-8;
    unsigned threads = 1;
};

/// Multistart Newton on the perimeter gradient from n_seeds pseudo-random
/// triples. Results are deduplicated up to cyclic rotation and orientation
/// and sorted by (t0, theta0).
std::vector<OrbitTriple> find_period3(const BoundaryCurve& curve, int n_seeds, std::uint64_t rng_seed,
                                      const FinderOptions& options = {});

/// Perimeter of the triangle start / first collision / second collision.
double extended_length(const BoundaryCurve& curve, const PhasePoint& p);

/// d extended_length / d theta by central difference with step 1e-6.
double fermat_defect(const BoundaryCurve& curve, const PhasePoint& p);
double fermat_defect(const BoundaryCurve& curve, const OrbitTriple& orbit);

/// k(t0) L - 2 sin^3(theta0).
double wojtkowski_residual(const BoundaryCurve& curve, const OrbitTriple& orbit);
/// Same, with L taken from extended_length at p (equal to the perimeter on P^3).
double wojtkowski_residual(const BoundaryCurve& curve, const PhasePoint& p);

/// Frobenius norm of D T^3 - I.
double identity_defect(const Jacobian2& jacobian);
double dt3_defect(const BoundaryCurve& curve, const PhasePoint& p);

struct SampleOptions {
    int max_iterations = 30;
    unsigned threads = 1;
};

/// Fixed points of T^3 reached by Newton from the centres of a grid_t x grid_theta
/// scan, as (t * 2 pi / l, theta) pairs sorted lexicographically.
std::vector<Eigen::Vector2d> sample_p3(const BoundaryCurve& curve, int grid_t, int grid_theta, double tol,
                                       const SampleOptions& options = {});

}  // namespace blab

#endif  // BLAB_ORBITS_HPP
