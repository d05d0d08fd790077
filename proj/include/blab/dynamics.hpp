#ifndef BLAB_DYNAMICS_HPP
#define BLAB_DYNAMICS_HPP

#include "blab/boundary.hpp"
#include "blab/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <vector>

namespace blab {

/// Birkhoff coordinates: arc length t in [0, l) and the angle theta in (0, pi)
/// between the outgoing ray and the forward tangent.
struct PhasePoint {
    double t = 0.0;
    double theta = std::numbers::pi / 2;
};

/// Rejects theta outside the open interval (0, pi) and reduces t mod l.
PhasePoint make_phase_point(const BoundaryCurve& curve, double t, double theta);

/// D T acting on (dt, dtheta); rows are outputs, columns inputs.
using Jacobian2 = Eigen::Matrix2d;

inline constexpr double kTransversalityTolerance = 1e-7;

struct Shot {
    PhasePoint next;
    double chord = 0.0;
};

/// One application of the billiard map.
Shot shoot(const BoundaryCurve& curve, const PhasePoint& p);

/// (T p, ..., T^n p) together with each chord length.
std::vector<Shot> trace(const BoundaryCurve& curve, const PhasePoint& p, int n);

/// (T p, ..., T^n p).
std::vector<PhasePoint> iterate(const BoundaryCurve& curve, const PhasePoint& p, int n);

/// T^n p.
PhasePoint power(const BoundaryCurve& curve, const PhasePoint& p, int n);

/// Central differences with two Richardson levels on an arbitrary phase map.
///
/// `map` takes a PhasePoint and returns a PhasePoint; t-differences are taken
/// modulo `period`. Steps are shrunk tenfold when a stencil point leaves the open
/// annulus or grazes; StepUnderflow is raised once the theta step drops below 1e-12.
template <typename Map>
Jacobian2 finite_difference_jacobian(const Map& map, const PhasePoint& p, double period,
                                     double step_t, double step_theta) {
    auto wrap = [period](double dt) { return std::remainder(dt, period); };
    auto central = [&](double ht, double hth) {
        Jacobian2 d;
        const PhasePoint tp = map(PhasePoint{p.t + ht, p.theta});
        const PhasePoint tm = map(PhasePoint{p.t - ht, p.theta});
        d(0, 0) = wrap(tp.t - tm.t) / (2 * ht);
        d(1, 0) = (tp.theta - tm.theta) / (2 * ht);
        const PhasePoint thp = map(PhasePoint{p.t, p.theta + hth});
        const PhasePoint thm = map(PhasePoint{p.t, p.theta - hth});
        d(0, 1) = wrap(thp.t - thm.t) / (2 * hth);
        d(1, 1) = (thp.theta - thm.theta) / (2 * hth);
        return d;
    };

    double ht = step_t;
    double hth = step_theta;
    while (true) {
        if (hth < 1e-12) throw StepUnderflow("finite-difference step fell below 1e-12");
        const bool inside = p.theta - hth > 0 && p.theta + hth < std::numbers::pi;
        if (inside) {
            try {
                const Jacobian2 d0 = central(ht, hth);
                const Jacobian2 d1 = central(ht / 2, hth / 2);
                const Jacobian2 d2 = central(ht / 4, hth / 4);
                const Jacobian2 r0 = (4 * d1 - d0) / 3;
                const Jacobian2 r1 = (4 * d2 - d1) / 3;
                return (16 * r1 - r0) / 15;
            } catch (const GrazingIntersection&) {
            }
        }
        ht /= 10;
        hth /= 10;
    }
}

/// D_p T^order (order 1 or 3), base steps 1e-5 * l in t and 1e-5 in theta.
Jacobian2 differential(const BoundaryCurve& curve, const PhasePoint& p, int order);

/// |det D_p T| sin(theta_2) / sin(theta_1) - 1; zero where sin(theta) dtheta dt is preserved.
double measure_defect(const BoundaryCurve& curve, const PhasePoint& p);

}  // namespace blab

#endif  // BLAB_DYNAMICS_HPP
