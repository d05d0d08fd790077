#ifndef BLAB_BOUNDARY_HPP
#define BLAB_BOUNDARY_HPP

#include <Eigen/Dense>

#include <span>
#include <variant>
#include <vector>

namespace blab {

using Point2 = Eigen::Vector2d;

struct Circle {
    double R = 1.0;
};

struct Ellipse {
    double a = 1.0;
    double b = 1.0;
};

/// Polar graph r(phi) = r0 + sum_m (cos_coeffs[m-1] cos m phi + sin_coeffs[m-1] sin m phi).
struct Fourier {
    double r0 = 1.0;
    std::vector<double> cos_coeffs;
    std::vector<double> sin_coeffs;
};

using Descriptor = std::variant<Circle, Ellipse, Fourier>;

inline constexpr int kMaxFourierOrder = 32;

struct CurveOptions {
    /// Knots of the arc-length table.
    int table_knots = 8192;
    /// Grid used for the positivity, smoothness and simplicity checks.
    int check_samples = 4096;
    /// Samples in the coarse ring the ray sweep walks over.
    int sweep_samples = 512;
    /// Upper bound on max|k| * l / (2 pi); larger values are rejected as NonSmooth.
    double curvature_bound = 1e3;
};

/// Closed counterclockwise boundary in natural (arc-length) parametrization.
///
/// Internally the curve is evaluated through its native parameter phi in [0, 2 pi);
/// a Hermite table of s(phi) maps between the two. Instances are immutable.
class BoundaryCurve {
public:
    double length() const { return length_; }
    const Descriptor& descriptor() const { return descriptor_; }

    /// t reduced to [0, l).
    double reduce(double t) const;

    Point2 position(double t) const;
    /// Unit tangent, counterclockwise.
    Point2 tangent(double t) const;
    /// Signed curvature, positive for a convex counterclockwise boundary.
    double curvature(double t) const;
    /// Angle of the unit tangent, continuous over one period starting at tangent_angle(0).
    double tangent_angle(double t) const;

    // Native-parameter access, used by the ray sweep and root refinement.
    double param_of(double t) const;
    double arclength_of(double phi) const;
    Point2 native_point(double phi) const;
    /// d^order x / d phi^order for order in 1..3.
    Point2 native_derivative(double phi, int order) const;
    double native_curvature(double phi) const;

    /// Precomputed points x(phi_j), phi_j = 2 pi j / n.
    std::span<const Point2> sweep_ring() const { return ring_; }

private:
    friend BoundaryCurve build_curve(const Descriptor&, const CurveOptions&);
    BoundaryCurve() = default;

    double speed(double phi) const { return native_derivative(phi, 1).norm(); }
    int knot_below(double phi) const;

    Descriptor descriptor_;
    double length_ = 0.0;
    double dphi_ = 0.0;
    std::vector<double> knot_s_;      // s(phi_k), size knots+1
    std::vector<double> knot_speed_;  // ds/dphi at phi_k
    std::vector<double> knot_angle_;  // lifted tangent angle at phi_k
    std::vector<Point2> ring_;
};

/// Validates the descriptor, builds the arc-length table and runs the shape checks.
BoundaryCurve build_curve(const Descriptor& descriptor, const CurveOptions& options = {});

/// True when no two samples further apart than l/100 in parameter lie within l/10000.
/// `samples` are equally spaced in arc length over one period.
bool is_simple(std::span<const Point2> samples, double length);

}  // namespace blab

#endif  // BLAB_BOUNDARY_HPP
