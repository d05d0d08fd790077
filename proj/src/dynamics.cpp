#include "blab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace blab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross(const Point2& u, const Point2& v) { return u.x() * v.y() - u.y() * v.x(); }

// Root of g(phi) = cross(dir, x(phi) - origin) inside a sign-changing bracket.
double refine_crossing(const BoundaryCurve& curve, const Point2& origin, const Point2& dir, double lo,
                       double hi, double f_lo) {
    auto g = [&](double phi) { return cross(dir, curve.native_point(phi) - origin); };
    const bool rising = f_lo < 0;
    double phi = 0.5 * (lo + hi);
    for (int iter = 0; iter < 100; ++iter) {
        const double value = g(phi);
        if (value == 0) return phi;
        if ((value < 0) == rising) lo = phi; else hi = phi;
        const double slope = cross(dir, curve.native_derivative(phi, 1));
        double next = phi - value / slope;
        if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
        if (next == phi) break;
        phi = next;
    }
    return phi;
}

}  // namespace

PhasePoint make_phase_point(const BoundaryCurve& curve, double t, double theta) {
    if (!std::isfinite(t) || !std::isfinite(theta))
        throw OutOfRange("phase point coordinates must be finite");
    if (!(theta > 0 && theta < kPi))
        throw OutOfRange("theta must lie strictly between 0 and pi, got " + std::to_string(theta));
    return {curve.reduce(t), theta};
}

Shot shoot(const BoundaryCurve& curve, const PhasePoint& p) {
    if (std::min(p.theta, kPi - p.theta) < kTransversalityTolerance)
        throw GrazingIntersection("outgoing ray is tangent to the boundary");

    const double phi1 = curve.param_of(p.t);
    const Point2 origin = curve.native_point(phi1);
    const Point2 d1 = curve.native_derivative(phi1, 1);
    const Point2 tan1 = d1.normalized();
    const double c = std::cos(p.theta), s = std::sin(p.theta);
    const Point2 dir(c * tan1.x() - s * tan1.y(), s * tan1.x() + c * tan1.y());

    // Sweep phi over (phi1 + eps, phi1 + 2 pi - eps) through the coarse ring.
    const auto ring = curve.sweep_ring();
    const int n = static_cast<int>(ring.size());
    const double ring_step = kTwoPi / n;
    const double eps = 1e-6 * curve.length() / d1.norm();
    const double start = phi1 + eps;
    const double stop = phi1 + kTwoPi - eps;

    double phi_a = start;
    double f_a = cross(dir, curve.native_point(start) - origin);
    if (f_a >= 0)
        throw GrazingIntersection("second intersection lies within the exclusion neighbourhood of the start");

    double best_phi = 0.0;
    double best_chord = std::numeric_limits<double>::infinity();
    auto visit = [&](double phi_b, double f_b) {
        if ((f_a < 0 && f_b >= 0) || (f_a > 0 && f_b <= 0)) {
            const double root = (f_b == 0) ? phi_b : refine_crossing(curve, origin, dir, phi_a, phi_b, f_a);
            const double along = dir.dot(curve.native_point(root) - origin);
            if (along > 0 && along < best_chord) {
                best_chord = along;
                best_phi = root;
            }
        }
        phi_a = phi_b;
        f_a = f_b;
    };

    const long first = static_cast<long>(std::floor(start / ring_step)) + 1;
    for (long j = first; j * ring_step < stop; ++j) {
        const double phi = j * ring_step;
        const Point2& x = ring[static_cast<std::size_t>(((j % n) + n) % n)];
        visit(phi, cross(dir, x - origin));
    }
    visit(stop, cross(dir, curve.native_point(stop) - origin));

    if (!std::isfinite(best_chord)) throw NoIntersection("ray does not meet the boundary again");

    const Point2 tan2 = curve.native_derivative(best_phi, 1).normalized();
    const double theta2 = std::atan2(cross(dir, tan2), dir.dot(tan2));
    if (!(std::min(theta2, kPi - theta2) >= kTransversalityTolerance))
        throw GrazingIntersection("incoming segment is tangent to the boundary");
    return {PhasePoint{curve.reduce(curve.arclength_of(best_phi)), theta2}, best_chord};
}

std::vector<Shot> trace(const BoundaryCurve& curve, const PhasePoint& p, int n) {
    if (n < 1) throw OutOfRange("iteration count must be at least 1");
    std::vector<Shot> out;
    out.reserve(static_cast<std::size_t>(n));
    PhasePoint current = p;
    for (int step = 1; step <= n; ++step) {
        try {
            out.push_back(shoot(curve, current));
        } catch (const GrazingIntersection& e) {
            throw GrazingIntersection(std::string(e.what()) + " (step " + std::to_string(step) + ")", step);
        } catch (const NoIntersection& e) {
            throw NoIntersection(std::string(e.what()) + " (step " + std::to_string(step) + ")");
        }
        current = out.back().next;
    }
    return out;
}

std::vector<PhasePoint> iterate(const BoundaryCurve& curve, const PhasePoint& p, int n) {
    std::vector<PhasePoint> points;
    for (const Shot& shot : trace(curve, p, n)) points.push_back(shot.next);
    return points;
}

PhasePoint power(const BoundaryCurve& curve, const PhasePoint& p, int n) {
    PhasePoint current = p;
    for (int i = 0; i < n; ++i) current = shoot(curve, current).next;
    return current;
}

Jacobian2 differential(const BoundaryCurve& curve, const PhasePoint& p, int order) {
    if (order != 1 && order != 3) throw OutOfRange("differential order must be 1 or 3");
    power(curve, p, order);  // Grazing at the centre is not a step-size problem.
    auto map = [&](const PhasePoint& q) { return power(curve, q, order); };
    return finite_difference_jacobian(map, p, curve.length(), 1e-5 * curve.length(), 1e-5);
}

double measure_defect(const BoundaryCurve& curve, const PhasePoint& p) {
    const Jacobian2 jac = differential(curve, p, 1);
    const PhasePoint next = shoot(curve, p).next;
    return std::abs(jac.determinant()) * std::sin(next.theta) / std::sin(p.theta) - 1.0;
}

}  // namespace blab
