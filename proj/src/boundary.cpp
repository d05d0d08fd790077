#include "blab/boundary.hpp"

#include "blab/error.hpp"
#include "blab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace blab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross(const Point2& u, const Point2& v) { return u.x() * v.y() - u.y() * v.x(); }

// k-th derivative of (cos phi, sin phi) is a rotation by k * pi/2.
Point2 unit_circle_derivative(double phi, int k) {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    switch (((k % 4) + 4) % 4) {
        case 0: return {c, s};
        case 1: return {-s, c};
        case 2: return {-c, -s};
        default: return {s, -c};
    }
}

// n-th derivative of the Fourier radius.
double fourier_radius(const Fourier& f, double phi, int n) {
    const double shift = n * std::numbers::pi / 2.0;
    double r = (n == 0) ? f.r0 : 0.0;
    for (std::size_t i = 0; i < f.cos_coeffs.size(); ++i) {
        const double m = static_cast<double>(i + 1);
        r += std::pow(m, n) * f.cos_coeffs[i] * std::cos(m * phi + shift);
    }
    for (std::size_t i = 0; i < f.sin_coeffs.size(); ++i) {
        const double m = static_cast<double>(i + 1);
        r += std::pow(m, n) * f.sin_coeffs[i] * std::sin(m * phi + shift);
    }
    return r;
}

constexpr int kBinomial[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};

struct NativeEval {
    double phi;
    int order;

    Point2 operator()(const Circle& c) const { return c.R * unit_circle_derivative(phi, order); }

    Point2 operator()(const Ellipse& e) const {
        const Point2 u = unit_circle_derivative(phi, order);
        return {e.a * u.x(), e.b * u.y()};
    }

    Point2 operator()(const Fourier& f) const {
        // Leibniz rule on r(phi) * (cos phi, sin phi).
        Point2 out = Point2::Zero();
        for (int k = 0; k <= order; ++k)
            out += kBinomial[order][k] * fourier_radius(f, phi, order - k) * unit_circle_derivative(phi, k);
        return out;
    }
};

void validate(const Descriptor& d, int check_samples) {
    if (const auto* c = std::get_if<Circle>(&d)) {
        if (!std::isfinite(c->R) || c->R <= 0) throw NonPositiveRadius("circle radius must be positive");
    } else if (const auto* e = std::get_if<Ellipse>(&d)) {
        if (!std::isfinite(e->a) || !std::isfinite(e->b) || e->a <= 0 || e->b <= 0)
            throw NonPositiveRadius("ellipse semi-axes must be positive");
    } else {
        const auto& f = std::get<Fourier>(d);
        if (f.cos_coeffs.size() > kMaxFourierOrder || f.sin_coeffs.size() > kMaxFourierOrder)
            throw InvalidDescriptor("fourier order exceeds " + std::to_string(kMaxFourierOrder));
        auto finite = [](double v) { return std::isfinite(v); };
        if (!std::isfinite(f.r0) || !std::all_of(f.cos_coeffs.begin(), f.cos_coeffs.end(), finite) ||
            !std::all_of(f.sin_coeffs.begin(), f.sin_coeffs.end(), finite))
            throw InvalidDescriptor("fourier coefficients must be finite");
        for (int j = 0; j < check_samples; ++j) {
            const double phi = kTwoPi * j / check_samples;
            if (fourier_radius(f, phi, 0) <= 0)
                throw NonPositiveRadius("fourier radius is not positive at phi = " + std::to_string(phi));
        }
    }
}

}  // namespace

double BoundaryCurve::reduce(double t) const {
    double r = std::fmod(t, length_);
    if (r < 0) r += length_;
    if (r >= length_ || length_ - r < 1e-13 * length_) r = 0.0;
    return r;
}

Point2 BoundaryCurve::native_derivative(double phi, int order) const {
    return std::visit(NativeEval{phi, order}, descriptor_);
}

Point2 BoundaryCurve::native_point(double phi) const { return native_derivative(phi, 0); }

double BoundaryCurve::native_curvature(double phi) const {
    const Point2 d1 = native_derivative(phi, 1);
    const Point2 d2 = native_derivative(phi, 2);
    return cross(d1, d2) / std::pow(d1.norm(), 3);
}

int BoundaryCurve::knot_below(double phi) const {
    const int n = static_cast<int>(knot_s_.size()) - 1;
    return std::clamp(static_cast<int>(std::floor(phi / dphi_)), 0, n - 1);
}

double BoundaryCurve::arclength_of(double phi) const {
    const double turns = std::floor(phi / kTwoPi);
    const double local = phi - turns * kTwoPi;
    const int k = knot_below(local);
    const double h = dphi_;
    const double u = (local - k * h) / h;
    const double u2 = u * u;
    const double u3 = u2 * u;
    const double s = (2 * u3 - 3 * u2 + 1) * knot_s_[k] + (u3 - 2 * u2 + u) * h * knot_speed_[k] +
                     (-2 * u3 + 3 * u2) * knot_s_[k + 1] + (u3 - u2) * h * knot_speed_[k + 1];
    return turns * length_ + s;
}

double BoundaryCurve::param_of(double t) const {
    const double target = reduce(t);
    const auto it = std::upper_bound(knot_s_.begin(), knot_s_.end(), target);
    const int k = std::clamp(static_cast<int>(it - knot_s_.begin()) - 1, 0,
                             static_cast<int>(knot_s_.size()) - 2);
    const double h = dphi_;
    const double s0 = knot_s_[k], s1 = knot_s_[k + 1];
    const double m0 = h * knot_speed_[k], m1 = h * knot_speed_[k + 1];
    // Monotone cubic on u in [0,1]; Newton from the linear guess, bisection as fallback.
    double lo = 0.0, hi = 1.0;
    double u = std::clamp((target - s0) / (s1 - s0), 0.0, 1.0);
    for (int iter = 0; iter < 60; ++iter) {
        const double u2 = u * u, u3 = u2 * u;
        const double value = (2 * u3 - 3 * u2 + 1) * s0 + (u3 - 2 * u2 + u) * m0 + (-2 * u3 + 3 * u2) * s1 +
                             (u3 - u2) * m1 - target;
        if (value == 0) break;
        const double slope = (6 * u2 - 6 * u) * s0 + (3 * u2 - 4 * u + 1) * m0 + (-6 * u2 + 6 * u) * s1 +
                             (3 * u2 - 2 * u) * m1;
        if (value > 0) hi = u; else lo = u;
        double next = u - value / slope;
        if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
        if (next == u) break;
        u = next;
    }
    return (k + u) * h;
}

Point2 BoundaryCurve::position(double t) const { return native_point(param_of(t)); }

Point2 BoundaryCurve::tangent(double t) const { return native_derivative(param_of(t), 1).normalized(); }

double BoundaryCurve::curvature(double t) const { return native_curvature(param_of(t)); }

double BoundaryCurve::tangent_angle(double t) const {
    const double phi = param_of(t);
    const int k = knot_below(phi);
    const double u = (phi - k * dphi_) / dphi_;
    const double approx = knot_angle_[k] + u * (knot_angle_[k + 1] - knot_angle_[k]);
    const Point2 d = native_derivative(phi, 1);
    const double raw = std::atan2(d.y(), d.x());
    return raw + kTwoPi * std::round((approx - raw) / kTwoPi);
}

bool is_simple(std::span<const Point2> samples, double length) {
    const auto n = static_cast<std::ptrdiff_t>(samples.size());
    const double min_separation = length / 100.0;
    const double close = length / 10000.0;
    const double close2 = close * close;
    const double spacing = length / static_cast<double>(n);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        for (std::ptrdiff_t j = i + 1; j < n; ++j) {
            const auto gap = std::min(j - i, n - (j - i));
            if (static_cast<double>(gap) * spacing <= min_separation) continue;
            if ((samples[i] - samples[j]).squaredNorm() < close2) return false;
        }
    }
    return true;
}

BoundaryCurve build_curve(const Descriptor& descriptor, const CurveOptions& options) {
    if (options.table_knots < 16 || options.check_samples < 16 || options.sweep_samples < 16)
        throw DomainError("curve options: sample counts must be at least 16");
    validate(descriptor, options.check_samples);

    BoundaryCurve curve;
    curve.descriptor_ = descriptor;
    const int n = options.table_knots;
    curve.dphi_ = kTwoPi / n;
    curve.knot_s_.resize(n + 1);
    curve.knot_speed_.resize(n + 1);
    curve.knot_angle_.resize(n + 1);

    auto speed = [&curve](double phi) { return curve.speed(phi); };
    curve.knot_s_[0] = 0.0;
    for (int k = 0; k < n; ++k) {
        const double a = k * curve.dphi_;
        const double b = (k + 1 == n) ? kTwoPi : (k + 1) * curve.dphi_;
        curve.knot_s_[k + 1] = curve.knot_s_[k] + integrate(speed, a, b, 1e-14);
    }
    curve.length_ = curve.knot_s_[n];

    double previous = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double phi = (k == n) ? kTwoPi : k * curve.dphi_;
        const Point2 d = curve.native_derivative(phi, 1);
        curve.knot_speed_[k] = d.norm();
        const double raw = std::atan2(d.y(), d.x());
        curve.knot_angle_[k] = (k == 0) ? raw : raw + kTwoPi * std::round((previous - raw) / kTwoPi);
        previous = curve.knot_angle_[k];
    }

    double max_curvature = 0.0;
    std::vector<Point2> samples(options.check_samples);
    for (int j = 0; j < options.check_samples; ++j) {
        const double t = curve.length_ * j / options.check_samples;
        const double phi = curve.param_of(t);
        samples[j] = curve.native_point(phi);
        max_curvature = std::max(max_curvature, std::abs(curve.native_curvature(phi)));
    }
    if (!std::isfinite(max_curvature) || max_curvature * curve.length_ / kTwoPi > options.curvature_bound)
        throw NonSmooth("curvature exceeds the configured bound (max |k| = " + std::to_string(max_curvature) + ")");
    if (!is_simple(samples, curve.length_)) throw SelfIntersecting("boundary is not simple");

    curve.ring_.resize(options.sweep_samples);
    for (int j = 0; j < options.sweep_samples; ++j)
        curve.ring_[j] = curve.native_point(kTwoPi * j / options.sweep_samples);
    return curve;
}

}  // namespace blab
