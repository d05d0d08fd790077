#include "blab/orbits.hpp"

#include "blab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>

namespace blab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross(const Point2& u, const Point2& v) { return u.x() * v.y() - u.y() * v.x(); }

double circular_distance(double a, double b, double period) { return std::abs(std::remainder(a - b, period)); }

// Uniform double in [0, 1) from the top 53 bits; portable across standard libraries.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Eigen::Vector3d gradient(const BoundaryCurve& curve, const Eigen::Vector3d& t) {
    return perimeter_gradient(curve, t[0], t[1], t[2]);
}

Eigen::VectorXd min_norm_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double relative_threshold) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    svd.setThreshold(relative_threshold);
    return svd.solve(b);
}

bool same_orbit(const OrbitTriple& a, const OrbitTriple& b, double tol, double period) {
    for (int shift = 0; shift < 3; ++shift) {
        bool match = true;
        for (int i = 0; i < 3 && match; ++i)
            match = circular_distance(a.t[static_cast<std::size_t>(i)],
                                      b.t[static_cast<std::size_t>((i + shift) % 3)], period) < tol;
        if (match) return true;
    }
    return false;
}

// Orders the vertices counterclockwise starting from the smallest reduced t and fills theta.
OrbitTriple canonical_orbit(const BoundaryCurve& curve, Eigen::Vector3d t) {
    for (int i = 0; i < 3; ++i) t[i] = curve.reduce(t[i]);
    std::array<Point2, 3> x{curve.position(t[0]), curve.position(t[1]), curve.position(t[2])};
    if (cross(x[1] - x[0], x[2] - x[0]) < 0) {
        std::swap(t[1], t[2]);
        std::swap(x[1], x[2]);
    }
    int first = 0;
    for (int i = 1; i < 3; ++i)
        if (t[i] < t[first]) first = i;

    OrbitTriple orbit;
    for (int i = 0; i < 3; ++i) {
        const int k = (first + i) % 3;
        const int next = (k + 1) % 3;
        const Point2 chord = (x[static_cast<std::size_t>(next)] - x[static_cast<std::size_t>(k)]).normalized();
        const Point2 tan = curve.tangent(t[k]);
        orbit.t[static_cast<std::size_t>(i)] = t[k];
        orbit.theta[static_cast<std::size_t>(i)] = std::atan2(cross(tan, chord), tan.dot(chord));
    }
    orbit.perimeter = perimeter(curve, orbit.t[0], orbit.t[1], orbit.t[2]);
    return orbit;
}

std::optional<OrbitTriple> newton_orbit(const BoundaryCurve& curve, Eigen::Vector3d u,
                                        const FinderOptions& options) {
    const double l = curve.length();
    try {
        Eigen::Vector3d g = gradient(curve, u);
        for (int iter = 0; iter < options.max_iterations && g.norm() > 1e-14; ++iter) {
            const Eigen::Matrix3d h = perimeter_hessian(curve, u);
            const Eigen::Vector3d step = -min_norm_solve(h, g, 1e-7);
            bool improved = false;
            for (double alpha = 1.0; alpha > 1e-3; alpha /= 2) {
                const Eigen::Vector3d trial = u + alpha * step;
                const Eigen::Vector3d gt = gradient(curve, trial);
                if (gt.norm() < g.norm()) {
                    u = trial;
                    g = gt;
                    improved = true;
                    break;
                }
            }
            if (!improved) break;
        }
        if (!(g.norm() < 1e-9 * l)) return std::nullopt;
        for (int i = 0; i < 3; ++i)
            if (circular_distance(u[i], u[(i + 1) % 3], l) < 1e-4 * l) return std::nullopt;

        OrbitTriple orbit = canonical_orbit(curve, u);
        orbit.gradient_norm = perimeter_gradient(curve, orbit.t[0], orbit.t[1], orbit.t[2]).norm();
        if (!(orbit.gradient_norm < 1e-9 * l)) return std::nullopt;

        // Nonconvex boundaries can produce critical triangles whose chords leave the table.
        const PhasePoint back = power(curve, orbit.phase(0), 3);
        if (circular_distance(back.t, orbit.t[0], l) > 1e-7 || std::abs(back.theta - orbit.theta[0]) > 1e-7)
            return std::nullopt;

        Eigen::Vector3d canonical(orbit.t[0], orbit.t[1], orbit.t[2]);
        const Eigen::Vector3d eig = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(
                                        perimeter_hessian(curve, canonical), Eigen::EigenvaluesOnly)
                                        .eigenvalues();
        const double thr = options.classification_threshold;
        if ((eig.array().abs() < thr).any()) {
            orbit.classification = Classification::other;
        } else if ((eig.array() < 0).all()) {
            orbit.classification = Classification::maximum;
        } else if ((eig.array() < 0).any()) {
            orbit.classification = Classification::saddle;
        } else {
            orbit.classification = Classification::other;
        }
        return orbit;
    } catch (const NumericalError&) {
        return std::nullopt;
    }
}

}  // namespace

std::string_view to_string(Classification c) {
    switch (c) {
        case Classification::maximum: return "maximum";
        case Classification::saddle: return "saddle";
        default: return "other";
    }
}

double perimeter(const BoundaryCurve& curve, double t0, double t1, double t2) {
    const Point2 x0 = curve.position(t0), x1 = curve.position(t1), x2 = curve.position(t2);
    return (x0 - x1).norm() + (x1 - x2).norm() + (x2 - x0).norm();
}

Eigen::Vector3d perimeter_gradient(const BoundaryCurve& curve, double t0, double t1, double t2) {
    const double l = curve.length();
    const std::array<double, 3> t{t0, t1, t2};
    for (int i = 0; i < 3; ++i)
        if (circular_distance(t[static_cast<std::size_t>(i)], t[static_cast<std::size_t>((i + 1) % 3)], l) <
            1e-9 * l)
            throw DegenerateTriangle("two vertices of the triangle coincide");

    std::array<Point2, 3> x, tan;
    for (std::size_t i = 0; i < 3; ++i) {
        const double phi = curve.param_of(t[i]);
        x[i] = curve.native_point(phi);
        tan[i] = curve.native_derivative(phi, 1).normalized();
    }
    Eigen::Vector3d g;
    for (std::size_t i = 0; i < 3; ++i) {
        const Point2 from_prev = (x[i] - x[(i + 2) % 3]).normalized();
        const Point2 from_next = (x[i] - x[(i + 1) % 3]).normalized();
        g[static_cast<Eigen::Index>(i)] = tan[i].dot(from_prev) + tan[i].dot(from_next);
    }
    return g;
}

Eigen::Matrix3d perimeter_hessian(const BoundaryCurve& curve, const Eigen::Vector3d& t) {
    const double h = 1e-6 * curve.length();
    Eigen::Matrix3d hess;
    for (int j = 0; j < 3; ++j) {
        Eigen::Vector3d tp = t, tm = t;
        tp[j] += h;
        tm[j] -= h;
        hess.col(j) = (gradient(curve, tp) - gradient(curve, tm)) / (2 * h);
    }
    return 0.5 * (hess + hess.transpose());
}

std::vector<OrbitTriple> find_period3(const BoundaryCurve& curve, int n_seeds, std::uint64_t rng_seed,
                                      const FinderOptions& options) {
    if (n_seeds < 1) throw OutOfRange("n_seeds must be at least 1");
    const double l = curve.length();

    std::mt19937_64 rng(rng_seed);
    std::vector<Eigen::Vector3d> seeds(static_cast<std::size_t>(n_seeds));
    for (auto& seed : seeds) {
        const double t0 = l * unit_uniform(rng);
        const double g1 = l * (1.0 / 3.0 + 0.2 * (unit_uniform(rng) - 0.5));
        const double g2 = l * (1.0 / 3.0 + 0.2 * (unit_uniform(rng) - 0.5));
        seed = Eigen::Vector3d(t0, t0 + g1, t0 + g1 + g2);
    }

    std::vector<std::optional<OrbitTriple>> found(seeds.size());
    parallel_for(seeds.size(), options.threads,
                 [&](std::size_t i) { found[i] = newton_orbit(curve, seeds[i], options); });

    std::vector<OrbitTriple> orbits;
    for (const auto& candidate : found) {
        if (!candidate) continue;
        const bool duplicate = std::any_of(orbits.begin(), orbits.end(), [&](const OrbitTriple& o) {
            return same_orbit(o, *candidate, 1e-6 * l, l);
        });
        if (!duplicate) orbits.push_back(*candidate);
    }
    std::sort(orbits.begin(), orbits.end(), [](const OrbitTriple& a, const OrbitTriple& b) {
        return a.t[0] != b.t[0] ? a.t[0] < b.t[0] : a.theta[0] < b.theta[0];
    });
    return orbits;
}

double extended_length(const BoundaryCurve& curve, const PhasePoint& p) {
    const Shot first = shoot(curve, p);
    const Shot second = shoot(curve, first.next);
    const Point2 x0 = curve.position(p.t);
    const Point2 x2 = curve.position(second.next.t);
    return first.chord + second.chord + (x2 - x0).norm();
}

double fermat_defect(const BoundaryCurve& curve, const PhasePoint& p) {
    constexpr double h = 1e-6;
    return (extended_length(curve, {p.t, p.theta + h}) - extended_length(curve, {p.t, p.theta - h})) / (2 * h);
}

double fermat_defect(const BoundaryCurve& curve, const OrbitTriple& orbit) {
    return fermat_defect(curve, orbit.phase(0));
}

double wojtkowski_residual(const BoundaryCurve& curve, const OrbitTriple& orbit) {
    return curve.curvature(orbit.t[0]) * orbit.perimeter - 2.0 * std::pow(std::sin(orbit.theta[0]), 3);
}

double wojtkowski_residual(const BoundaryCurve& curve, const PhasePoint& p) {
    return curve.curvature(p.t) * extended_length(curve, p) - 2.0 * std::pow(std::sin(p.theta), 3);
}

double identity_defect(const Jacobian2& jacobian) { return (jacobian - Jacobian2::Identity()).norm(); }

double dt3_defect(const BoundaryCurve& curve, const PhasePoint& p) {
    return identity_defect(differential(curve, p, 3));
}

namespace {

Eigen::Vector2d fixed_point_residual(const BoundaryCurve& curve, const PhasePoint& q) {
    const PhasePoint image = power(curve, q, 3);
    return {std::remainder(image.t - q.t, curve.length()), image.theta - q.theta};
}

std::optional<PhasePoint> newton_fixed_point(const BoundaryCurve& curve, PhasePoint q, double tol,
                                             int max_iterations) {
    const double l = curve.length();
    const double ht = 1e-7 * l;
    constexpr double hth = 1e-7;
    try {
        Eigen::Vector2d g = fixed_point_residual(curve, q);
        for (int iter = 0; iter < max_iterations; ++iter) {
            if (g.norm() < 1e-3 * tol) break;
            if (iter >= 10 && g.norm() > 1e-3) return std::nullopt;
            Eigen::Matrix2d jac;
            jac.col(0) = (fixed_point_residual(curve, {q.t + ht, q.theta}) - g) / ht;
            jac.col(1) = (fixed_point_residual(curve, {q.t, q.theta + hth}) - g) / hth;
            Eigen::Vector2d step = -min_norm_solve(jac, g, 1e-6);
            if (step.norm() > 1.0) step *= 1.0 / step.norm();
            const PhasePoint next{curve.reduce(q.t + step[0]), q.theta + step[1]};
            if (!(next.theta > 0 && next.theta < kPi)) return std::nullopt;
            const Eigen::Vector2d g_next = fixed_point_residual(curve, next);
            const bool stalled = g_next.norm() >= g.norm() && g.norm() < tol;
            if (stalled) break;
            q = next;
            g = g_next;
        }
        if (!(g.norm() < tol)) return std::nullopt;
        return q;
    } catch (const NumericalError&) {
        return std::nullopt;
    }
}

}  // namespace

std::vector<Eigen::Vector2d> sample_p3(const BoundaryCurve& curve, int grid_t, int grid_theta, double tol,
                                       const SampleOptions& options) {
    if (grid_t < 8 || grid_theta < 8) throw OutOfRange("sample_p3 grid sizes must be at least 8");
    if (!(tol > 0)) throw OutOfRange("sample_p3 tolerance must be positive");
    const double l = curve.length();
    const std::size_t cells = static_cast<std::size_t>(grid_t) * static_cast<std::size_t>(grid_theta);

    std::vector<std::optional<PhasePoint>> found(cells);
    parallel_for(cells, options.threads, [&](std::size_t cell) {
        const auto i = static_cast<double>(cell / static_cast<std::size_t>(grid_theta));
        const auto j = static_cast<double>(cell % static_cast<std::size_t>(grid_theta));
        const PhasePoint start{(i + 0.5) * l / grid_t, (j + 0.5) * kPi / grid_theta};
        found[cell] = newton_fixed_point(curve, start, tol, options.max_iterations);
    });

    std::vector<Eigen::Vector2d> points;
    for (const auto& q : found)
        if (q) points.emplace_back(q->t * kTwoPi / l, q->theta);
    std::sort(points.begin(), points.end(), [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
        return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
    });

    // Greedy deduplication at resolution tol; points are sorted by the first coordinate.
    std::vector<Eigen::Vector2d> unique;
    for (const auto& p : points) {
        bool duplicate = false;
        for (auto it = unique.rbegin(); it != unique.rend() && p.x() - it->x() < tol; ++it)
            if ((p - *it).norm() < tol) {
                duplicate = true;
                break;
            }
        if (!duplicate) {
            // Wrap-around at t = l.
            const Eigen::Vector2d wrapped(p.x() - kTwoPi, p.y());
            for (auto it = unique.begin(); it != unique.end() && it->x() < tol && p.x() > kTwoPi - tol; ++it)
                if ((wrapped - *it).norm() < tol) {
                    duplicate = true;
                    break;
                }
        }
        if (!duplicate) unique.push_back(p);
    }
    return unique;
}

}  // namespace blab
