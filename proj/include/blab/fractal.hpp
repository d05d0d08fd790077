#ifndef BLAB_FRACTAL_HPP
#define BLAB_FRACTAL_HPP

// Finite-sample estimators for dimension, densities and tangent lines of planar sets.

#include "blab/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace blab {

template <typename Scalar>
using Point2T = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
using Points2T = Eigen::Matrix<Scalar, 2, Eigen::Dynamic>;

/// Finite planar sample. Points are sorted lexicographically and points within
/// 1e-12 of their predecessor are dropped.
template <typename Scalar>
class PointCloud {
public:
    using Point = Point2T<Scalar>;

    explicit PointCloud(const Points2T<Scalar>& points, std::string note = {}) : note_(std::move(note)) {
        std::vector<Point> pts;
        pts.reserve(static_cast<std::size_t>(points.cols()));
        for (Eigen::Index i = 0; i < points.cols(); ++i) pts.push_back(points.col(i));
        assign(std::move(pts));
    }

    explicit PointCloud(std::vector<Point> points, std::string note = {}) : note_(std::move(note)) {
        assign(std::move(points));
    }

    Eigen::Index size() const { return points_.cols(); }
    const Points2T<Scalar>& points() const { return points_; }
    auto point(Eigen::Index i) const { return points_.col(i); }
    const std::string& note() const { return note_; }

private:
    void assign(std::vector<Point> pts) {
        for (const auto& p : pts)
            if (!p.allFinite()) throw DomainError("point cloud contains a non-finite coordinate");
        std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
            return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
        });
        std::vector<Point> kept;
        kept.reserve(pts.size());
        for (const auto& p : pts)
            if (kept.empty() || (p - kept.back()).norm() > Scalar(1e-12)) kept.push_back(p);
        if (kept.empty()) throw TooFewPoints("point cloud needs at least one point");
        points_.resize(2, static_cast<Eigen::Index>(kept.size()));
        for (std::size_t i = 0; i < kept.size(); ++i) points_.col(static_cast<Eigen::Index>(i)) = kept[i];
    }

    Points2T<Scalar> points_;
    std::string note_;
};

template <typename Scalar>
struct DimensionEstimate {
    Scalar slope = 0;
    Scalar intercept = 0;
    Scalar r_squared = 0;
    /// Box sizes, strictly decreasing.
    std::vector<Scalar> scales;
    /// Occupied boxes at each scale, averaged over the grid orientations.
    std::vector<Scalar> counts;
};

template <typename Scalar>
struct DensityBounds {
    Scalar lower = 0;
    Scalar upper = 0;
};

template <typename Scalar>
struct TangentReport {
    bool has_tangent = false;
    /// Direction in [0, pi).
    std::optional<Scalar> gamma;
    /// (radius, complement fraction at the best direction and the smallest half-angle).
    std::vector<std::pair<Scalar, Scalar>> excluded_fraction_curve;
    Scalar eta_used = 0;
};

template <typename Scalar>
struct AsymptoticRay {
    Scalar direction = 0;
    /// One cloud index per level.
    std::vector<Eigen::Index> indices;
    /// Window centre chosen at each level.
    std::vector<Scalar> centers;
};

namespace detail {

template <typename Scalar>
Scalar cross2(const Point2T<Scalar>& u, const Point2T<Scalar>& v) {
    return u.x() * v.y() - u.y() * v.x();
}

// Distance of two directions modulo 2 pi.
template <typename Scalar>
Scalar angle_gap(Scalar a, Scalar b) {
    return std::abs(std::remainder(a - b, Scalar(2 * std::numbers::pi)));
}

// Distance of two lines through the origin, i.e. directions modulo pi.
template <typename Scalar>
Scalar axial_gap(Scalar a, Scalar b) {
    return std::abs(std::remainder(a - b, Scalar(std::numbers::pi)));
}

template <typename Scalar>
void check_radii(const std::vector<Scalar>& radii) {
    if (radii.size() < 4) throw OutOfRange("at least 4 radii are required");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0)) throw OutOfRange("radii must be positive");
        if (i > 0 && !(radii[i] < radii[i - 1])) throw OutOfRange("radii must be strictly decreasing");
    }
}

template <typename Scalar>
void check_exponent(Scalar s) {
    if (!(s >= 0 && s <= 2)) throw OutOfRange("exponent s must lie in [0, 2]");
}

template <typename Scalar>
std::vector<Point2T<Scalar>> convex_hull(const PointCloud<Scalar>& cloud) {
    // Points are already sorted lexicographically.
    const Eigen::Index n = cloud.size();
    if (n < 3) {
        std::vector<Point2T<Scalar>> out;
        for (Eigen::Index i = 0; i < n; ++i) out.push_back(cloud.point(i));
        return out;
    }
    std::vector<Point2T<Scalar>> hull(static_cast<std::size_t>(2 * n));
    std::size_t k = 0;
    auto turn = [&](const Point2T<Scalar>& o, const Point2T<Scalar>& a, const Point2T<Scalar>& b) {
        return cross2<Scalar>(a - o, b - o);
    };
    for (Eigen::Index i = 0; i < n; ++i) {
        while (k >= 2 && turn(hull[k - 2], hull[k - 1], cloud.point(i)) <= 0) --k;
        hull[k++] = cloud.point(i);
    }
    for (Eigen::Index i = n - 1, lower = static_cast<Eigen::Index>(k) + 1; i > 0; --i) {
        while (static_cast<Eigen::Index>(k) >= lower && turn(hull[k - 2], hull[k - 1], cloud.point(i - 1)) <= 0)
            --k;
        hull[k++] = cloud.point(i - 1);
    }
    hull.resize(k - 1);
    return hull;
}

// Occupied cells of the grid with the given side, anchored at the bounding-box minimum.
template <typename Scalar>
std::int64_t occupied_cells(const Points2T<Scalar>& points, Scalar side) {
    const Point2T<Scalar> origin = points.rowwise().minCoeff();
    std::vector<std::pair<std::int64_t, std::int64_t>> keys;
    keys.reserve(static_cast<std::size_t>(points.cols()));
    for (Eigen::Index i = 0; i < points.cols(); ++i) {
        const Point2T<Scalar> rel = (points.col(i) - origin) / side;
        keys.emplace_back(static_cast<std::int64_t>(std::floor(rel.x())),
                          static_cast<std::int64_t>(std::floor(rel.y())));
    }
    std::sort(keys.begin(), keys.end());
    return static_cast<std::int64_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

template <typename Scalar>
std::int64_t occupied_cells(const PointCloud<Scalar>& cloud, Scalar side) {
    return occupied_cells<Scalar>(cloud.points(), side);
}

// Points of the cloud other than p, as (distance, direction) pairs.
template <typename Scalar>
struct PolarView {
    std::vector<Scalar> dist;
    std::vector<Scalar> angle;
    std::vector<Eigen::Index> index;
    std::int64_t at_p = 0;
};

template <typename Scalar>
PolarView<Scalar> polar_view(const PointCloud<Scalar>& cloud, const Point2T<Scalar>& p, Scalar max_radius) {
    PolarView<Scalar> view;
    for (Eigen::Index i = 0; i < cloud.size(); ++i) {
        const Point2T<Scalar> d = cloud.point(i) - p;
        const Scalar r = d.norm();
        if (r > max_radius) continue;
        if (r == 0) {
            ++view.at_p;
            continue;
        }
        view.dist.push_back(r);
        view.angle.push_back(std::atan2(d.y(), d.x()));
        view.index.push_back(i);
    }
    return view;
}

}  // namespace detail

/// Largest pairwise distance, via the convex hull.
template <typename Scalar>
Scalar diameter(const PointCloud<Scalar>& cloud) {
    const auto hull = detail::convex_hull(cloud);
    Scalar best = 0;
    for (std::size_t i = 0; i < hull.size(); ++i)
        for (std::size_t j = i + 1; j < hull.size(); ++j) best = std::max(best, (hull[i] - hull[j]).norm());
    return best;
}

/// Finest dyadic side D/2^(2+k), k <= 12, whose grid still averages four or more
/// points per occupied cell. Clusters of near-duplicates do not fool it.
template <typename Scalar>
Scalar resolution_scale(const PointCloud<Scalar>& cloud) {
    const Scalar diam = diameter(cloud);
    const auto quarter = static_cast<std::int64_t>(cloud.size() / 4);
    Scalar side = diam / 8;
    for (int k = 2; k <= 12; ++k) {
        const Scalar next = diam / std::pow(Scalar(2), Scalar(2 + k));
        if (detail::occupied_cells(cloud, next) > quarter) break;
        side = next;
    }
    return side;
}

/// Grid orientations averaged by box_dimension; they split the square's quarter turn evenly.
inline constexpr int kGridOrientations = 16;

/// Box-counting estimate on the dyadic grids D/2^3 ... D/2^(2 + n_scales).
/// Counts are averaged over kGridOrientations rotated copies of each grid, which
/// keeps the slope stable under rigid motions of the cloud.
template <typename Scalar>
DimensionEstimate<Scalar> box_dimension(const PointCloud<Scalar>& cloud, int n_scales) {
    if (cloud.size() < 100)
        throw TooFewPoints("box_dimension needs at least 100 distinct points, got " + std::to_string(cloud.size()));
    if (n_scales < 4) throw OutOfRange("box_dimension needs at least 4 scales");
    const Scalar diam = diameter(cloud);

    std::vector<Points2T<Scalar>> turned;
    for (int j = 0; j < kGridOrientations; ++j) {
        const Scalar beta = Scalar(std::numbers::pi / 2) * j / kGridOrientations;
        const Eigen::Rotation2D<Scalar> rot(beta);
        turned.push_back(rot.toRotationMatrix() * cloud.points());
    }

    DimensionEstimate<Scalar> est;
    std::vector<Scalar> xs, ys;
    for (int k = 1; k <= n_scales; ++k) {
        const Scalar eps = diam / std::pow(Scalar(2), Scalar(2 + k));
        Scalar count = 0;
        for (const auto& pts : turned) count += static_cast<Scalar>(detail::occupied_cells<Scalar>(pts, eps));
        count /= kGridOrientations;
        est.scales.push_back(eps);
        est.counts.push_back(count);
        xs.push_back(std::log(Scalar(1) / eps));
        ys.push_back(std::log(count));
    }
    const auto m = static_cast<Scalar>(xs.size());
    Scalar mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= m;
    my /= m;
    Scalar sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    est.slope = sxy / sxx;
    est.intercept = my - est.slope * mx;
    est.r_squared = syy > 0 ? std::clamp(sxy * sxy / (sxx * syy), Scalar(0), Scalar(1)) : Scalar(1);
    return est;
}

/// Scale count reaching down to resolution_scale, clamped to [4, 12].
template <typename Scalar>
int suggest_scale_count(const PointCloud<Scalar>& cloud) {
    const Scalar ratio = diameter(cloud) / resolution_scale(cloud);
    const int n = static_cast<int>(std::lround(std::log2(ratio))) - 2;
    return std::clamp(n, 4, 12);
}

/// Upper bound on H^s_delta from the grid cover of mesh delta / sqrt(2), whose cells have diameter delta.
template <typename Scalar>
Scalar hausdorff_premeasure(const PointCloud<Scalar>& cloud, Scalar s, Scalar delta) {
    detail::check_exponent(s);
    if (!(delta > 0)) throw OutOfRange("delta must be positive");
    const auto cells = detail::occupied_cells(cloud, delta / std::sqrt(Scalar(2)));
    return static_cast<Scalar>(cells) * std::pow(delta, s);
}

/// N(side) * side^s for the grid of the given cell side: the default mass of the
/// empirical measure used by the density estimators.
template <typename Scalar>
Scalar box_mass(const PointCloud<Scalar>& cloud, Scalar s, Scalar side) {
    detail::check_exponent(s);
    if (!(side > 0)) throw OutOfRange("side must be positive");
    return static_cast<Scalar>(detail::occupied_cells(cloud, side)) * std::pow(side, s);
}

/// Dyadic radii D/8, D/16, ... (at most `levels`), stopping at resolution_scale; never fewer than four.
template <typename Scalar>
std::vector<Scalar> default_radii(const PointCloud<Scalar>& cloud, int levels = 6) {
    const Scalar diam = diameter(cloud);
    const Scalar floor_side = resolution_scale(cloud) * Scalar(0.999);
    std::vector<Scalar> radii;
    for (int k = 0; k < levels; ++k) {
        const Scalar r = diam / std::pow(Scalar(2), Scalar(3 + k));
        if (k >= 4 && r < floor_side) break;
        radii.push_back(r);
    }
    return radii;
}

template <typename Scalar>
std::vector<Scalar> default_eta_grid() {
    return {Scalar(0.05), Scalar(0.1), Scalar(0.2)};
}

/// Empirical lower/upper density: min and max over radii of mu(B(p, r)) / (2r)^s,
/// mu = (fraction of points) * mass_scale. mass_scale defaults to box_mass at the finest radius.
template <typename Scalar>
DensityBounds<Scalar> density(const PointCloud<Scalar>& cloud, const Point2T<Scalar>& p, Scalar s,
                              const std::vector<Scalar>& radii, std::optional<Scalar> mass_scale = std::nullopt) {
    detail::check_exponent(s);
    detail::check_radii(radii);
    const Scalar mass = mass_scale ? *mass_scale : box_mass(cloud, s, radii.back());
    const auto total = static_cast<Scalar>(cloud.size());
    DensityBounds<Scalar> out{std::numeric_limits<Scalar>::infinity(), 0};
    for (const Scalar r : radii) {
        std::int64_t inside = 0;
        for (Eigen::Index i = 0; i < cloud.size(); ++i)
            if ((cloud.point(i) - p).norm() <= r) ++inside;
        const Scalar value = static_cast<Scalar>(inside) / total * mass / std::pow(2 * r, s);
        out.lower = std::min(out.lower, value);
        out.upper = std::max(out.upper, value);
    }
    return out;
}

/// Upper angular density over the sector W_p(gamma; r, eta).
template <typename Scalar>
Scalar angular_density(const PointCloud<Scalar>& cloud, const Point2T<Scalar>& p, Scalar s, Scalar gamma,
                       Scalar eta, const std::vector<Scalar>& radii,
                       std::optional<Scalar> mass_scale = std::nullopt) {
    detail::check_exponent(s);
    detail::check_radii(radii);
    if (!(eta > 0 && eta <= Scalar(std::numbers::pi / 2))) throw OutOfRange("eta must lie in (0, pi/2]");
    const Scalar mass = mass_scale ? *mass_scale : box_mass(cloud, s, radii.back());
    const auto total = static_cast<Scalar>(cloud.size());
    const auto view = detail::polar_view(cloud, p, radii.front());
    Scalar best = 0;
    for (const Scalar r : radii) {
        std::int64_t inside = view.at_p;  // the apex belongs to every sector
        for (std::size_t i = 0; i < view.dist.size(); ++i)
            if (view.dist[i] <= r && detail::angle_gap(view.angle[i], gamma) <= eta) ++inside;
        best = std::max(best, static_cast<Scalar>(inside) / total * mass / std::pow(2 * r, s));
    }
    return best;
}

namespace detail {

// Share of the ball's mass (apex excluded) outside the double sector around gamma.
// An empty ball carries no evidence of concentration and counts as 1.
template <typename Scalar>
Scalar complement_fraction(const PolarView<Scalar>& view, Scalar r, Scalar gamma, Scalar eta) {
    std::int64_t ball = 0, outside = 0;
    for (std::size_t i = 0; i < view.dist.size(); ++i) {
        if (view.dist[i] > r) continue;
        ++ball;
        if (axial_gap(view.angle[i], gamma) > eta) ++outside;
    }
    return ball == 0 ? Scalar(1) : static_cast<Scalar>(outside) / static_cast<Scalar>(ball);
}

// Sum of squared sines to the line through p in direction gamma.
template <typename Scalar>
Scalar axial_spread(const PolarView<Scalar>& view, Scalar r, Scalar gamma) {
    Scalar sum = 0;
    for (std::size_t i = 0; i < view.dist.size(); ++i) {
        if (view.dist[i] > r) continue;
        const Scalar sn = std::sin(view.angle[i] - gamma);
        sum += sn * sn;
    }
    return sum;
}

}  // namespace detail

/// Finite-scale tangent-line test: a direction gamma is accepted when, for every
/// eta in eta_grid, the mass outside W_p(gamma; r, eta) u W_p(gamma + pi; r, eta)
/// is below `threshold` of the ball's mass at the two finest radii.
template <typename Scalar>
TangentReport<Scalar> tangent_test(const PointCloud<Scalar>& cloud, const Point2T<Scalar>& p, Scalar s,
                                   std::vector<Scalar> eta_grid, const std::vector<Scalar>& radii,
                                   Scalar threshold = Scalar(0.05)) {
    detail::check_exponent(s);
    detail::check_radii(radii);
    if (eta_grid.empty()) throw OutOfRange("eta grid must not be empty");
    for (const Scalar eta : eta_grid)
        if (!(eta > 0 && eta <= Scalar(std::numbers::pi / 2))) throw OutOfRange("eta must lie in (0, pi/2]");
    std::sort(eta_grid.begin(), eta_grid.end());

    TangentReport<Scalar> report;
    report.eta_used = eta_grid.front();
    if (!(density(cloud, p, s, radii).upper > 0)) return report;

    const auto view = detail::polar_view(cloud, p, radii.front());
    const std::size_t levels = radii.size();
    const Scalar fine = radii[levels - 1];
    const Scalar second = radii[levels - 2];
    auto score = [&](Scalar gamma) {
        Scalar worst = 0;
        for (const Scalar eta : eta_grid)
            worst = std::max({worst, detail::complement_fraction(view, fine, gamma, eta),
                              detail::complement_fraction(view, second, gamma, eta)});
        return worst;
    };
    auto spread = [&](Scalar gamma) { return detail::axial_spread(view, second, gamma); };

    constexpr int kCandidates = 360;
    const Scalar grid_step = Scalar(std::numbers::pi) / kCandidates;
    Scalar best_gamma = 0;
    Scalar best_score = std::numeric_limits<Scalar>::infinity();
    Scalar best_spread = std::numeric_limits<Scalar>::infinity();
    for (int c = 0; c < kCandidates; ++c) {
        const Scalar gamma = c * grid_step;
        const Scalar sc = score(gamma);
        if (sc > best_score) continue;
        const Scalar sp = spread(gamma);
        if (sc < best_score || sp < best_spread) {
            best_gamma = gamma;
            best_score = sc;
            best_spread = sp;
        }
    }

    // Golden-section refinement of the axial spread around the best candidate.
    const Scalar ratio = Scalar((std::sqrt(5.0) - 1) / 2);
    Scalar lo = best_gamma - grid_step, hi = best_gamma + grid_step;
    Scalar a = hi - ratio * (hi - lo), b = lo + ratio * (hi - lo);
    Scalar fa = spread(a), fb = spread(b);
    while (hi - lo > Scalar(1e-3)) {
        if (fa < fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = spread(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = spread(b);
        }
    }
    const Scalar refined = (lo + hi) / 2;
    if (score(refined) <= best_score) {
        best_gamma = refined;
        best_score = score(refined);
    }
    const Scalar pi = Scalar(std::numbers::pi);
    best_gamma = std::fmod(std::fmod(best_gamma, pi) + pi, pi);

    for (const Scalar r : radii)
        report.excluded_fraction_curve.emplace_back(
            r, detail::complement_fraction(view, r, best_gamma, eta_grid.front()));
    report.gamma = best_gamma;
    report.has_tangent = best_score < threshold;
    return report;
}

/// Nested angular windows: level n keeps the half-width 2^-n window, centred
/// within the closure of the previous one, that holds the most points within
/// radius 1/n of p; ties go to the smaller centre.
template <typename Scalar>
AsymptoticRay<Scalar> asymptotic_ray(const PointCloud<Scalar>& cloud, const Point2T<Scalar>& p, int n_levels) {
    if (n_levels < 1) throw OutOfRange("n_levels must be at least 1");
    const auto view = detail::polar_view(cloud, p, Scalar(1));
    for (int n = 1; n <= n_levels; ++n) {
        const Scalar radius = Scalar(1) / n;
        const auto near = std::count_if(view.dist.begin(), view.dist.end(), [&](Scalar d) { return d <= radius; });
        if (near < n_levels)
            throw NotAccumulationPoint("fewer than " + std::to_string(n_levels) + " points within 1/" +
                                       std::to_string(n) + " of p");
    }

    const Scalar two_pi = Scalar(2 * std::numbers::pi);
    AsymptoticRay<Scalar> ray;
    std::vector<bool> used(view.dist.size(), false);
    Scalar center = 0;
    for (int n = 1; n <= n_levels; ++n) {
        const Scalar half = std::pow(Scalar(2), Scalar(-n));
        const Scalar radius = Scalar(1) / n;
        std::vector<Scalar> candidates;
        if (n == 1) {
            for (Scalar c = 0; c < two_pi; c += half) candidates.push_back(c);
        } else {
            for (int k = -2; k <= 2; ++k) candidates.push_back(center + k * half);
        }
        Scalar best_center = candidates.front();
        std::int64_t best_count = -1;
        for (const Scalar c : candidates) {
            std::int64_t count = 0;
            for (std::size_t i = 0; i < view.dist.size(); ++i)
                if (view.dist[i] <= radius && detail::angle_gap(view.angle[i], c) <= half) ++count;
            if (count > best_count) {
                best_count = count;
                best_center = c;
            }
        }
        if (best_count <= 0) throw NotAccumulationPoint("no cloud points in the nested window at level " +
                                                        std::to_string(n));
        center = best_center;

        // The farthest point of the window within radius 1/n, preferring unused ones.
        std::optional<std::size_t> pick;
        for (std::size_t i = 0; i < view.dist.size(); ++i) {
            if (view.dist[i] > radius || detail::angle_gap(view.angle[i], center) > half) continue;
            const bool better = !pick || (used[*pick] && !used[i]) ||
                                (used[*pick] == used[i] && view.dist[i] > view.dist[*pick]);
            if (better) pick = i;
        }
        used[*pick] = true;
        ray.indices.push_back(view.index[*pick]);
        ray.centers.push_back(center);
    }
    ray.direction = std::fmod(std::fmod(center, two_pi) + two_pi, two_pi);
    return ray;
}

/// dist(q, R) / |q - p| for the ray R from p in direction gamma.
template <typename Scalar>
Scalar ray_residual(const Point2T<Scalar>& p, Scalar gamma, const Point2T<Scalar>& q) {
    const Point2T<Scalar> v(std::cos(gamma), std::sin(gamma));
    const Point2T<Scalar> d = q - p;
    const Scalar len = d.norm();
    if (len == 0) return 0;
    if (d.dot(v) < 0) return 1;
    return std::abs(detail::cross2<Scalar>(v, d)) / len;
}

/// Limit of (F(p_k) - F(p)) / |p_k - p| along a sequence converging to p
/// asymptotically to a ray. `sequence` holds p_1..p_K as columns, `values` the
/// matching F(p_k) as columns. The tail quotients are fitted by a quadratic in
/// |p_k - p| and the intercept is returned.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> derivative_along(const Points2T<Scalar>& sequence,
                                                         const Point2T<Scalar>& p,
                                                         const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& values,
                                                         const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& value_at_p) {
    using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const Eigen::Index count = sequence.cols();
    if (count < 8) throw NotAsymptotic("need at least 8 sequence points");
    if (values.cols() != count || values.rows() != value_at_p.size())
        throw OutOfRange("values must have one column per sequence point");

    const Point2T<Scalar> last = sequence.col(count - 1) - p;
    if (!(last.norm() > 0) || !(last.norm() < (sequence.col(0) - p).norm()))
        throw NotAsymptotic("sequence does not approach p");
    const Scalar gamma = std::atan2(last.y(), last.x());

    const Eigen::Index tail = std::max<Eigen::Index>(8, count / 4);
    const Eigen::Index first = count - tail;
    for (Eigen::Index k = first; k < count; ++k)
        if (!(ray_residual<Scalar>(p, gamma, sequence.col(k)) < Scalar(1e-2)))
            throw NotAsymptotic("tail of the sequence is not asymptotic to a ray");

    MatrixX design(tail, 3);
    MatrixX quotients(tail, values.rows());
    for (Eigen::Index k = 0; k < tail; ++k) {
        const Scalar h = (sequence.col(first + k) - p).norm();
        design(k, 0) = 1;
        design(k, 1) = h;
        design(k, 2) = h * h;
        quotients.row(k) = ((values.col(first + k) - value_at_p) / h).transpose();
    }
    const MatrixX coeffs = design.colPivHouseholderQr().solve(quotients);
    return VectorX(coeffs.row(0).transpose());
}

/// n stratified uniform points on the unit segment [0, 1] x {0}: one jittered
/// point per cell [i/n, (i+1)/n), with the two endpoints pinned.
template <typename Scalar = double>
PointCloud<Scalar> segment_fixture(int n = 10000, std::uint64_t seed = 1) {
    if (n < 2) throw OutOfRange("segment fixture needs at least 2 points");
    std::mt19937_64 rng(seed);
    Points2T<Scalar> pts(2, n);
    for (int i = 0; i < n; ++i) {
        const double jitter = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        pts.col(i) = Point2T<Scalar>(static_cast<Scalar>((i + jitter) / n), 0);
    }
    pts.col(0) = Point2T<Scalar>(0, 0);
    pts.col(n - 1) = Point2T<Scalar>(1, 0);
    return PointCloud<Scalar>(pts, "segment");
}

/// Left endpoints of the level-`levels` intervals of C(1/3) x C(1/3): 4^levels points.
template <typename Scalar = double>
PointCloud<Scalar> cantor_dust(int levels = 7) {
    if (levels < 1 || levels > 10) throw OutOfRange("cantor dust levels must lie in [1, 10]");
    std::vector<Scalar> line{0};
    Scalar scale = 1;
    for (int k = 0; k < levels; ++k) {
        scale /= 3;
        std::vector<Scalar> next;
        for (const Scalar x : line) {
            next.push_back(x);
            next.push_back(x + 2 * scale);
        }
        line = std::move(next);
    }
    Points2T<Scalar> pts(2, static_cast<Eigen::Index>(line.size() * line.size()));
    Eigen::Index k = 0;
    for (const Scalar x : line)
        for (const Scalar y : line) pts.col(k++) = Point2T<Scalar>(x, y);
    return PointCloud<Scalar>(pts, "cantor_dust");
}

}  // namespace blab

#endif  // BLAB_FRACTAL_HPP
