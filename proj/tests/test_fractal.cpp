#include "blab/error.hpp"
#include "blab/fractal.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace blab;

namespace {

constexpr double kPi = std::numbers::pi;
using Cloud = PointCloud<double>;
using P2 = Point2T<double>;

Cloud transformed(const Cloud& c, double angle, const P2& shift) {
    const Eigen::Matrix2d rot = Eigen::Rotation2Dd(angle).toRotationMatrix();
    Points2T<double> pts = rot * c.points();
    pts.colwise() += shift;
    return Cloud(pts);
}

Cloud random_cloud(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Points2T<double> pts(2, n);
    const int mode = static_cast<int>(rng() % 3);
    for (int i = 0; i < n; ++i) {
        const double a = u(rng), b = u(rng);
        if (mode == 0) pts.col(i) = P2(a, b);                      // filled square
        else if (mode == 1) pts.col(i) = P2(a, 0.3 * a + 0.01 * b);  // thin strip
        else pts.col(i) = P2(std::cos(4 * a), std::sin(4 * a));     // arc
    }
    return Cloud(pts);
}

// Sum of diameters of the greedy cover of a sorted 1-D set by intervals no longer than delta.
double greedy_interval_cover(std::vector<double> xs, double delta) {
    std::sort(xs.begin(), xs.end());
    double sum = 0;
    std::size_t i = 0;
    while (i < xs.size()) {
        std::size_t j = i;
        while (j + 1 < xs.size() && xs[j + 1] - xs[i] <= delta) ++j;
        sum += xs[j] - xs[i];
        i = j + 1;
    }
    return sum;
}

// Points p + v/k + w/k^2 for k = 1..count.
Points2T<double> approach(const P2& p, const P2& v, const P2& w, int count) {
    Points2T<double> seq(2, count);
    for (int k = 1; k <= count; ++k) seq.col(k - 1) = p + v / k + w / (double(k) * k);
    return seq;
}

}  // namespace

TEST_CASE("point cloud invariants") {
    Points2T<double> pts(2, 4);
    pts << 1, 0, 1, 1 + 1e-13, 2, 0, 2, 2;
    const Cloud c(pts, "tag");
    CHECK(c.size() == 2);
    CHECK(c.note() == "tag");
    CHECK(c.point(0) == P2(0, 0));
    CHECK_THROWS_AS(Cloud(Points2T<double>(2, 0)), TooFewPoints);
}

TEST_CASE("segment dimension") {
    const auto seg = segment_fixture();
    CHECK(seg.size() == 10000);
    CHECK(std::abs(diameter(seg) - 1.0) < 1e-12);
    const auto est = box_dimension(seg, 6);
    CHECK(std::abs(est.slope - 1.0) < 0.05);
    CHECK(est.r_squared > 0.99);
    CHECK(est.scales.size() == 6);
    for (std::size_t i = 1; i < est.scales.size(); ++i) CHECK(est.scales[i] < est.scales[i - 1]);
    CHECK(std::abs(box_dimension(seg, suggest_scale_count(seg)).slope - 1.0) < 0.05);
}

TEST_CASE("cantor dust dimension") {
    const auto dust = cantor_dust();
    CHECK(dust.size() == 16384);
    const double expected = 2 * std::log(2.0) / std::log(3.0);
    CHECK(std::abs(box_dimension(dust, 6).slope - expected) < 0.1);
    CHECK(std::abs(box_dimension(dust, suggest_scale_count(dust)).slope - expected) < 0.1);
}

TEST_CASE("dimension preconditions") {
    // One repeated point padded to 100 entries collapses to a single point.
    Points2T<double> same(2, 100);
    same.colwise() = P2(0.5, 0.5);
    CHECK_THROWS_AS(box_dimension(Cloud(same), 6), TooFewPoints);
    CHECK_THROWS_AS(box_dimension(segment_fixture(), 3), OutOfRange);
}

TEST_CASE("rigid motions leave the dimension alone") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        Points2T<double> pts(2, 8000);
        const double bend = 3 * u(rng);
        for (int i = 0; i < 8000; ++i) {
            const double a = (i + u(rng)) / 8000;
            // A segment (bend 0) through to a three-radian arc.
            pts.col(i) = bend < 0.3 ? P2(a, 0) : P2(std::sin(bend * a), 1 - std::cos(bend * a)) / bend;
        }
        const Cloud cloud(pts);
        const auto moved = transformed(cloud, 0.7, P2(3.0, -2.0));
        CHECK(std::abs(box_dimension(moved, 6).slope - box_dimension(cloud, 6).slope) < 0.02);
        const auto random_motion = transformed(cloud, 2 * kPi * u(rng), P2(10 * u(rng), -10 * u(rng)));
        CHECK(std::abs(box_dimension(random_motion, 6).slope - box_dimension(cloud, 6).slope) < 0.02);
    }
    const auto seg = segment_fixture();
    CHECK(std::abs(box_dimension(transformed(seg, 0.7, P2(3.0, -2.0)), 6).slope - box_dimension(seg, 6).slope) <
          0.02);
}

TEST_CASE("hausdorff premeasure") {
    const auto seg = segment_fixture();
    const double h1 = hausdorff_premeasure(seg, 1.0, 0.01);
    CHECK(h1 >= 1.0);
    CHECK(h1 <= 1.5);
    std::vector<double> xs;
    for (Eigen::Index i = 0; i < seg.size(); ++i) xs.push_back(seg.point(i).x());
    const double greedy = greedy_interval_cover(xs, 0.01);
    CHECK(greedy > 0.95);
    CHECK(greedy <= h1);
    CHECK(hausdorff_premeasure(seg, 0.0, 0.5) >= 1.0);
    CHECK(hausdorff_premeasure(seg, 2.0, 0.01) <= 0.02);
    CHECK(hausdorff_premeasure(seg, 2.0, 0.001) < hausdorff_premeasure(seg, 2.0, 0.01));
    CHECK_THROWS_AS(hausdorff_premeasure(seg, 2.5, 0.01), OutOfRange);
    CHECK_THROWS_AS(hausdorff_premeasure(seg, 1.0, 0.0), OutOfRange);
}

TEST_CASE("segment densities") {
    const auto seg = segment_fixture();
    const auto radii = default_radii(seg);
    CHECK(radii.size() == 6);
    const auto mid = density(seg, P2(0.5, 0), 1.0, radii);
    CHECK(std::abs(mid.upper - 1.0) < 0.2);
    CHECK(std::abs(mid.lower - 1.0) < 0.2);
    const auto end = density(seg, P2(0.0, 0), 1.0, radii);
    CHECK(std::abs(end.upper - 0.5) < 0.2);
    CHECK(std::abs(end.lower - 0.5) < 0.2);
    const auto far = density(seg, P2(40.0, 40.0), 1.0, radii);
    CHECK(far.upper == 0.0);
    CHECK(far.lower == 0.0);
    const double unit_mass = box_mass(seg, 1.0, radii.back());
    CHECK(density(seg, P2(0.5, 0), 1.0, radii, std::optional<double>(2.0)).upper ==
          doctest::Approx(2 / unit_mass * mid.upper));
    CHECK_THROWS_AS(density(seg, P2(0.5, 0), 1.0, {0.1, 0.2, 0.05, 0.01}), OutOfRange);
    CHECK_THROWS_AS(density(seg, P2(0.5, 0), 1.0, {0.1, 0.05, 0.01}), OutOfRange);
}

TEST_CASE("angular densities") {
    const auto seg = segment_fixture();
    const auto radii = default_radii(seg);
    CHECK(std::abs(angular_density(seg, P2(0.5, 0), 1.0, 0.0, 0.1, radii) - 0.5) < 0.2);
    CHECK(angular_density(seg, P2(0.5, 0), 1.0, kPi / 2, 0.1, radii) < 0.01);
    CHECK_THROWS_AS(angular_density(seg, P2(0.5, 0), 1.0, 0.0, 0.0, radii), OutOfRange);
    CHECK_THROWS_AS(angular_density(seg, P2(0.5, 0), 1.0, 0.0, 2.0, radii), OutOfRange);

    const auto dust = cantor_dust();
    const auto dust_radii = default_radii(dust);
    std::mt19937_64 rng(8);
    for (int i = 0; i < 20; ++i) {
        const P2 p = dust.point(static_cast<Eigen::Index>(rng() % dust.size()));
        const double gamma = 2 * kPi * static_cast<double>(rng() % 1000) / 1000;
        CHECK(angular_density(dust, p, 1.2619, gamma, kPi / 2, dust_radii) > 0);
    }
}

TEST_CASE("angular density is bounded by density and monotone in eta") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 60; ++trial) {
        const auto cloud = random_cloud(rng, 300 + static_cast<int>(rng() % 400));
        const auto radii = default_radii(cloud);
        const P2 p = cloud.point(static_cast<Eigen::Index>(rng() % cloud.size())) + P2(0.01 * u(rng), 0);
        const double s = 2 * u(rng);
        const double gamma = 2 * kPi * u(rng);
        const double upper = density(cloud, p, s, radii).upper;
        double previous = 0;
        for (const double eta : {0.01, 0.05, 0.1, 0.3, 0.8, kPi / 2}) {
            const double a = angular_density(cloud, p, s, gamma, eta, radii);
            CHECK(a >= 0);
            CHECK(a <= upper + 1e-12);
            CHECK(a >= previous);
            previous = a;
        }
    }
}

TEST_CASE("tangent lines") {
    const auto seg = segment_fixture();
    const auto radii = default_radii(seg);
    const auto eta = default_eta_grid<double>();
    const auto mid = tangent_test(seg, P2(0.5, 0), 1.0, eta, radii, 0.05);
    CHECK(mid.has_tangent);
    REQUIRE(mid.gamma);
    CHECK(std::min(*mid.gamma, kPi - *mid.gamma) < 1e-2);
    CHECK(mid.excluded_fraction_curve.size() == radii.size());
    CHECK(mid.excluded_fraction_curve.back().second < 0.05);
    CHECK(mid.eta_used == 0.05);

    const auto far = tangent_test(seg, P2(30.0, 30.0), 1.0, eta, radii, 0.05);
    CHECK_FALSE(far.has_tangent);

    const auto dust = cantor_dust();
    const auto dust_radii = default_radii(dust);
    int without = 0;
    for (int i = 0; i < 50; ++i) {
        const P2 p = dust.point(static_cast<Eigen::Index>(i * dust.size() / 50));
        without += !tangent_test(dust, p, 1.2619, eta, dust_radii, 0.05).has_tangent;
    }
    CHECK(without >= 48);
}

TEST_CASE("tangent test on lines in every direction") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 12; ++trial) {
        const double angle = kPi * u(rng);
        const auto line = transformed(segment_fixture(4000, trial + 1), angle, P2(u(rng), u(rng)));
        const auto radii = default_radii(line);
        for (int i = 0; i < 10; ++i) {
            // Interior points only: stay clear of both endpoints.
            const Eigen::Index k = line.size() / 5 + i * (3 * line.size() / 5) / 10;
            const auto rep = tangent_test<double>(line, line.point(k), 1.0, default_eta_grid<double>(), radii, 0.05);
            CHECK(rep.has_tangent);
            REQUIRE(rep.gamma);
            const double err = std::abs(std::remainder(*rep.gamma - angle, kPi));
            CHECK(err < 1e-2);
        }
    }
}

TEST_CASE("asymptotic ray on a single ray") {
    const P2 p(0.2, -0.1);
    Points2T<double> pts(2, 1000);
    for (int k = 1; k <= 1000; ++k) pts.col(k - 1) = p + P2(std::cos(0.3), std::sin(0.3)) / k;
    const Cloud cloud(pts);
    const auto ray = asymptotic_ray(cloud, p, 10);
    CHECK(std::abs(ray.direction - 0.3) < 1e-3);
    REQUIRE(ray.indices.size() == 10);
    for (std::size_t k = 0; k < ray.indices.size(); ++k) {
        const double bound = std::sin(3.0 / std::pow(2.0, double(k + 1))) + 2 * kPi / 360;
        CHECK(ray_residual<double>(p, ray.direction, cloud.point(ray.indices[k])) <= bound);
    }
}

TEST_CASE("asymptotic ray tie-break on two rays") {
    const P2 p(0, 0);
    Points2T<double> pts(2, 1000);
    for (int k = 1; k <= 500; ++k) {
        pts.col(2 * k - 2) = P2(1.0 / k, 0);
        pts.col(2 * k - 1) = P2(0, 1.0 / k);
    }
    const auto ray = asymptotic_ray(Cloud(pts), p, 10);
    const bool horizontal = std::abs(std::remainder(ray.direction, 2 * kPi)) < 1e-2;
    const bool vertical = std::abs(ray.direction - kPi / 2) < 1e-2;
    CHECK((horizontal || vertical));
    CHECK(horizontal);
}

TEST_CASE("asymptotic ray on a spiral") {
    const P2 p(0, 0);
    const int count = 100000;
    Points2T<double> pts(2, count);
    for (int k = 1; k <= count; ++k) {
        const double a = 1.0 / std::sqrt(double(k));
        pts.col(k - 1) = P2(std::cos(a), std::sin(a)) / k;
    }
    const Cloud cloud(pts);
    const auto ray = asymptotic_ray(cloud, p, 12);
    CHECK(std::abs(std::remainder(ray.direction, 2 * kPi)) < 1e-2);
    for (std::size_t k = 0; k < ray.indices.size(); ++k) {
        const double bound = std::sin(3.0 / std::pow(2.0, double(k + 1))) + 2 * kPi / 360;
        CHECK(ray_residual<double>(p, ray.direction, cloud.point(ray.indices[k])) <= bound);
    }
}

TEST_CASE("asymptotic ray needs an accumulation point") {
    Points2T<double> pts(2, 3);
    pts << 0.1, 0.2, 0.3, 0, 0, 0;
    CHECK_THROWS_AS(asymptotic_ray(Cloud(pts), P2(0, 0), 5), NotAccumulationPoint);
    CHECK_THROWS_AS(asymptotic_ray(segment_fixture(), P2(5, 5), 3), NotAccumulationPoint);
}

TEST_CASE("nested windows bound on random rays") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double gamma = 2 * kPi * u(rng);
        const P2 p(u(rng), u(rng));
        const P2 v(std::cos(gamma), std::sin(gamma)), w(-v.y(), v.x());
        const Cloud cloud(approach(p, v, (u(rng) - 0.5) * w, 2000));
        const auto ray = asymptotic_ray(cloud, p, 10);
        CHECK(std::abs(std::remainder(ray.direction - gamma, 2 * kPi)) < 1e-2);
        for (std::size_t k = 0; k < ray.indices.size(); ++k) {
            const double bound = std::sin(3.0 / std::pow(2.0, double(k + 1))) + 2 * kPi / 360;
            CHECK(ray_residual<double>(p, ray.direction, cloud.point(ray.indices[k])) <= bound);
        }
    }
}

TEST_CASE("derivative along sequences") {
    using VectorX = Eigen::VectorXd;
    using MatrixX = Eigen::MatrixXd;
    const int count = 1000;

    SUBCASE("identity map") {
        const P2 p(0.3, 0.4);
        const P2 v = P2(1.0, 2.0).normalized();
        for (const double transverse : {0.0, 0.5}) {
            const auto seq = approach(p, v, transverse * P2(-v.y(), v.x()), count);
            const MatrixX values = seq;
            const VectorX d = derivative_along<double>(seq, p, values, VectorX(p));
            CHECK((d - VectorX(v)).norm() < 1e-6);
        }
    }
    SUBCASE("quadratic map along the x axis") {
        const P2 p(1, 0);
        const auto seq = approach(p, P2(1, 0), P2(0, 0), count);
        MatrixX values(2, count);
        for (int k = 0; k < count; ++k) {
            const double x = seq(0, k), y = seq(1, k);
            values.col(k) << x * x, x * y;
        }
        const VectorX d = derivative_along<double>(seq, p, values, VectorX(VectorX::Map(std::array{1.0, 0.0}.data(), 2)));
        CHECK(std::abs(d[0] - 2) < 1e-3);
        CHECK(std::abs(d[1]) < 1e-3);
    }
    SUBCASE("scalar map with transverse decay") {
        const P2 p(0, 0);
        const auto seq = approach(p, P2(0, 1), P2(1, 0), count);
        MatrixX values(1, count);
        for (int k = 0; k < count; ++k) values(0, k) = std::sin(seq(0, k)) + seq(1, k) * seq(1, k);
        const VectorX d = derivative_along<double>(seq, p, values, VectorX::Zero(1));
        CHECK(std::abs(d[0]) < 1e-3);
    }
    SUBCASE("random cubic polynomial maps") {
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int trial = 0; trial < 10; ++trial) {
            // F_i(x, y) = sum_{a + b <= 3} c[i][a][b] x^a y^b
            double c[2][4][4] = {};
            for (auto& plane : c)
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; a + b < 4; ++b) plane[a][b] = u(rng);
            auto eval = [&](const P2& q) {
                VectorX out = VectorX::Zero(2);
                for (int i = 0; i < 2; ++i)
                    for (int a = 0; a < 4; ++a)
                        for (int b = 0; a + b < 4; ++b) out[i] += c[i][a][b] * std::pow(q.x(), a) * std::pow(q.y(), b);
                return out;
            };
            auto jacobian = [&](const P2& q) {
                Eigen::Matrix2d j = Eigen::Matrix2d::Zero();
                for (int i = 0; i < 2; ++i)
                    for (int a = 0; a < 4; ++a)
                        for (int b = 0; a + b < 4; ++b) {
                            if (a > 0) j(i, 0) += c[i][a][b] * a * std::pow(q.x(), a - 1) * std::pow(q.y(), b);
                            if (b > 0) j(i, 1) += c[i][a][b] * b * std::pow(q.x(), a) * std::pow(q.y(), b - 1);
                        }
                return j;
            };
            const P2 p(u(rng), u(rng));
            const double gamma = kPi * u(rng);
            const P2 v(std::cos(gamma), std::sin(gamma));
            const auto seq = approach(p, v, u(rng) * P2(-v.y(), v.x()), count);
            MatrixX values(2, count);
            for (int k = 0; k < count; ++k) values.col(k) = eval(seq.col(k));
            const VectorX d = derivative_along<double>(seq, p, values, eval(p));
            CHECK((d - jacobian(p) * v).norm() < 1e-3);
        }
    }
}

TEST_CASE("derivative along rejects bad sequences") {
    using VectorX = Eigen::VectorXd;
    const P2 p(0, 0);
    // Alternating directions never settle on a ray.
    Points2T<double> zigzag(2, 100);
    for (int k = 1; k <= 100; ++k) zigzag.col(k - 1) = P2(1.0 / k, (k % 2 ? 1.0 : -1.0) / k);
    CHECK_THROWS_AS(derivative_along<double>(zigzag, p, Eigen::MatrixXd(zigzag), VectorX(p)), NotAsymptotic);
    // Moving away from p.
    Points2T<double> away(2, 100);
    for (int k = 1; k <= 100; ++k) away.col(k - 1) = P2(k, 0);
    CHECK_THROWS_AS(derivative_along<double>(away, p, Eigen::MatrixXd(away), VectorX(p)), NotAsymptotic);
}

TEST_CASE("single precision instantiation") {
    const auto seg = segment_fixture<float>(10000, 1);
    CHECK(std::abs(box_dimension(seg, 6).slope - 1.0f) < 0.05f);
    const auto radii = default_radii(seg);
    const auto rep = tangent_test(seg, Point2T<float>(0.5f, 0.0f), 1.0f, default_eta_grid<float>(), radii, 0.05f);
    CHECK(rep.has_tangent);
    CHECK(std::abs(density(seg, Point2T<float>(0.5f, 0.0f), 1.0f, radii).upper - 1.0f) < 0.2f);
}
