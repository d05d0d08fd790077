#ifndef BLAB_QUADRATURE_HPP
#define BLAB_QUADRATURE_HPP

#include <algorithm>
#include <array>
#include <cmath>

namespace blab {

namespace detail {

// 7-point Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr std::array<double, 7> kGaussNodes = {
    -0.9491079123427585, -0.7415311855993945, -0.4058451513773972, 0.0,
    0.4058451513773972,  0.7415311855993945,  0.9491079123427585};
inline constexpr std::array<double, 7> kGaussWeights = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694,
    0.3818300505051189, 0.2797053914892767, 0.1294849661688697};

template <typename Scalar, typename F>
Scalar gauss7(const F& f, Scalar a, Scalar b) {
    const Scalar mid = (a + b) / 2;
    const Scalar half = (b - a) / 2;
    Scalar sum = 0;
    for (std::size_t i = 0; i < kGaussNodes.size(); ++i)
        sum += Scalar(kGaussWeights[i]) * f(mid + half * Scalar(kGaussNodes[i]));
    return sum * half;
}

template <typename Scalar, typename F>
Scalar adaptive_gauss(const F& f, Scalar a, Scalar b, Scalar whole, Scalar abs_tol, int depth) {
    const Scalar mid = (a + b) / 2;
    const Scalar left = gauss7(f, a, mid);
    const Scalar right = gauss7(f, mid, b);
    const Scalar refined = left + right;
    if (depth <= 0 || std::abs(refined - whole) <= abs_tol) return refined;
    return adaptive_gauss(f, a, mid, left, abs_tol / 2, depth - 1) +
           adaptive_gauss(f, mid, b, right, abs_tol / 2, depth - 1);
}

}  // namespace detail

/// Adaptive 7-point Gauss-Legendre quadrature of f over [a, b] with bisection
/// until two consecutive levels agree to rel_tol * |estimate|.
template <typename Scalar, typename F>
Scalar integrate(const F& f, Scalar a, Scalar b, Scalar rel_tol = Scalar(1e-13)) {
    const Scalar whole = detail::gauss7(f, a, b);
    const Scalar tol = rel_tol * std::max(std::abs(whole), Scalar(1e-300));
    return detail::adaptive_gauss(f, a, b, whole, tol, 40);
}

}  // namespace blab

#endif  // BLAB_QUADRATURE_HPP
