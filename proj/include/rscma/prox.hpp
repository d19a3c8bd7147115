#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rscma/types.hpp"

namespace rscma {

// Closed-form minimizers of (h - w)^2 + lambda |h|^p for p = 1/2 and p = 2/3.
//
// The l_1/2 operator reduces the stationarity condition to the depressed cubic
// z^3 - |w| z + lambda/4 = 0 (|h| = z^2), which has three real roots above the
// threshold and is solved with the trigonometric (triangle) method. The l_2/3
// operator reduces to the quartic z^4 - |w| z + lambda/3 = 0 (|h| = z^3); a
// Ferrari resolvent t^3 - (lambda/3) t - |w|^2/8 = 0 has a single real root,
// given in closed form by the hyperbolic (Holmes) formula.

enum class ProxMode { half, two_thirds };

struct ProxConfig {
    ProxMode mode = ProxMode::half;
    double lambda_r = 0.0;
    double lambda_i = 0.0;
};

/// Stationarity residuals above this trigger Newton polishing.
inline constexpr double kProxResidualTol = 1e-9;
inline constexpr int kProxMaxNewton = 3;

/// Dead-zone threshold below which 0 is the minimizer:
/// tau(p, lambda) = ((2-p)/2) (1-p)^((p-1)/(2-p)) lambda^(1/(2-p)).
template <typename Real>
Real tau_threshold(Real p, Real lambda) {
    if (!(p > Real(0) && p < Real(1))) throw DomainError("tau_threshold: p must lie in (0, 1)");
    if (!(lambda >= Real(0))) throw DomainError("tau_threshold: lambda must be >= 0");
    if (lambda == Real(0)) return Real(0);
    const Real two_minus_p = Real(2) - p;
    return (two_minus_p / Real(2)) * std::pow(Real(1) - p, (p - Real(1)) / two_minus_p) *
           std::pow(lambda, Real(1) / two_minus_p);
}

/// Cardan discriminant of z^3 + c z + d: -4c^3 - 27d^2.
template <typename Real>
constexpr Real cardan_discriminant(Real c, Real d) {
    return Real(-4) * c * c * c - Real(27) * d * d;
}

/// Largest root of y^3 - 3y - 2q = 0 for |q| <= 1:
/// y = 2 cos(pi/3 - C/3) with cos C = -q.
template <typename Real>
Real solve_depressed_cubic_trig(Real q) {
    if (!(std::abs(q) <= Real(1))) {
        throw DomainError("solve_depressed_cubic_trig: |q| must be <= 1, got " + std::to_string(q));
    }
    const Real pi = std::numbers::pi_v<Real>;
    const Real angle_c = std::acos(-q);
    Real y = Real(2) * std::cos(pi / Real(3) - angle_c / Real(3));
    for (int it = 0; it < kProxMaxNewton; ++it) {
        const Real f = y * y * y - Real(3) * y - Real(2) * q;
        const Real df = Real(3) * y * y - Real(3);
        if (std::abs(f) <= Real(kProxResidualTol) || df == Real(0)) break;
        y -= f / df;
    }
    return y;
}

namespace detail {

template <typename Real>
Real sign_of(Real w) {
    return w < Real(0) ? Real(-1) : Real(1);
}

}  // namespace detail

/// h - w + (lambda/4) sign(h) / sqrt|h|, zero at a nonzero l_1/2 minimizer.
template <typename Real>
Real stationarity_half(Real h, Real w, Real lambda) {
    return h - w + (lambda / Real(4)) * detail::sign_of(h) / std::sqrt(std::abs(h));
}

/// h - w + (lambda/3) sign(h) |h|^(-1/3), zero at a nonzero l_2/3 minimizer.
template <typename Real>
Real stationarity_two_thirds(Real h, Real w, Real lambda) {
    return h - w + (lambda / Real(3)) * detail::sign_of(h) / std::cbrt(std::abs(h));
}

/// argmin_h (h - w)^2 + lambda |h|^(1/2).
template <typename Real>
Real prox_half(Real w, Real lambda) {
    if (!(lambda >= Real(0))) throw DomainError("prox_half: lambda must be >= 0");
    if (lambda == Real(0)) return w;

    const Real a = std::abs(w);
    const Real threshold = std::cbrt(Real(54)) / Real(4) * std::pow(lambda, Real(2) / Real(3));
    if (!(a > threshold)) return Real(0);

    const Real pi = std::numbers::pi_v<Real>;
    const Real phi = std::acos(Real(3) * std::sqrt(Real(3)) * lambda / Real(8) *
                               std::pow(a, Real(-1.5)));
    Real h = Real(2) / Real(3) * a *
             (Real(1) + std::cos(Real(2) * pi / Real(3) - Real(2) / Real(3) * phi));

    // Newton on h - a + (lambda/4) h^(-1/2) = 0, h > 0.
    for (int it = 0; it < kProxMaxNewton; ++it) {
        const Real f = stationarity_half(h, a, lambda);
        if (std::abs(f) <= Real(kProxResidualTol)) break;
        const Real df = Real(1) - lambda / Real(8) * std::pow(h, Real(-1.5));
        if (!(df > Real(0))) break;
        h -= f / df;
    }
    return detail::sign_of(w) * h;
}

/// Real root of t^3 - (lambda/3) t - |w|^2/8 = 0:
/// t = (2/3) sqrt(lambda) cosh((1/3) acosh((27/16) |w|^2 lambda^(-3/2))).
/// Requires |w| > (2/3)(3 lambda^3)^(1/4), where the cubic has one real root.
template <typename Real>
Real holmes_root(Real lambda, Real w_abs) {
    if (!(lambda > Real(0))) throw DomainError("holmes_root: lambda must be > 0");
    const Real threshold = Real(2) / Real(3) * std::pow(Real(3) * lambda * lambda * lambda, Real(0.25));
    if (!(w_abs > threshold)) {
        throw DomainError("holmes_root: |w| must exceed (2/3)(3 lambda^3)^(1/4)");
    }
    const Real arg = Real(27) / Real(16) * w_abs * w_abs * std::pow(lambda, Real(-1.5));
    Real t = Real(2) / Real(3) * std::sqrt(lambda) * std::cosh(std::acosh(arg) / Real(3));

    const Real d = w_abs * w_abs / Real(8);
    for (int it = 0; it < kProxMaxNewton; ++it) {
        const Real f = t * t * t - lambda / Real(3) * t - d;
        if (std::abs(f) <= Real(kProxResidualTol)) break;
        const Real df = Real(3) * t * t - lambda / Real(3);
        if (!(df > Real(0))) break;
        t -= f / df;
    }
    return t;
}

/// argmin_h (h - w)^2 + lambda |h|^(2/3).
template <typename Real>
Real prox_two_thirds(Real w, Real lambda) {
    if (!(lambda >= Real(0))) throw DomainError("prox_two_thirds: lambda must be >= 0");
    if (lambda == Real(0)) return w;

    const Real a = std::abs(w);
    const Real threshold = Real(2) / Real(3) * std::pow(Real(3) * lambda * lambda * lambda, Real(0.25));
    if (!(a > threshold)) return Real(0);

    const Real t = holmes_root(lambda, a);
    const Real radicand = a / std::sqrt(Real(8) * t) - t / Real(2);
    if (radicand < Real(0)) {
        throw std::logic_error("prox_two_thirds: negative radicand for |w| = " + std::to_string(a));
    }
    const Real z = std::sqrt(t / Real(2)) + std::sqrt(radicand);
    Real h = z * z * z;

    // Newton on h - a + (lambda/3) h^(-1/3) = 0, h > 0.
    for (int it = 0; it < kProxMaxNewton; ++it) {
        const Real f = stationarity_two_thirds(h, a, lambda);
        if (std::abs(f) <= Real(kProxResidualTol)) break;
        const Real df = Real(1) - lambda / Real(9) * std::pow(h, Real(-4) / Real(3));
        if (!(df > Real(0))) break;
        h -= f / df;
    }
    return detail::sign_of(w) * h;
}

template <typename Real>
Real prox_scalar(ProxMode mode, Real w, Real lambda) {
    return mode == ProxMode::half ? prox_half(w, lambda) : prox_two_thirds(w, lambda);
}

template <typename Real>
Real prox_exponent(ProxMode mode) {
    return mode == ProxMode::half ? Real(1) / Real(2) : Real(2) / Real(3);
}

/// Apply the scalar prox separately to real parts (lambda_r) and imaginary
/// parts (lambda_i) and recombine.
template <typename Derived>
auto regularize_complex_vector(const Eigen::MatrixBase<Derived>& w, const ProxConfig& cfg) {
    using Real = typename Derived::RealScalar;
    ComplexVec<Real> h(w.size());
    const auto lr = static_cast<Real>(cfg.lambda_r);
    const auto li = static_cast<Real>(cfg.lambda_i);
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        h(i) = {prox_scalar(cfg.mode, std::real(w(i)), lr),
                prox_scalar(cfg.mode, std::imag(w(i)), li)};
    }
    return h;
}

inline std::string to_string(ProxMode mode) {
    return mode == ProxMode::half ? "half" : "two_thirds";
}

inline ProxMode prox_mode_from_string(const std::string& name) {
    if (name == "half") return ProxMode::half;
    if (name == "two_thirds") return ProxMode::two_thirds;
    throw DomainError("unknown prox mode '" + name + "' (expected half or two_thirds)");
}

}  // namespace rscma
