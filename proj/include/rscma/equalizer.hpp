#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>

#include "rscma/types.hpp"

namespace rscma {

// All gradients are Wirtinger derivatives with respect to conj(w); the
// equalizer output is y = w^H x.

/// How the l_p-constraint multiplier is formed from b^H g.
///   hermitian: |b^H g| / ||b||^2 (smallest angle between the complex lines
///              spanned by g and b; phase invariant, always >= 0)
///   real_part: Re(b^H g) / ||b||^2 (exact first-order conservation of
///              ||w||_p^p for complex taps)
enum class ProjectionRule { hermitian, real_part };

template <typename Real>
struct EqualizerState {
    ComplexVec<Real> w;
    Real mu = Real(1e-3);
    Real p = Real(0.5);          // fractional exponent of the l_p constraint
    Real eps_guard = Real(1e-8);  // floor on |w_i| in the l_p gradient
    Real eps_prop = Real(1e-3);   // proportionate floor (ANG-CMA)
    ProjectionRule projection = ProjectionRule::hermitian;
    std::uint64_t iteration = 0;
};

template <typename Real>
struct StepDiagnostics {
    std::complex<Real> y{};
    Real lambda = 0;
    Real g_norm = 0;
    Real b_norm = 0;
};

namespace detail {

template <typename A, typename B>
void check_same_size(const A& a, const B& b, const char* what) {
    if (a.size() != b.size()) {
        throw DimensionError(std::string(what) + ": length mismatch (" +
                             std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
}

template <typename Real>
void check_state(const EqualizerState<Real>& s) {
    if (!(s.mu >= Real(0))) throw DomainError("step size must be >= 0");
    if (!(s.p > Real(0) && s.p < Real(1))) throw DomainError("p must lie in (0, 1)");
}

// Commit w_next into the state unless it contains a non-finite value.
template <typename Real>
void commit(EqualizerState<Real>& s, ComplexVec<Real>&& w_next, const char* algo) {
    if (!w_next.allFinite()) {
        throw DivergenceError(std::string(algo) + " step produced non-finite taps", s.iteration);
    }
    s.w = std::move(w_next);
    ++s.iteration;
}

}  // namespace detail

/// Constant-modulus gradient (|y|^2 - R) x (x^H w) with y = w^H x.
template <typename DerivedW, typename DerivedX>
auto cm_gradient(const Eigen::MatrixBase<DerivedW>& w, const Eigen::MatrixBase<DerivedX>& x,
                 typename DerivedW::RealScalar R) {
    using Real = typename DerivedW::RealScalar;
    detail::check_same_size(w, x, "cm_gradient");
    if (!(R > Real(0))) throw DomainError("dispersion constant R must be > 0");
    const std::complex<Real> y = w.dot(x);
    const ComplexVec<Real> g = ((std::norm(y) - R) * std::conj(y)) * x;
    return g;
}

/// Gradient of ||w||_p^p with respect to conj(w):
/// b_i = (p/2) w_i / max(|w_i|, eps_guard)^(2-p), and exactly 0 where w_i = 0.
template <typename Derived>
auto lp_subgradient(const Eigen::MatrixBase<Derived>& w, typename Derived::RealScalar p,
                    typename Derived::RealScalar eps_guard) {
    using Real = typename Derived::RealScalar;
    if (!(p > Real(0) && p < Real(1))) throw DomainError("p must lie in (0, 1)");
    ComplexVec<Real> b(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        const Real mag = std::abs(w(i));
        if (mag == Real(0)) {
            b(i) = {};
            continue;
        }
        b(i) = (p / Real(2)) * w(i) / std::pow(std::max(mag, eps_guard), Real(2) - p);
    }
    return b;
}

/// |b^H g| / ||b||^2, the Hermitian-angle projection coefficient. Zero when b = 0.
template <typename DerivedG, typename DerivedB>
auto hermitian_projection_coefficient(const Eigen::MatrixBase<DerivedG>& g,
                                      const Eigen::MatrixBase<DerivedB>& b) {
    using Real = typename DerivedG::RealScalar;
    detail::check_same_size(g, b, "hermitian_projection_coefficient");
    const Real bb = b.squaredNorm();
    if (bb == Real(0)) return Real(0);
    return std::abs(b.dot(g)) / bb;
}

/// Re(b^H g) / ||b||^2. Zero when b = 0.
template <typename DerivedG, typename DerivedB>
auto real_projection_coefficient(const Eigen::MatrixBase<DerivedG>& g,
                                 const Eigen::MatrixBase<DerivedB>& b) {
    using Real = typename DerivedG::RealScalar;
    detail::check_same_size(g, b, "real_projection_coefficient");
    const Real bb = b.squaredNorm();
    if (bb == Real(0)) return Real(0);
    return std::real(b.dot(g)) / bb;
}

/// Initial taps: centre tap (index n/2) = 1+i, all others (1+i)/n.
template <typename Real = double>
ComplexVec<Real> init_equalizer(Eigen::Index n = 120) {
    if (n < 1) throw DimensionError("equalizer length must be >= 1");
    const std::complex<Real> one_i(1, 1);
    ComplexVec<Real> w = ComplexVec<Real>::Constant(n, one_i / Real(n));
    w(n / 2) = one_i;
    return w;
}

/// l_p-constrained sparse CMA step:
///   w' = w - mu (g - lambda b),  lambda = |b^H g| / ||b||^2.
template <typename Real, typename DerivedX>
StepDiagnostics<Real> step_rscma(EqualizerState<Real>& s, const Eigen::MatrixBase<DerivedX>& x,
                                 Real R) {
    detail::check_state(s);
    const ComplexVec<Real> g = cm_gradient(s.w, x, R);
    const ComplexVec<Real> b = lp_subgradient(s.w, s.p, s.eps_guard);
    const Real lambda = s.projection == ProjectionRule::hermitian
                            ? hermitian_projection_coefficient(g, b)
                            : real_projection_coefficient(g, b);

    StepDiagnostics<Real> d{s.w.dot(x), lambda, g.norm(), b.norm()};
    detail::commit(s, ComplexVec<Real>(s.w - s.mu * (g - lambda * b)), "rscma");
    return d;
}

/// Plain CMA: w' = w - mu g.
template <typename Real, typename DerivedX>
StepDiagnostics<Real> step_cma(EqualizerState<Real>& s, const Eigen::MatrixBase<DerivedX>& x,
                               Real R) {
    if (!(s.mu >= Real(0))) throw DomainError("step size must be >= 0");
    const ComplexVec<Real> g = cm_gradient(s.w, x, R);
    StepDiagnostics<Real> d{s.w.dot(x), Real(0), g.norm(), Real(0)};
    detail::commit(s, ComplexVec<Real>(s.w - s.mu * g), "cma");
    return d;
}

/// Proportionate CMA: w'_i = w_i - mu (|w_i| + eps_prop) g_i.
template <typename Real, typename DerivedX>
StepDiagnostics<Real> step_ang_cma(EqualizerState<Real>& s, const Eigen::MatrixBase<DerivedX>& x,
                                   Real R) {
    if (!(s.mu >= Real(0))) throw DomainError("step size must be >= 0");
    if (!(s.eps_prop >= Real(0))) throw DomainError("proportionate floor must be >= 0");
    const ComplexVec<Real> g = cm_gradient(s.w, x, R);
    const RealVec<Real> gain = s.w.cwiseAbs().array() + s.eps_prop;
    StepDiagnostics<Real> d{s.w.dot(x), Real(0), g.norm(), Real(0)};
    detail::commit(s, ComplexVec<Real>(s.w - s.mu * (gain.array() * g.array()).matrix()),
                   "ang_cma");
    return d;
}

/// Zero-attracting l_p-penalized CMA: w' = w - mu g - rho b.
template <typename Real, typename DerivedX>
StepDiagnostics<Real> step_scma_p(EqualizerState<Real>& s, const Eigen::MatrixBase<DerivedX>& x,
                                  Real R, Real rho) {
    detail::check_state(s);
    if (!(rho >= Real(0))) throw DomainError("rho must be >= 0");
    const ComplexVec<Real> g = cm_gradient(s.w, x, R);
    const ComplexVec<Real> b = lp_subgradient(s.w, s.p, s.eps_guard);
    StepDiagnostics<Real> d{s.w.dot(x), Real(0), g.norm(), b.norm()};
    detail::commit(s, ComplexVec<Real>(s.w - s.mu * g - rho * b), "scma_p");
    return d;
}

/// ||w||_p^p.
template <typename Derived>
auto lp_norm_p(const Eigen::MatrixBase<Derived>& w, typename Derived::RealScalar p) {
    return w.cwiseAbs().array().pow(p).sum();
}

}  // namespace rscma
