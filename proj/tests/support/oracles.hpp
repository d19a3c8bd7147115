#pragma once

// Independent reference implementations used to check the library: a
// brute-force 1-D minimizer for the scalar prox, a companion-matrix root
// counter for cubics, and a line-by-line transcription of the reference
// sparse-channel listing.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Eigenvalues>

#include "rscma/rng.hpp"
#include "rscma/types.hpp"

namespace oracle {

inline double prox_objective(double h, double w, double lambda, double p) {
    return (h - w) * (h - w) + lambda * std::pow(std::abs(h), p);
}

/// argmin_h (h - w)^2 + lambda |h|^p by dense grid search over [0, |w|]
/// (the minimizer shares the sign of w and never exceeds it in modulus)
/// followed by golden-section refinement around the best grid point.
inline double brute_force_prox(double w, double lambda, double p, int grid = 100000) {
    const double a = std::abs(w);
    if (a == 0.0) return 0.0;
    const auto f = [&](double h) { return prox_objective(h, a, lambda, p); };

    const double step = a / grid;
    int best = 0;
    double best_f = f(0.0);
    for (int i = 1; i <= grid; ++i) {
        const double v = f(i * step);
        if (v < best_f) {
            best_f = v;
            best = i;
        }
    }
    if (best == 0) return 0.0;

    double lo = (best - 1) * step;
    double hi = std::min(a, (best + 1) * step);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > 1e-13 * std::max(1.0, a)) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    const double h = 0.5 * (lo + hi);
    if (f(0.0) <= f(h)) return 0.0;
    return w < 0 ? -h : h;
}

/// Number of real roots of z^3 + c z + d from the eigenvalues of its
/// companion matrix.
inline int count_real_roots(double c, double d, double imag_tol = 1e-7) {
    Eigen::Matrix3d companion;
    companion << 0.0, 0.0, -d,
                 1.0, 0.0, -c,
                 0.0, 1.0, 0.0;
    const Eigen::EigenSolver<Eigen::Matrix3d> es(companion, false);
    int n = 0;
    for (int i = 0; i < 3; ++i) {
        if (std::abs(es.eigenvalues()(i).imag()) <= imag_tol) ++n;
    }
    return n;
}

/// Transcription of the reference listing (length 100, five taps):
///   h=zeros(1,100); i0=randi([1,10]); i1=randi([20,30]); i2=randi([40,50]);
///   i3=randi([70,80]); i4=randi([90,100]);
///   h(i0)=0.1*(2*rand-1)+0.1*(2*rand-1)*1i;  h(i1)=1+(2*rand-1)*1i;
///   h(i2)=0.5*(2*rand-1)+0.2*(2*rand-1)*1i;  h(i3)=0.2*(2*rand-1)+0.2*(2*rand-1)*1i;
///   h(i4)=0.1*(2*rand-1)+0.1*(2*rand-1)*1i;  h=h/norm(h);
inline rscma::ComplexVecd reference_channel(rscma::Rng& rng) {
    using cd = std::complex<double>;
    const cd I(0.0, 1.0);
    rscma::ComplexVecd h = rscma::ComplexVecd::Zero(100);
    const auto i0 = rng.randi(1, 10);
    const auto i1 = rng.randi(20, 30);
    const auto i2 = rng.randi(40, 50);
    const auto i3 = rng.randi(70, 80);
    const auto i4 = rng.randi(90, 100);
    const auto u = [&] { return 2.0 * rng.rand() - 1.0; };
    double re = 0.0;
    re = 0.1 * u(); h(i0 - 1) = re + 0.1 * u() * I;
    h(i1 - 1) = 1.0 + u() * I;
    re = 0.5 * u(); h(i2 - 1) = re + 0.2 * u() * I;
    re = 0.2 * u(); h(i3 - 1) = re + 0.2 * u() * I;
    re = 0.1 * u(); h(i4 - 1) = re + 0.1 * u() * I;
    return h / h.norm();
}

}  // namespace oracle
