#include <cmath>
#include <random>

#include <doctest.h>

#include "rscma/prox.hpp"
#include "support/oracles.hpp"

using namespace rscma;

TEST_CASE("scalar prox matches frozen minimizer values") {
    // Values from an independent bounded scalar minimizer of (h - w)^2 + lambda |h|^p.
    CHECK(prox_half(2.0, 1.0) == doctest::Approx(1.814402018).epsilon(1e-9));
    CHECK(prox_two_thirds(2.0, 1.0) == doctest::Approx(1.721894283).epsilon(1e-9));
    CHECK(prox_half(0.5, 1.0) == 0.0);
    CHECK(prox_half(-2.0, 1.0) == doctest::Approx(-1.814402018).epsilon(1e-9));
}

TEST_CASE("dead-zone thresholds") {
    CHECK(tau_threshold(0.5, 1.0) == doctest::Approx(0.944940787).epsilon(1e-9));
    CHECK(tau_threshold(2.0 / 3.0, 1.0) == doctest::Approx(0.877382675).epsilon(1e-9));
    CHECK(tau_threshold(0.5, 0.0) == 0.0);
    CHECK_THROWS_AS(tau_threshold(1.0, 1.0), DomainError);
    CHECK_THROWS_AS(tau_threshold(0.5, -1.0), DomainError);
}

TEST_CASE("boundary and degenerate inputs") {
    for (double lambda : {1e-3, 0.1, 1.0, 7.0}) {
        const double t_half = tau_threshold(0.5, lambda);
        const double t_23 = tau_threshold(2.0 / 3.0, lambda);
        CHECK(prox_half(t_half * (1 - 1e-12), lambda) == 0.0);
        CHECK(prox_two_thirds(t_23 * (1 - 1e-12), lambda) == 0.0);
    }
    CHECK(prox_half(0.0, 1.0) == 0.0);
    CHECK(prox_half(1.234, 0.0) == 1.234);
    CHECK(prox_two_thirds(-1.234, 0.0) == -1.234);
    CHECK_THROWS_AS(prox_half(1.0, -0.1), DomainError);
    CHECK_THROWS_AS(prox_two_thirds(1.0, -0.1), DomainError);
}

TEST_CASE("prox shrinks, is odd and jumps at the threshold") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> wd(-5.0, 5.0), ld(1e-3, 3.0);
    for (int i = 0; i < 2000; ++i) {
        const double w = wd(gen), lambda = ld(gen);
        for (ProxMode mode : {ProxMode::half, ProxMode::two_thirds}) {
            const double h = prox_scalar(mode, w, lambda);
            CHECK(std::abs(h) <= std::abs(w));
            CHECK(h * w >= 0.0);
            CHECK(prox_scalar(mode, -w, lambda) == -h);
        }
    }
    // Just above tau the minimizer jumps away from zero (to 2/3 tau for l_1/2).
    for (double lambda : {0.01, 1.0, 5.0}) {
        const double t = tau_threshold(0.5, lambda);
        CHECK(prox_half(t * (1 + 1e-9), lambda) == doctest::Approx(2.0 / 3.0 * t).epsilon(1e-4));
        const double t23 = tau_threshold(2.0 / 3.0, lambda);
        CHECK(prox_two_thirds(t23 * (1 + 1e-9), lambda) > 0.5 * t23);
    }
}

TEST_CASE("prox agrees with a brute-force minimizer") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> wd(-4.0, 4.0);
    std::uniform_real_distribution<double> lexp(-3.0, 0.5);
    for (int i = 0; i < 100; ++i) {
        const double w = wd(gen), lambda = std::pow(10.0, lexp(gen));
        CHECK(prox_half(w, lambda) == doctest::Approx(oracle::brute_force_prox(w, lambda, 0.5)).epsilon(1e-7));
        CHECK(prox_two_thirds(w, lambda) ==
              doctest::Approx(oracle::brute_force_prox(w, lambda, 2.0 / 3.0)).epsilon(1e-7));
    }
}

TEST_CASE("stationarity residual at nonzero prox outputs") {
    for (double w : {0.97, 1.5, 3.0, -2.2, 10.0}) {
        const double h = prox_half(w, 1.0);
        if (h != 0.0) CHECK(std::abs(stationarity_half(h, w, 1.0)) <= 1e-9);
        const double g = prox_two_thirds(w, 1.0);
        if (g != 0.0) CHECK(std::abs(stationarity_two_thirds(g, w, 1.0)) <= 1e-9);
    }
}

TEST_CASE("cubic solvers") {
    CHECK(cardan_discriminant(-1.0, 0.25) == doctest::Approx(2.3125));
    static_assert(cardan_discriminant(0.0, 0.0) == 0.0);
    CHECK(holmes_root(1.0, 2.0) == doctest::Approx(0.93248).epsilon(1e-5));
    const double t = holmes_root(1.0, 2.0);
    CHECK(std::abs(t * t * t - t / 3.0 - 0.5) <= 1e-12);
    CHECK_THROWS_AS(holmes_root(1.0, 0.5), DomainError);
    CHECK_THROWS_AS(holmes_root(0.0, 1.0), DomainError);

    for (double q : {-1.0, -0.5, 0.0, 0.3, 1.0}) {
        const double y = solve_depressed_cubic_trig(q);
        CHECK(std::abs(y * y * y - 3 * y - 2 * q) <= 1e-12);
    }
    CHECK_THROWS_AS(solve_depressed_cubic_trig(1.5), DomainError);
}

TEST_CASE("complex vector regularization acts on real and imaginary parts separately") {
    ComplexVecd w(3);
    w << std::complex<double>(2.0, 0.1), std::complex<double>(-0.2, -3.0), std::complex<double>(0.0, 0.0);
    const ComplexVecd h = regularize_complex_vector(w, ProxConfig{ProxMode::half, 1.0, 0.5});
    CHECK(h(0).real() == prox_half(2.0, 1.0));
    CHECK(h(0).imag() == 0.0);
    CHECK(h(1).real() == 0.0);
    CHECK(h(1).imag() == prox_half(-3.0, 0.5));
    CHECK(h(2) == std::complex<double>(0.0, 0.0));

    const ComplexVec<float> wf = w.cast<std::complex<float>>();
    const ComplexVec<float> hf = regularize_complex_vector(wf, ProxConfig{ProxMode::two_thirds, 1.0, 1.0});
    CHECK(hf(0).real() == doctest::Approx(prox_two_thirds(2.0, 1.0)).epsilon(1e-5));
}

TEST_CASE("prox mode names") {
    CHECK(prox_mode_from_string("half") == ProxMode::half);
    CHECK(to_string(ProxMode::two_thirds) == "two_thirds");
    CHECK_THROWS_AS(prox_mode_from_string("third"), DomainError);
}
