#include <cmath>
#include <complex>
#include <random>

#include <doctest.h>

#include "rscma/equalizer.hpp"

using namespace rscma;
using cd = std::complex<double>;

namespace {

ComplexVecd random_vec(std::mt19937_64& gen, Eigen::Index n, double scale = 1.0) {
    std::normal_distribution<double> nd(0.0, scale);
    ComplexVecd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = {nd(gen), nd(gen)};
    return v;
}

// Loop-by-loop restatement of the update, independent of the Eigen expressions.
ComplexVecd reference_rscma_step(const ComplexVecd& w, const ComplexVecd& x, double R, double mu,
                                 double p, double eps) {
    const Eigen::Index n = w.size();
    cd y = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) y += std::conj(w(i)) * x(i);
    const double e = std::norm(y) - R;
    ComplexVecd g(n), b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        g(i) = e * x(i) * std::conj(y);
        const double m = std::abs(w(i));
        b(i) = m == 0.0 ? cd(0.0) : 0.5 * p * w(i) / std::pow(std::max(m, eps), 2.0 - p);
    }
    cd bg = 0.0;
    double bb = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        bg += std::conj(b(i)) * g(i);
        bb += std::norm(b(i));
    }
    const double lambda = bb == 0.0 ? 0.0 : std::abs(bg) / bb;
    ComplexVecd out(n);
    for (Eigen::Index i = 0; i < n; ++i) out(i) = w(i) - mu * (g(i) - lambda * b(i));
    return out;
}

}  // namespace

TEST_CASE("constant-modulus gradient") {
    ComplexVecd w(2), x(2);
    w << 1.0, 0.0;
    x << 2.0, 0.0;
    const ComplexVecd g = cm_gradient(w, x, 1.0);
    CHECK(g(0) == cd(12.0, 0.0));
    CHECK(g(1) == cd(0.0, 0.0));
    CHECK_THROWS_AS(cm_gradient(w, ComplexVecd::Zero(3), 1.0), DimensionError);
    CHECK_THROWS_AS(cm_gradient(w, x, 0.0), DomainError);
}

TEST_CASE("l_p subgradient") {
    ComplexVecd w(3);
    w << 1.0, 4.0, 0.0;
    const ComplexVecd b = lp_subgradient(w, 0.5, 1e-8);
    CHECK(b(0).real() == doctest::Approx(0.25));
    CHECK(b(1).real() == doctest::Approx(0.125));
    CHECK(b(2) == cd(0.0, 0.0));
    CHECK_THROWS_AS(lp_subgradient(w, 1.0, 1e-8), DomainError);

    // The guard caps the magnitude of tiny taps.
    ComplexVecd tiny(1);
    tiny << 1e-12;
    CHECK(std::abs(lp_subgradient(tiny, 0.5, 1e-4)(0)) == doctest::Approx(0.25 * 1e-12 / 1e-6));
}

TEST_CASE("projection coefficient geometry") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);
    for (int t = 0; t < 500; ++t) {
        const ComplexVecd g = random_vec(gen, 16), b = random_vec(gen, 16);
        const double lambda = hermitian_projection_coefficient(g, b);
        CHECK(lambda >= 0.0);
        CHECK(lambda * b.norm() <= g.norm() * (1 + 1e-12));
        const ComplexVecd g_rot = std::polar(1.0, phase(gen)) * g;
        CHECK(hermitian_projection_coefficient(g_rot, b) == doctest::Approx(lambda).epsilon(1e-12));
    }
    CHECK(hermitian_projection_coefficient(ComplexVecd::Ones(4), ComplexVecd::Zero(4)) == 0.0);
    CHECK(real_projection_coefficient(ComplexVecd::Ones(4), ComplexVecd::Zero(4)) == 0.0);

    // Real vectors with b^T g >= 0: g - lambda b is orthogonal to b.
    ComplexVecd g(3), b(3);
    g << 1.0, 2.0, -0.5;
    b << 0.3, 0.1, 0.2;
    const double lambda = hermitian_projection_coefficient(g, b);
    CHECK(std::abs(b.dot(ComplexVecd(g - lambda * b))) <= 1e-15);
}

TEST_CASE("init_equalizer layout") {
    const ComplexVecd w = init_equalizer(120);
    CHECK(w.size() == 120);
    CHECK(w(60) == cd(1.0, 1.0));
    CHECK(w(0) == cd(1.0 / 120, 1.0 / 120));
    CHECK(init_equalizer(5)(2) == cd(1.0, 1.0));
    CHECK_THROWS_AS(init_equalizer(0), DimensionError);
}

TEST_CASE("rscma step matches a loop-by-loop restatement") {
    std::mt19937_64 gen(5);
    for (int t = 0; t < 50; ++t) {
        EqualizerState<double> s;
        s.w = random_vec(gen, 12);
        s.w(3) = 0.0;
        s.mu = 1e-2;
        const ComplexVecd x = random_vec(gen, 12);
        const ComplexVecd expected = reference_rscma_step(s.w, x, 1.36, s.mu, s.p, s.eps_guard);
        const auto d = step_rscma(s, x, 1.36);
        CHECK((s.w - expected).norm() <= 1e-12 * expected.norm());
        CHECK(s.iteration == 1);
        CHECK(d.lambda >= 0.0);
    }
}

TEST_CASE("baseline steps") {
    std::mt19937_64 gen(9);
    const ComplexVecd w0 = random_vec(gen, 8), x = random_vec(gen, 8);
    const ComplexVecd g = cm_gradient(w0, x, 1.0);

    EqualizerState<double> cma;
    cma.w = w0;
    cma.mu = 1e-2;
    step_cma(cma, x, 1.0);
    CHECK((cma.w - (w0 - 1e-2 * g)).norm() <= 1e-14);

    EqualizerState<double> scma = cma;
    scma.w = w0;
    step_scma_p(scma, x, 1.0, 0.0);
    CHECK(scma.w == cma.w);

    EqualizerState<double> ang;
    ang.w = w0;
    ang.mu = 1e-2;
    ang.eps_prop = 1e-3;
    step_ang_cma(ang, x, 1.0);
    for (Eigen::Index i = 0; i < 8; ++i) {
        const cd expected = w0(i) - 1e-2 * (std::abs(w0(i)) + 1e-3) * g(i);
        CHECK(std::abs(ang.w(i) - expected) <= 1e-14 * std::abs(expected));
    }
}

TEST_CASE("non-finite update is rejected and leaves the state untouched") {
    EqualizerState<double> s;
    s.w = ComplexVecd::Constant(4, cd(1e200, 0.0));
    s.mu = 1.0;
    const ComplexVecd before = s.w;
    CHECK_THROWS_AS(step_cma(s, ComplexVecd::Constant(4, cd(1e200, 0.0)), 1.0), DivergenceError);
    CHECK(s.w == before);
    CHECK(s.iteration == 0);

    s.p = 1.5;
    CHECK_THROWS_AS(step_rscma(s, ComplexVecd::Ones(4), 1.0), DomainError);
}

TEST_CASE("single-precision instantiation") {
    EqualizerState<float> s;
    s.w = init_equalizer<float>(8);
    const ComplexVec<float> x = ComplexVec<float>::Ones(8);
    step_rscma(s, x, 1.36f);
    CHECK(s.w.allFinite());
    CHECK(lp_norm_p(s.w, 0.5f) > 0.0f);
}
