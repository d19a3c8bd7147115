#include "rscma/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <json.hpp>

namespace rscma {

namespace {

struct TapRecipe {
    TapWindow window;  // reference window, 1-based
    double re_scale;   // 0 means "real part fixed at re_offset"
    double re_offset;
    double im_scale;
};

// Reference listing, length 100:
//   h(i0)=0.1*(2*rand-1)+0.1*(2*rand-1)*1i;  i0 in [1,10]
//   h(i1)=1+(2*rand-1)*1i;                   i1 in [20,30]
//   h(i2)=0.5*(2*rand-1)+0.2*(2*rand-1)*1i;  i2 in [40,50]
//   h(i3)=0.2*(2*rand-1)+0.2*(2*rand-1)*1i;  i3 in [70,80]
//   h(i4)=0.1*(2*rand-1)+0.1*(2*rand-1)*1i;  i4 in [90,100]
constexpr TapRecipe kReferenceTaps[] = {
    {{1, 10}, 0.1, 0.0, 0.1},
    {{20, 30}, 0.0, 1.0, 1.0},
    {{40, 50}, 0.5, 0.0, 0.2},
    {{70, 80}, 0.2, 0.0, 0.2},
    {{90, 100}, 0.1, 0.0, 0.1},
};

struct ProfileLayout {
    std::size_t n_taps;
    double reference_length;
};

ProfileLayout layout(ChannelProfile profile) {
    switch (profile) {
        case ChannelProfile::paper: return {5, 100.0};
        case ChannelProfile::desk: return {3, 50.0};
    }
    throw ProfileError("unknown channel profile");
}

}  // namespace

std::vector<TapWindow> channel_windows(ChannelProfile profile, std::size_t length) {
    if (length < 10) {
        throw ProfileError("sparse channel length must be at least 10, got " +
                           std::to_string(length));
    }
    const auto [n_taps, ref_len] = layout(profile);
    const double scale = static_cast<double>(length) / ref_len;
    const auto len = static_cast<std::int64_t>(length);

    std::vector<TapWindow> out;
    out.reserve(n_taps);
    for (std::size_t t = 0; t < n_taps; ++t) {
        const TapWindow ref = kReferenceTaps[t].window;
        std::int64_t first = std::llround(static_cast<double>(ref.first) * scale);
        std::int64_t last = std::llround(static_cast<double>(ref.last) * scale);
        first = std::clamp<std::int64_t>(first, 1, len);
        last = std::clamp<std::int64_t>(last, first, len);
        out.push_back({first, last});
    }
    return out;
}

SparseChannel draw_sparse_channel(Rng& rng, std::size_t length, ChannelProfile profile) {
    const auto windows = channel_windows(profile, length);

    std::vector<std::int64_t> index;
    index.reserve(windows.size());
    for (const auto& w : windows) index.push_back(rng.randi(w.first, w.last));

    ComplexVecd h = ComplexVecd::Zero(static_cast<Eigen::Index>(length));
    for (std::size_t t = 0; t < windows.size(); ++t) {
        const TapRecipe& r = kReferenceTaps[t];
        double re = r.re_offset;
        if (r.re_scale != 0.0) re = r.re_scale * (2.0 * rng.rand() - 1.0);
        const double im = r.im_scale * (2.0 * rng.rand() - 1.0);
        h(index[t] - 1) = {re, im};
    }
    h /= h.norm();
    return make_channel(h);
}

SparseChannel generate_sparse_channel(std::uint64_t seed, std::size_t length,
                                      ChannelProfile profile) {
    Rng rng(seed);
    return draw_sparse_channel(rng, length, profile);
}

SparseChannel make_channel(const ComplexVecd& taps) {
    SparseChannel ch{taps, {}};
    for (Eigen::Index i = 0; i < taps.size(); ++i) {
        if (std::abs(taps(i)) > 0.0) ch.support.push_back(static_cast<std::size_t>(i));
    }
    return ch;
}

Constellation apsk8_constellation(double ring_ratio) {
    if (!(ring_ratio > 1.0) || !std::isfinite(ring_ratio)) {
        throw ProfileError("APSK ring ratio must be finite and > 1");
    }
    // 4 r1^2 + 4 r2^2 = 8 with r2 = ratio * r1.
    const double r1 = std::sqrt(2.0 / (1.0 + ring_ratio * ring_ratio));
    const double r2 = ring_ratio * r1;
    constexpr double quarter = std::numbers::pi / 2.0;

    Constellation c{ComplexVecd(8), "apsk8"};
    for (int k = 0; k < 4; ++k) {
        c.symbols(k) = std::polar(r1, quarter * k + quarter / 2.0);
        c.symbols(4 + k) = std::polar(r2, quarter * k);
    }
    return c;
}

Constellation qpsk_constellation() {
    Constellation c{ComplexVecd(4), "qpsk"};
    constexpr double quarter = std::numbers::pi / 2.0;
    for (int k = 0; k < 4; ++k) c.symbols(k) = std::polar(1.0, quarter * k + quarter / 2.0);
    return c;
}

double dispersion_constant(const Constellation& c) {
    if (c.symbols.size() == 0) throw ProfileError("empty constellation");
    const Eigen::ArrayXd p2 = c.symbols.array().abs2();
    return (p2 * p2).sum() / p2.sum();
}

ObservationStream transmit(const SparseChannel& ch, const Constellation& c,
                           std::size_t n_symbols, double snr_db, std::uint64_t seed) {
    if (n_symbols < 1) throw ProfileError("n_symbols must be >= 1");
    if (c.symbols.size() == 0) throw ProfileError("empty constellation");

    const Rng root(seed);
    Rng symbol_rng = root.split(1);
    Rng noise_rng = root.split(2);

    const auto n = static_cast<Eigen::Index>(n_symbols);
    const auto m = c.symbols.size();

    ObservationStream out;
    out.snr_db = snr_db;
    out.s.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) out.s(k) = c.symbols(symbol_rng.randi(0, m - 1));

    out.x = ComplexVecd::Zero(n);
    const auto& h = ch.taps;
    for (const std::size_t j : ch.support) {
        const auto jj = static_cast<Eigen::Index>(j);
        if (jj >= n) continue;
        out.x.tail(n - jj) += h(jj) * out.s.head(n - jj);
    }

    if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
        throw ProfileError("snr_db must be a number or +inf");
    }
    if (std::isfinite(snr_db)) {
        const double power = c.symbols.squaredNorm() / static_cast<double>(m);
        const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0) / 2.0);
        for (Eigen::Index k = 0; k < n; ++k) {
            const double re = noise_rng.randn();
            const double im = noise_rng.randn();
            out.x(k) += sigma * std::complex<double>(re, im);
        }
    }
    return out;
}

Eigen::MatrixXcd channel_correlation_matrix(const SparseChannel& ch, std::size_t n) {
    if (n < 1) throw ProfileError("correlation size must be >= 1");
    const auto& h = ch.taps;
    const auto len = h.size();
    const auto dim = static_cast<Eigen::Index>(n);

    ComplexVecd r = ComplexVecd::Zero(dim);
    for (Eigen::Index lag = 0; lag < std::min(dim, len); ++lag) {
        // r(m) = sum_j h_j conj(h_{j+m})
        r(lag) = h.tail(len - lag).dot(h.head(len - lag));
    }

    Eigen::MatrixXcd corr(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = i; j < dim; ++j) {
            corr(i, j) = r(j - i);
            corr(j, i) = std::conj(r(j - i));
        }
    }
    return corr;
}

double eigenvalue_spread(const SparseChannel& ch, std::size_t n) {
    const Eigen::MatrixXcd corr = channel_correlation_matrix(ch, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(corr, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) return kInfiniteSpread;
    const double lo = solver.eigenvalues().minCoeff();
    const double hi = solver.eigenvalues().maxCoeff();
    if (!(hi > 0.0) || lo <= hi * 1e-13) return kInfiniteSpread;
    return hi / lo;
}

std::string channel_to_json(const SparseChannel& ch) {
    nlohmann::json taps = nlohmann::json::array();
    for (Eigen::Index i = 0; i < ch.taps.size(); ++i) {
        taps.push_back({{"re", ch.taps(i).real()}, {"im", ch.taps(i).imag()}});
    }
    nlohmann::json doc;
    doc["length"] = ch.taps.size();
    doc["support"] = ch.support;
    doc["taps"] = std::move(taps);
    return doc.dump(2) + "\n";
}

SparseChannel channel_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("channel JSON: ") + e.what());
    }
    try {
        const auto& taps = doc.at("taps");
        ComplexVecd h(static_cast<Eigen::Index>(taps.size()));
        for (std::size_t i = 0; i < taps.size(); ++i) {
            h(static_cast<Eigen::Index>(i)) = {taps[i].at("re").get<double>(),
                                              taps[i].at("im").get<double>()};
        }
        if (doc.contains("length") && doc["length"].get<std::size_t>() != taps.size()) {
            throw ConfigError("channel JSON: length does not match number of taps");
        }
        SparseChannel ch = make_channel(h);
        if (doc.contains("support") &&
            doc["support"].get<std::vector<std::size_t>>() != ch.support) {
            throw ConfigError("channel JSON: support list does not match nonzero taps");
        }
        return ch;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("channel JSON: ") + e.what());
    }
}

std::string to_string(ChannelProfile profile) {
    return profile == ChannelProfile::paper ? "paper" : "desk";
}

ChannelProfile channel_profile_from_string(const std::string& name) {
    if (name == "paper") return ChannelProfile::paper;
    if (name == "desk") return ChannelProfile::desk;
    throw ConfigError("unknown channel profile '" + name + "'");
}

}  // namespace rscma
