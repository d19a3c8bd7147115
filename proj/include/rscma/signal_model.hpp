#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rscma/rng.hpp"
#include "rscma/types.hpp"

namespace rscma {

/// Tap layout of the random sparse channel generator.
///
/// `paper` draws five taps in the windows [1,10], [20,30], [40,50], [70,80]
/// and [90,100] (1-based, for length 100) with the amplitude ranges of the
/// reference MATLAB listing. `desk` keeps only the first three of those taps
/// (precursor, dominant, strongest postcursor) with their windows stretched
/// over the whole channel, for short test channels.
enum class ChannelProfile { paper, desk };

struct SparseChannel {
    ComplexVecd taps;
    std::vector<std::size_t> support;  // 0-based, ascending
};

struct Constellation {
    ComplexVecd symbols;
    std::string name;
};

struct ObservationStream {
    ComplexVecd x;  // channel output
    ComplexVecd s;  // transmitted symbols, diagnostics only
    double snr_db = 0.0;
};

/// 1-based inclusive index window.
struct TapWindow {
    std::int64_t first;
    std::int64_t last;
};

/// Windows used by `profile` for a channel of `length` taps. Windows of the
/// reference layout are rescaled proportionally and rounded to the nearest
/// index.
std::vector<TapWindow> channel_windows(ChannelProfile profile, std::size_t length);

/// Draw a sparse channel from `rng`, consuming draws in the order of the
/// reference listing: all window indices first, then the amplitudes tap by
/// tap. The result is normalized to unit Euclidean norm.
SparseChannel draw_sparse_channel(Rng& rng, std::size_t length = 100,
                                  ChannelProfile profile = ChannelProfile::paper);

/// Seeded convenience wrapper around draw_sparse_channel.
SparseChannel generate_sparse_channel(std::uint64_t seed, std::size_t length = 100,
                                      ChannelProfile profile = ChannelProfile::paper);

/// Build a channel from explicit taps; support is every tap with nonzero modulus.
SparseChannel make_channel(const ComplexVecd& taps);

/// Two-ring 8-APSK: 4 inner symbols at odd multiples of 45 degrees, 4 outer
/// symbols on the axes, outer/inner radius = ring_ratio, unit mean power.
Constellation apsk8_constellation(double ring_ratio = 2.0);

/// Unit-modulus QPSK at odd multiples of 45 degrees.
Constellation qpsk_constellation();

/// Godard dispersion constant E|s|^4 / E|s|^2 over equiprobable symbols.
double dispersion_constant(const Constellation& c);

/// x_k = sum_j h_j s_{k-j} + v_k with circular Gaussian v_k whose variance is
/// (mean symbol power) / 10^(snr_db/10). snr_db = +inf disables the noise.
ObservationStream transmit(const SparseChannel& ch, const Constellation& c,
                           std::size_t n_symbols, double snr_db, std::uint64_t seed);

/// Hermitian Toeplitz n x n correlation matrix of the channel output for
/// white unit-power input: entry (i, j) = r(j - i), r(m) = sum_j h_j conj(h_{j+m}).
Eigen::MatrixXcd channel_correlation_matrix(const SparseChannel& ch, std::size_t n);

/// lambda_max / lambda_min of channel_correlation_matrix(ch, n); +inf when the
/// matrix is numerically singular.
double eigenvalue_spread(const SparseChannel& ch, std::size_t n);

inline constexpr double kInfiniteSpread = std::numeric_limits<double>::infinity();

/// JSON dump: {"length": L, "support": [...], "taps": [{"re": .., "im": ..}, ...]}.
/// Numbers are written in shortest round-trip form, so load(dump(ch)) is
/// bit-exact.
std::string channel_to_json(const SparseChannel& ch);
SparseChannel channel_from_json(const std::string& text);

std::string to_string(ChannelProfile profile);
ChannelProfile channel_profile_from_string(const std::string& name);

}  // namespace rscma
