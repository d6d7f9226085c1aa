#pragma once

#include "hif/core/waveform.hpp"

#include <complex>
#include <string>
#include <string_view>
#include <vector>

namespace hif::phasor {

/// Peak amplitude and sine phase: a(t) = amplitude * sin(k w0 t + phase).
struct Phasor {
    double amplitude = 0.0;
    double phase_deg = 0.0;  ///< (-180, 180]

    /// amplitude * exp(j phase).
    [[nodiscard]] std::complex<double> as_complex() const noexcept;
    [[nodiscard]] static Phasor from_complex(std::complex<double> z) noexcept;
};

/// Harmonic phasors k = 1..m of one channel over one analysis window.
///
/// Phases are referenced to the record time origin t = 0 rather than the
/// window start, so a stationary signal reports the same phases in every
/// window and a pure k-th harmonic delayed by dt shifts by -k w0 dt.
struct PhasorSet {
    double window_start = 0.0;  ///< s
    double f0 = 50.0;
    std::vector<Phasor> harmonics;  ///< index k - 1

    [[nodiscard]] int max_order() const noexcept { return static_cast<int>(harmonics.size()); }
    [[nodiscard]] bool has(int k) const noexcept { return k >= 1 && k <= max_order(); }
    /// Throws InvalidInput when k is not present.
    [[nodiscard]] const Phasor& at(int k) const;
};

struct DecompositionResult {
    std::string channel;
    WaveformRecord sinusoidal;    ///< fundamental reconstruction, one channel
    WaveformRecord distortional;  ///< original minus sinusoidal
    PhasorSet phasors;            ///< harmonics over all full cycles of the record
};

inline constexpr int kDefaultMaxOrder = 11;

/// One-cycle rectangular DFT starting at the sample nearest window_start.
/// Throws Range when the window leaves the record, Configuration when fs/f0
/// is not an integer, and InvalidInput when m exceeds the Nyquist limit.
[[nodiscard]] PhasorSet window_phasors(const WaveformRecord& record, std::string_view channel, double window_start,
                                       double f0, int m = kDefaultMaxOrder);

/// Splits a channel into its fundamental and the residual. The fundamental
/// is estimated over the longest whole number of cycles in the record.
[[nodiscard]] DecompositionResult decompose_waveform(const WaveformRecord& record, std::string_view channel,
                                                     double f0, int m = kDefaultMaxOrder);

/// sinusoidal + p * distortional.
[[nodiscard]] WaveformRecord recompose_scaled(const DecompositionResult& dec, double p);

/// One-cycle windows advanced by half a cycle, starting at the first sample.
/// Requires an even number of samples per cycle.
[[nodiscard]] std::vector<PhasorSet> sliding_phasor_stream(const WaveformRecord& record, std::string_view channel,
                                                           double f0, int m = kDefaultMaxOrder);

/// Sum of per-harmonic mean powers, A_k^2 / 2.
[[nodiscard]] double harmonic_power(const PhasorSet& set) noexcept;

}  // namespace hif::phasor
