#include "hif/core/waveform.hpp"

#include "hif/core/error.hpp"

#include <algorithm>
#include <cmath>

namespace hif {

WaveformRecord::WaveformRecord(double fs, double t0) : fs_(fs), t0_(t0) {
    if (!(fs > 0.0) || !std::isfinite(fs) || !std::isfinite(t0)) {
        fail(ErrorCategory::InvalidInput, "waveform sample rate must be positive and finite");
    }
}

void WaveformRecord::add_channel(std::string name, std::vector<double> samples) {
    if (has_channel(name)) {
        fail(ErrorCategory::InvalidInput, "duplicate channel '" + name + "'");
    }
    if (!names_.empty() && samples.size() != size_) {
        fail(ErrorCategory::InvalidInput,
             "channel '" + name + "' has " + std::to_string(samples.size()) +
                 " samples, record has " + std::to_string(size_));
    }
    size_ = samples.size();
    names_.push_back(std::move(name));
    data_.push_back(std::move(samples));
}

bool WaveformRecord::has_channel(std::string_view name) const noexcept {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::size_t WaveformRecord::index_of(std::string_view name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) {
        fail(ErrorCategory::InvalidInput, "missing channel '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - names_.begin());
}

std::span<const double> WaveformRecord::channel(std::string_view name) const {
    return data_[index_of(name)];
}

std::span<double> WaveformRecord::channel_mut(std::string_view name) {
    return data_[index_of(name)];
}

WaveformRecord WaveformRecord::select(std::span<const std::string> names) const {
    WaveformRecord out(fs_, t0_);
    for (const auto& name : names) {
        const auto ch = channel(name);
        out.add_channel(name, std::vector<double>(ch.begin(), ch.end()));
    }
    return out;
}

std::size_t samples_per_cycle(double fs, double f0) {
    if (!(f0 > 0.0) || !(fs > 0.0)) {
        fail(ErrorCategory::Configuration, "sample rate and fundamental frequency must be positive");
    }
    const double ratio = fs / f0;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio) {
        fail(ErrorCategory::Configuration,
             "fs/f0 = " + std::to_string(ratio) + " is not an integer; windows cannot align to cycles");
    }
    return static_cast<std::size_t>(rounded);
}

}  // namespace hif
