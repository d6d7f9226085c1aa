#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hif {

/// Uniformly sampled, synchronized multi-channel time series. Every channel
/// shares the time base t_i = t0 + i / fs.
class WaveformRecord {
public:
    WaveformRecord() = default;
    explicit WaveformRecord(double fs, double t0 = 0.0);

    [[nodiscard]] double fs() const noexcept { return fs_; }
    [[nodiscard]] double t0() const noexcept { return t0_; }
    [[nodiscard]] double dt() const noexcept { return 1.0 / fs_; }
    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    [[nodiscard]] double time(std::size_t index) const noexcept {
        return t0_ + static_cast<double>(index) / fs_;
    }
    [[nodiscard]] double duration() const noexcept {
        return static_cast<double>(size_) / fs_;
    }

    /// Appends a channel. The first channel fixes the record length; later
    /// channels must match it. Names must be unique.
    void add_channel(std::string name, std::vector<double> samples);

    [[nodiscard]] bool has_channel(std::string_view name) const noexcept;
    [[nodiscard]] std::span<const double> channel(std::string_view name) const;
    [[nodiscard]] std::span<double> channel_mut(std::string_view name);
    [[nodiscard]] const std::vector<std::string>& channel_names() const noexcept { return names_; }
    [[nodiscard]] std::size_t channel_count() const noexcept { return names_.size(); }

    /// Copy holding only the named channels, in the given order.
    [[nodiscard]] WaveformRecord select(std::span<const std::string> names) const;

private:
    [[nodiscard]] std::size_t index_of(std::string_view name) const;

    double fs_ = 1.0;
    double t0_ = 0.0;
    std::size_t size_ = 0;
    std::vector<std::string> names_;
    std::vector<std::vector<double>> data_;
};

/// Number of samples in one fundamental cycle. Throws a configuration error
/// when fs / f0 is not a positive integer.
[[nodiscard]] std::size_t samples_per_cycle(double fs, double f0);

}  // namespace hif
