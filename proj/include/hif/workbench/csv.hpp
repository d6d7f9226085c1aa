#pragma once

#include "hif/core/waveform.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace hif::workbench {

/// Header "t,<channel>,...", one row per sample, LF line endings.
void write_waveforms(std::ostream& out, const WaveformRecord& record);
void export_waveforms(const WaveformRecord& record, const std::filesystem::path& path);

/// The sample rate is inferred from the time column and must be uniform.
/// Throws Parse with the 1-based file row on malformed input.
[[nodiscard]] WaveformRecord read_waveforms(std::istream& in, const std::string& source = "<stream>");
[[nodiscard]] WaveformRecord import_waveforms(const std::filesystem::path& path);

/// Minimal table writer shared by the result files.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    CsvTable& row();
    CsvTable& cell(const std::string& text);
    CsvTable& cell(double value);
    CsvTable& cell(std::size_t value);

    [[nodiscard]] std::string str() const;
    void save(const std::filesystem::path& path) const;

    [[nodiscard]] std::size_t rows() const noexcept { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace hif::workbench
