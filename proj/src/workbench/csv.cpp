#include "hif/workbench/csv.hpp"

#include "hif/core/error.hpp"
#include "hif/workbench/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace hif::workbench {

namespace {

constexpr double kUniformTolerance = 1e-6;  // fraction of one sample period

[[noreturn]] void parse_error(const std::string& source, std::size_t row, const std::string& message) {
    fail(ErrorCategory::Parse, source + ": row " + std::to_string(row) + ": " + message);
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        cells.push_back(line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
        if (comma == std::string::npos) {
            break;
        }
        pos = comma + 1;
    }
    for (auto& c : cells) {
        const auto first = c.find_first_not_of(" \t\r");
        const auto last = c.find_last_not_of(" \t\r");
        c = first == std::string::npos ? std::string() : c.substr(first, last - first + 1);
    }
    return cells;
}

}  // namespace

void write_waveforms(std::ostream& out, const WaveformRecord& record) {
    const auto& names = record.channel_names();
    out << 't';
    for (const auto& n : names) {
        out << ',' << n;
    }
    out << '\n';
    std::vector<std::span<const double>> columns;
    columns.reserve(names.size());
    for (const auto& n : names) {
        columns.push_back(record.channel(n));
    }
    for (std::size_t i = 0; i < record.size(); ++i) {
        out << format_number(record.time(i));
        for (const auto& col : columns) {
            out << ',' << format_number(col[i]);
        }
        out << '\n';
    }
}

void export_waveforms(const WaveformRecord& record, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        fail(ErrorCategory::Io, "cannot write waveform file '" + path.string() + "'");
    }
    write_waveforms(out, record);
}

WaveformRecord read_waveforms(std::istream& in, const std::string& source) {
    std::string line;
    if (!std::getline(in, line) || split_row(line).front().empty()) {
        parse_error(source, 1, "missing header row");
    }
    const auto header = split_row(line);
    if (header.front() != "t") {
        parse_error(source, 1, "first header column must be 't', got '" + header.front() + "'");
    }
    for (std::size_t c = 1; c < header.size(); ++c) {
        if (header[c].empty()) {
            parse_error(source, 1, "empty channel name in column " + std::to_string(c + 1));
        }
    }
    std::vector<double> time;
    std::vector<std::vector<double>> columns(header.size() - 1);
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const auto cells = split_row(line);
        if (cells.size() != header.size()) {
            parse_error(source, row, "expected " + std::to_string(header.size()) + " columns, got " +
                                         std::to_string(cells.size()));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            double value = 0.0;
            const auto& s = cells[c];
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
            if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
                parse_error(source, row, "column '" + header[c] + "': not a number: '" + s + "'");
            }
            if (c == 0) {
                if (!time.empty() && !(value > time.back())) {
                    parse_error(source, row, "time column is not strictly increasing");
                }
                time.push_back(value);
            } else {
                columns[c - 1].push_back(value);
            }
        }
    }
    if (time.size() < 2) {
        parse_error(source, row, "at least two samples are required");
    }
    const double span = time.back() - time.front();
    double fs = static_cast<double>(time.size() - 1) / span;
    if (const double rounded = std::round(fs); std::abs(fs - rounded) <= 1e-6 * fs) {
        fs = rounded;
    }
    for (std::size_t i = 0; i < time.size(); ++i) {
        const double expected = time.front() + static_cast<double>(i) / fs;
        if (std::abs(time[i] - expected) > kUniformTolerance / fs) {
            parse_error(source, i + 2, "non-uniform sampling (expected t = " + format_number(expected) + ")");
        }
    }
    WaveformRecord record(fs, time.front());
    for (std::size_t c = 1; c < header.size(); ++c) {
        record.add_channel(header[c], std::move(columns[c - 1]));
    }
    return record;
}

WaveformRecord import_waveforms(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCategory::Io, "cannot open waveform file '" + path.string() + "'");
    }
    return read_waveforms(in, path.string());
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::row() {
    rows_.emplace_back();
    return *this;
}

CsvTable& CsvTable::cell(const std::string& text) {
    if (rows_.empty()) {
        row();
    }
    rows_.back().push_back(text);
    return *this;
}

CsvTable& CsvTable::cell(double value) { return cell(format_number(value)); }

CsvTable& CsvTable::cell(std::size_t value) { return cell(std::to_string(value)); }

std::string CsvTable::str() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < header_.size(); ++i) {
        out << (i ? "," : "") << header_[i];
    }
    out << '\n';
    for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            out << (i ? "," : "") << r[i];
        }
        out << '\n';
    }
    return out.str();
}

void CsvTable::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        fail(ErrorCategory::Io, "cannot write '" + path.string() + "'");
    }
    out << str();
}

}  // namespace hif::workbench
