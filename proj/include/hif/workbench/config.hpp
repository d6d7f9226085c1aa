#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hif::workbench {

/// Ordered key/value store behind the scenario file format:
///
///     # comment
///     [network]
///     detuning = -0.05
///     feeder.f1.c0 = 6.7e-6
///
/// Keys are stored fully qualified ("network.feeder.f1.c0"). Every entry
/// remembers its source line so schema errors can point at it.
class ConfigMap {
public:
    struct Entry {
        std::string key;
        std::string value;
        int line = 0;  ///< 0 for entries set programmatically
    };

    /// Throws Parse with the offending line number.
    [[nodiscard]] static ConfigMap parse(std::string_view text, const std::string& source = "<text>");
    [[nodiscard]] static ConfigMap load(const std::filesystem::path& path);

    /// One section per first key component, entries in insertion order.
    [[nodiscard]] std::string serialize() const;
    void save(const std::filesystem::path& path) const;

    [[nodiscard]] bool has(std::string_view key) const noexcept;
    [[nodiscard]] const Entry* find(std::string_view key) const noexcept;
    void set(const std::string& key, const std::string& value);
    void erase(std::string_view key);

    [[nodiscard]] const std::vector<Entry>& entries() const noexcept { return entries_; }
    [[nodiscard]] const std::string& source() const noexcept { return source_; }

    /// Distinct next components below `prefix.`, in first-seen order.
    [[nodiscard]] std::vector<std::string> children(std::string_view prefix) const;

private:
    std::string source_ = "<text>";
    std::vector<Entry> entries_;
};

/// Typed accessors that record which keys were consumed, so that leftover
/// (unknown) keys can be rejected with their line.
class ConfigReader {
public:
    explicit ConfigReader(const ConfigMap& map);

    [[nodiscard]] bool has(std::string_view key) const noexcept { return map_.has(key); }
    [[nodiscard]] std::optional<std::string> text(std::string_view key);
    [[nodiscard]] std::optional<double> number(std::string_view key);
    [[nodiscard]] std::optional<long long> integer(std::string_view key);
    [[nodiscard]] std::optional<std::vector<std::string>> list(std::string_view key);
    [[nodiscard]] std::optional<std::vector<double>> number_list(std::string_view key);

    [[nodiscard]] double number_or(std::string_view key, double fallback) { return number(key).value_or(fallback); }

    /// Throws Parse naming the key and line.
    [[noreturn]] void reject(std::string_view key, const std::string& message) const;

    /// Throws Parse on the first key that was never read.
    void check_all_used() const;

    [[nodiscard]] const ConfigMap& map() const noexcept { return map_; }

private:
    const ConfigMap& map_;
    std::vector<bool> used_;
};

/// Shortest text that reads back to the same double.
[[nodiscard]] std::string format_number(double value);

[[nodiscard]] std::vector<std::string> split_list(std::string_view text);

}  // namespace hif::workbench
