#include "hif/workbench/config.hpp"

#include "hif/core/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace hif::workbench {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool valid_key(std::string_view key) {
    if (key.empty() || key.front() == '.' || key.back() == '.') {
        return false;
    }
    return std::all_of(key.begin(), key.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
    });
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    double value = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        return std::nullopt;
    }
    return value;
}

}  // namespace

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto item = trim(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        if (!item.empty()) {
            out.emplace_back(item);
        }
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    return out;
}

std::string format_number(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ec == std::errc() ? ptr : buf);
}

ConfigMap ConfigMap::parse(std::string_view text, const std::string& source) {
    ConfigMap map;
    map.source_ = source;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            nl = text.size();
        }
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const std::string where = source + ":" + std::to_string(line_no) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') {
                fail(ErrorCategory::Parse, where + "unterminated section header");
            }
            const auto name = trim(line.substr(1, line.size() - 2));
            if (!valid_key(name)) {
                fail(ErrorCategory::Parse, where + "invalid section name '" + std::string(name) + "'");
            }
            section = std::string(name);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            fail(ErrorCategory::Parse, where + "expected 'key = value'");
        }
        const auto key = trim(line.substr(0, eq));
        if (!valid_key(key)) {
            fail(ErrorCategory::Parse, where + "invalid key '" + std::string(key) + "'");
        }
        std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
        if (map.has(full)) {
            fail(ErrorCategory::Parse, where + "key '" + full + "' set twice (first on line " +
                                           std::to_string(map.find(full)->line) + ")");
        }
        map.entries_.push_back({std::move(full), std::string(trim(line.substr(eq + 1))), line_no});
    }
    return map;
}

ConfigMap ConfigMap::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCategory::Io, "cannot open config file '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

std::string ConfigMap::serialize() const {
    std::vector<std::string> sections;
    for (const auto& e : entries_) {
        const auto dot = e.key.find('.');
        const std::string sec = dot == std::string::npos ? std::string() : e.key.substr(0, dot);
        if (std::find(sections.begin(), sections.end(), sec) == sections.end()) {
            sections.push_back(sec);
        }
    }
    std::ostringstream out;
    bool first = true;
    for (const auto& sec : sections) {
        if (!sec.empty()) {
            out << (first ? "" : "\n") << '[' << sec << "]\n";
        }
        first = false;
        for (const auto& e : entries_) {
            const auto dot = e.key.find('.');
            const std::string entry_sec = dot == std::string::npos ? std::string() : e.key.substr(0, dot);
            if (entry_sec == sec) {
                out << (sec.empty() ? e.key : e.key.substr(dot + 1)) << " = " << e.value << '\n';
            }
        }
    }
    return out.str();
}

void ConfigMap::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        fail(ErrorCategory::Io, "cannot write config file '" + path.string() + "'");
    }
    out << serialize();
}

const ConfigMap::Entry* ConfigMap::find(std::string_view key) const noexcept {
    const auto it = std::find_if(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.key == key; });
    return it == entries_.end() ? nullptr : &*it;
}

bool ConfigMap::has(std::string_view key) const noexcept { return find(key) != nullptr; }

void ConfigMap::set(const std::string& key, const std::string& value) {
    if (!valid_key(key)) {
        fail(ErrorCategory::InvalidInput, "invalid config key '" + key + "'");
    }
    for (auto& e : entries_) {
        if (e.key == key) {
            e.value = value;
            return;
        }
    }
    entries_.push_back({key, value, 0});
}

void ConfigMap::erase(std::string_view key) {
    std::erase_if(entries_, [&](const Entry& e) { return e.key == key; });
}

std::vector<std::string> ConfigMap::children(std::string_view prefix) const {
    const std::string p = std::string(prefix) + ".";
    std::vector<std::string> out;
    for (const auto& e : entries_) {
        if (e.key.size() > p.size() && e.key.compare(0, p.size(), p) == 0) {
            const auto rest = e.key.substr(p.size());
            const auto name = rest.substr(0, rest.find('.'));
            if (std::find(out.begin(), out.end(), name) == out.end()) {
                out.push_back(name);
            }
        }
    }
    return out;
}

ConfigReader::ConfigReader(const ConfigMap& map) : map_(map), used_(map.entries().size(), false) {}

void ConfigReader::reject(std::string_view key, const std::string& message) const {
    const auto* e = map_.find(key);
    std::string where = map_.source();
    if (e != nullptr && e->line > 0) {
        where += ":" + std::to_string(e->line);
    }
    fail(ErrorCategory::Parse, where + ": key '" + std::string(key) + "': " + message);
}

std::optional<std::string> ConfigReader::text(std::string_view key) {
    const auto& entries = map_.entries();
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].key == key) {
            used_[i] = true;
            return entries[i].value;
        }
    }
    return std::nullopt;
}

std::optional<double> ConfigReader::number(std::string_view key) {
    const auto t = text(key);
    if (!t) {
        return std::nullopt;
    }
    const auto v = parse_double(*t);
    if (!v) {
        reject(key, "expected a number, got '" + *t + "'");
    }
    return v;
}

std::optional<long long> ConfigReader::integer(std::string_view key) {
    const auto t = text(key);
    if (!t) {
        return std::nullopt;
    }
    const auto s = trim(*t);
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        reject(key, "expected an integer, got '" + *t + "'");
    }
    return value;
}

std::optional<std::vector<std::string>> ConfigReader::list(std::string_view key) {
    const auto t = text(key);
    if (!t) {
        return std::nullopt;
    }
    return split_list(*t);
}

std::optional<std::vector<double>> ConfigReader::number_list(std::string_view key) {
    const auto items = list(key);
    if (!items) {
        return std::nullopt;
    }
    std::vector<double> out;
    for (const auto& item : *items) {
        const auto v = parse_double(item);
        if (!v) {
            reject(key, "expected a list of numbers, got '" + item + "'");
        }
        out.push_back(*v);
    }
    return out;
}

void ConfigReader::check_all_used() const {
    const auto& entries = map_.entries();
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (!used_[i]) {
            reject(entries[i].key, "unknown key");
        }
    }
}

}  // namespace hif::workbench
