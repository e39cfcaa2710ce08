#include "qgs/config.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qgs/error.hpp"
#include "qgs/units.hpp"

namespace qgs {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string qualified(std::string_view section, std::string_view key) {
    return std::string(section) + "." + std::string(key);
}

} // namespace

KeyValueDocument KeyValueDocument::parse(std::string_view text) {
    KeyValueDocument doc;
    std::string current;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        const auto raw = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;

        auto line = raw;
        if (const auto c = line.find_first_of("#;"); c != std::string_view::npos) line = line.substr(0, c);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3)
                throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no), "malformed section header");
            current = std::string(trim(line.substr(1, line.size() - 2)));
            doc.ensure_section(current);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no), "expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no), "empty key");
        if (doc.get(current, key))
            throw Error(ErrorCode::ParseError, qualified(current, key), "duplicate key");
        doc.set(current, key, std::string(trim(line.substr(eq + 1))));
    }
    return doc;
}

KeyValueDocument KeyValueDocument::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, path.string(), "cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

bool KeyValueDocument::has_section(std::string_view name) const { return section(name) != nullptr; }

const KeyValueDocument::Section* KeyValueDocument::section(std::string_view name) const {
    for (const auto& s : sections_)
        if (s.name == name) return &s;
    return nullptr;
}

std::vector<std::string> KeyValueDocument::section_names() const {
    std::vector<std::string> names;
    for (const auto& s : sections_) names.push_back(s.name);
    return names;
}

std::optional<std::string> KeyValueDocument::get(std::string_view section_name, std::string_view key) const {
    if (const auto* s = section(section_name))
        for (const auto& [k, v] : s->entries)
            if (k == key) return v;
    return std::nullopt;
}

KeyValueDocument::Section& KeyValueDocument::ensure_section(std::string_view name) {
    for (auto& s : sections_)
        if (s.name == name) return s;
    sections_.push_back({std::string(name), {}});
    return sections_.back();
}

void KeyValueDocument::set(std::string_view section_name, std::string_view key, std::string value) {
    auto& s = ensure_section(section_name);
    for (auto& [k, v] : s.entries)
        if (k == key) {
            v = std::move(value);
            return;
        }
    s.entries.emplace_back(std::string(key), std::move(value));
}

void KeyValueDocument::erase(std::string_view section_name, std::string_view key) {
    for (auto& s : sections_)
        if (s.name == section_name)
            std::erase_if(s.entries, [&](const Entry& e) { return e.first == key; });
}

std::string KeyValueDocument::to_string() const {
    std::ostringstream out;
    bool first = true;
    for (const auto& s : sections_) {
        if (!s.name.empty()) {
            if (!first) out << '\n';
            out << '[' << s.name << "]\n";
        }
        for (const auto& [k, v] : s.entries) out << k << " = " << v << '\n';
        first = false;
    }
    return out.str();
}

void KeyValueDocument::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, path.string(), "cannot write file");
    out << to_string();
}

double parse_double(std::string_view text, std::string_view key) {
    const std::string s(trim(text));
    if (s.empty()) throw Error(ErrorCode::ParseError, std::string(key), "empty value");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE)
        throw Error(ErrorCode::ParseError, std::string(key), "not a number: '" + s + "'");
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidValue, std::string(key), "non-finite value");
    return v;
}

long parse_integer(std::string_view text, std::string_view key) {
    const auto s = trim(text);
    long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw Error(ErrorCode::ParseError, std::string(key), "not an integer: '" + std::string(s) + "'");
    return v;
}

bool parse_bool(std::string_view text, std::string_view key) {
    const auto s = trim(text);
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    throw Error(ErrorCode::ParseError, std::string(key), "not a boolean: '" + std::string(s) + "'");
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto item = trim(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        if (!item.empty()) out.emplace_back(item);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::optional<double> get_double(const KeyValueDocument& doc, std::string_view section, std::string_view key) {
    if (auto v = doc.get(section, key)) return parse_double(*v, qualified(section, key));
    return std::nullopt;
}

double require_double(const KeyValueDocument& doc, std::string_view section, std::string_view key) {
    if (auto v = get_double(doc, section, key)) return *v;
    throw Error(ErrorCode::MissingField, qualified(section, key));
}

std::optional<long> get_integer(const KeyValueDocument& doc, std::string_view section, std::string_view key) {
    if (auto v = doc.get(section, key)) return parse_integer(*v, qualified(section, key));
    return std::nullopt;
}

std::optional<double> get_energy_ev(const KeyValueDocument& doc, std::string_view section, std::string_view base) {
    std::optional<double> result;
    std::string found;
    if (const auto* s = doc.section(section)) {
        const std::string prefix = std::string(base) + "_";
        for (const auto& [k, v] : s->entries) {
            if (k.size() <= prefix.size() || k.compare(0, prefix.size(), prefix) != 0) continue;
            const std::string suffix = k.substr(prefix.size());
            Unit unit;
            if (suffix == "ev") unit = Unit::ElectronVolt;
            else if (suffix == "cm1") unit = Unit::Wavenumber;
            else if (suffix == "fs") unit = Unit::FsInverse;
            else if (suffix.find('_') == std::string::npos) throw Error(ErrorCode::UnknownUnit, qualified(section, k));
            else continue;
            if (result) throw Error(ErrorCode::ParseError, qualified(section, k), "quantity also given as " + found);
            result = convert_units(parse_double(v, qualified(section, k)), unit, Unit::ElectronVolt);
            found = k;
        }
    }
    return result;
}

std::optional<double> get_time_fs(const KeyValueDocument& doc, std::string_view section, std::string_view base) {
    return get_double(doc, section, std::string(base) + "_fs");
}

std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

} // namespace qgs
