// config.hpp: INI-style key/value documents used for model, run and manifest files
//
// Grammar: '[section]' headers, 'key = value' lines, '#' or ';' comments.
// Keys are unique within a section. Values are trimmed strings; lists are
// comma separated.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qgs {

class KeyValueDocument {
public:
    using Entry = std::pair<std::string, std::string>;
    struct Section {
        std::string name;
        std::vector<Entry> entries;
    };

    static KeyValueDocument parse(std::string_view text);
    static KeyValueDocument load(const std::filesystem::path& path);

    bool has_section(std::string_view name) const;
    const Section* section(std::string_view name) const;
    std::vector<std::string> section_names() const;

    std::optional<std::string> get(std::string_view section, std::string_view key) const;
    // Insert or overwrite, preserving first-insertion order.
    void set(std::string_view section, std::string_view key, std::string value);
    void erase(std::string_view section, std::string_view key);

    std::string to_string() const;
    void save(const std::filesystem::path& path) const;

    const std::vector<Section>& sections() const { return sections_; }

private:
    Section& ensure_section(std::string_view name);
    std::vector<Section> sections_;
};

// Typed accessors. All throw qgs::Error with the offending "section.key".
double parse_double(std::string_view text, std::string_view key);
long parse_integer(std::string_view text, std::string_view key);
bool parse_bool(std::string_view text, std::string_view key);
std::vector<std::string> split_list(std::string_view text);

std::optional<double> get_double(const KeyValueDocument& doc, std::string_view section, std::string_view key);
double require_double(const KeyValueDocument& doc, std::string_view section, std::string_view key);
std::optional<long> get_integer(const KeyValueDocument& doc, std::string_view section, std::string_view key);

// Looks up an energy stored as `<base>_ev`, `<base>_cm1` or `<base>_fs`
// (inverse time, E = hbar/t). Returns the value in eV. A key `<base>_<other>`
// raises UnknownUnit; several spellings of the same quantity raise ParseError.
std::optional<double> get_energy_ev(const KeyValueDocument& doc, std::string_view section, std::string_view base);
// Times: `<base>_fs` only.
std::optional<double> get_time_fs(const KeyValueDocument& doc, std::string_view section, std::string_view base);

std::string format_double(double value); // round-trip exact ("%.17g")

} // namespace qgs
