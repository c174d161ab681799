#pragma once

// Experiment configuration: a line-oriented "key = value" format grouped in
// [sections]. '#' starts a comment. Lists are comma separated, optionally in
// brackets with quoted items:
//
//   [instance]
//   s = 2
//   k = 2
//   theta = 0.3, 0.7
//
// Unknown sections and keys are rejected with their key path. The effective
// configuration (defaults filled in) renders back to the same format.

#include "model.hpp"
#include "rat.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace shiftwaring {

class config_error : public std::invalid_argument {
public:
    config_error(std::string key_path, const std::string &what)
        : std::invalid_argument(key_path.empty() ? what : key_path + ": " + what), key_path_(std::move(key_path))
    {
    }
    [[nodiscard]] const std::string &key_path() const { return key_path_; }

private:
    std::string key_path_;
};

namespace detail {

enum class ValueKind { Int, Rational, RationalList, IntList, Mode, Bool, Text };

struct KeySpec {
    const char *name;
    ValueKind kind;
    const char *fallback; // nullptr: no default
};

struct SectionSpec {
    const char *name;
    std::vector<KeySpec> keys;
};

inline const std::vector<SectionSpec> &schema()
{
    static const std::vector<SectionSpec> s = {
        {"instance", {{"s", ValueKind::Int, nullptr}, {"k", ValueKind::Int, nullptr},
                      {"theta", ValueKind::RationalList, nullptr}}},
        {"precision", {{"start", ValueKind::Int, "128"}, {"cap", ValueKind::Int, "4096"}}},
        {"budget", {{"max_candidates", ValueKind::Int, "100000000"}, {"max_cells", ValueKind::Int, "10000"}}},
        {"witness", {{"m_lo", ValueKind::Int, "1"}, {"m_hi", ValueKind::Int, "10"}}},
        {"search", {{"tau", ValueKind::Rational, nullptr},
                    {"m", ValueKind::Int, nullptr},
                    {"eta", ValueKind::Rational, nullptr},
                    {"eta_coeff", ValueKind::Rational, nullptr},
                    {"radius", ValueKind::Rational, nullptr},
                    {"radius_coeff", ValueKind::Rational, nullptr},
                    {"mode", ValueKind::Mode, "depth-first"},
                    {"prune", ValueKind::Bool, "true"},
                    {"profile_m", ValueKind::IntList, nullptr}}},
        {"certify", {{"headroom", ValueKind::Rational, "1/2"}}},
        {"verify", {{"m_lo", ValueKind::Int, nullptr}, {"m_hi", ValueKind::Int, nullptr},
                    {"cert", ValueKind::Text, nullptr}}},
        {"scan", {{"m", ValueKind::Int, nullptr},
                  {"grid_points", ValueKind::Int, "101"},
                  {"C0", ValueKind::Rational, "1/4"},
                  {"step", ValueKind::Rational, nullptr}}},
        {"phase", {{"m_samples", ValueKind::IntList, "20, 40, 60"},
                   {"alphas", ValueKind::RationalList, "1/4, 1/2, 1"},
                   {"betas", ValueKind::RationalList, "-1, 0, 1"},
                   {"coeff", ValueKind::Rational, nullptr}}},
    };
    return s;
}

inline const KeySpec *find_key(const std::string &section, const std::string &key)
{
    for (const auto &sec : schema()) {
        if (section == sec.name) {
            for (const auto &k : sec.keys) {
                if (key == k.name) {
                    return &k;
                }
            }
            return nullptr;
        }
    }
    return nullptr;
}

inline bool known_section(const std::string &section)
{
    return std::any_of(schema().begin(), schema().end(), [&](const SectionSpec &s) { return section == s.name; });
}

inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(const std::string &raw)
{
    std::string v = trim(raw);
    if (!v.empty() && v.front() == '[') {
        if (v.back() != ']') {
            throw std::invalid_argument("unterminated list");
        }
        v = v.substr(1, v.size() - 2);
    }
    std::vector<std::string> out;
    if (trim(v).empty()) {
        return out;
    }
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.size() >= 2 && (item.front() == '"' || item.front() == '\'') && item.back() == item.front()) {
            item = item.substr(1, item.size() - 2);
        }
        if (item.empty()) {
            throw std::invalid_argument("empty list item");
        }
        out.push_back(item);
    }
    return out;
}

inline std::string unquote(const std::string &v)
{
    if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) {
        return v.substr(1, v.size() - 2);
    }
    return v;
}

inline long parse_long(const std::string &v)
{
    std::size_t pos = 0;
    const long out = std::stol(v, &pos);
    if (pos != v.size()) {
        throw std::invalid_argument("not an integer");
    }
    return out;
}

// Canonical text for a value, or throws on a malformed one.
inline std::string canonical_value(ValueKind kind, const std::string &raw)
{
    const std::string v = unquote(trim(raw));
    try {
        switch (kind) {
        case ValueKind::Int:
            return std::to_string(parse_long(v));
        case ValueKind::Rational:
            parse_rational(v);
            return v;
        case ValueKind::RationalList: {
            const auto items = split_list(raw);
            std::string out;
            for (const auto &i : items) {
                parse_rational(i);
                out += (out.empty() ? "" : ", ") + i;
            }
            return out;
        }
        case ValueKind::IntList: {
            const auto items = split_list(raw);
            std::string out;
            for (const auto &i : items) {
                out += (out.empty() ? "" : ", ") + std::to_string(parse_long(i));
            }
            return out;
        }
        case ValueKind::Mode:
            if (v != "depth-first" && v != "meet-in-middle" && v != "auto") {
                throw std::invalid_argument("expected depth-first, meet-in-middle or auto");
            }
            return v;
        case ValueKind::Bool:
            if (v == "true" || v == "1" || v == "yes") {
                return "true";
            }
            if (v == "false" || v == "0" || v == "no") {
                return "false";
            }
            throw std::invalid_argument("expected true or false");
        case ValueKind::Text:
            if (v.empty()) {
                throw std::invalid_argument("empty value");
            }
            return v;
        }
    } catch (const std::invalid_argument &e) {
        throw std::invalid_argument(std::string("invalid value '") + v + "': " + e.what());
    } catch (const std::out_of_range &) {
        throw std::invalid_argument("value '" + v + "' out of range");
    } catch (const parse_error &e) {
        throw std::invalid_argument(std::string("invalid value '") + v + "': " + e.what());
    }
    return v;
}

} // namespace detail

class Config {
public:
    // Sets section.key after validating it against the schema.
    void set(const std::string &section, const std::string &key, const std::string &value)
    {
        const std::string path = section + "." + key;
        if (!detail::known_section(section)) {
            throw config_error(section, "unknown section");
        }
        const auto *spec = detail::find_key(section, key);
        if (!spec) {
            throw config_error(path, "unknown key");
        }
        try {
            values_[section][key] = detail::canonical_value(spec->kind, value);
        } catch (const std::invalid_argument &e) {
            throw config_error(path, e.what());
        }
    }

    // "section.key=value"
    void set_override(const std::string &assignment)
    {
        const auto eq = assignment.find('=');
        const auto dot = assignment.find('.');
        if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
            throw config_error("", "override must look like section.key=value: '" + assignment + "'");
        }
        set(detail::trim(assignment.substr(0, dot)), detail::trim(assignment.substr(dot + 1, eq - dot - 1)),
            assignment.substr(eq + 1));
    }

    [[nodiscard]] bool has(const std::string &section, const std::string &key) const
    {
        const auto s = values_.find(section);
        return s != values_.end() && s->second.count(key) > 0;
    }

    [[nodiscard]] std::string get(const std::string &section, const std::string &key) const
    {
        if (!has(section, key)) {
            throw config_error(section + "." + key, "missing required key");
        }
        return values_.at(section).at(key);
    }

    [[nodiscard]] std::optional<std::string> find(const std::string &section, const std::string &key) const
    {
        if (!has(section, key)) {
            return std::nullopt;
        }
        return values_.at(section).at(key);
    }

    [[nodiscard]] long get_int(const std::string &section, const std::string &key) const
    {
        return detail::parse_long(get(section, key));
    }

    [[nodiscard]] Rat get_rat(const std::string &section, const std::string &key) const
    {
        return parse_rational(get(section, key));
    }

    [[nodiscard]] std::vector<std::string> get_list(const std::string &section, const std::string &key) const
    {
        return detail::split_list(get(section, key));
    }

    [[nodiscard]] std::vector<Rat> get_rat_list(const std::string &section, const std::string &key) const
    {
        std::vector<Rat> out;
        for (const auto &i : get_list(section, key)) {
            out.push_back(parse_rational(i));
        }
        return out;
    }

    [[nodiscard]] std::vector<Int> get_int_list(const std::string &section, const std::string &key) const
    {
        std::vector<Int> out;
        for (const auto &i : get_list(section, key)) {
            out.emplace_back(i, 10);
        }
        return out;
    }

    void fill_defaults()
    {
        for (const auto &sec : detail::schema()) {
            for (const auto &k : sec.keys) {
                if (k.fallback && !has(sec.name, k.name)) {
                    values_[sec.name][k.name] = k.fallback;
                }
            }
        }
    }

    // Checks cross-key constraints and returns the validated instance.
    [[nodiscard]] Instance instance() const
    {
        RawInstance raw;
        raw.s = get_int("instance", "s");
        raw.k = get_int("instance", "k");
        raw.theta = get_list("instance", "theta");
        try {
            return validate_instance(raw);
        } catch (const instance_error &e) {
            throw config_error("instance." + e.hypothesis(), e.what());
        }
    }

    void validate() const
    {
        (void)instance();
        const long start = get_int("precision", "start");
        const long cap = get_int("precision", "cap");
        if (start < 2 || cap < start) {
            throw config_error("precision", "need 2 <= start <= cap");
        }
        if (get_int("budget", "max_candidates") < 1 || get_int("budget", "max_cells") < 1) {
            throw config_error("budget", "budgets must be positive");
        }
    }

    [[nodiscard]] std::string to_text() const
    {
        std::ostringstream os;
        bool first = true;
        for (const auto &sec : detail::schema()) {
            const auto it = values_.find(sec.name);
            if (it == values_.end() || it->second.empty()) {
                continue;
            }
            os << (first ? "" : "\n") << '[' << sec.name << "]\n";
            first = false;
            for (const auto &k : sec.keys) {
                const auto v = it->second.find(k.name);
                if (v != it->second.end()) {
                    os << k.name << " = " << v->second << '\n';
                }
            }
        }
        return os.str();
    }

    friend bool operator==(const Config &a, const Config &b) { return a.values_ == b.values_; }

private:
    std::map<std::string, std::map<std::string, std::string>> values_;
};

// Parses config text without filling defaults.
inline Config parse_config_text(const std::string &text)
{
    Config cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string t = detail::trim(line);
        if (t.empty()) {
            continue;
        }
        if (t.front() == '[') {
            if (t.back() != ']') {
                throw config_error("line " + std::to_string(lineno), "malformed section header");
            }
            section = detail::trim(t.substr(1, t.size() - 2));
            if (!detail::known_section(section)) {
                throw config_error(section, "unknown section");
            }
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw config_error("line " + std::to_string(lineno), "expected key = value");
        }
        if (section.empty()) {
            throw config_error("line " + std::to_string(lineno), "key outside of a section");
        }
        cfg.set(section, detail::trim(t.substr(0, eq)), t.substr(eq + 1));
    }
    return cfg;
}

// File (optional), then overrides, then defaults; validated.
inline Config parse_config(const std::optional<std::string> &path, const std::vector<std::string> &overrides = {})
{
    Config cfg;
    if (path) {
        std::ifstream in(*path);
        if (!in) {
            throw config_error("", "cannot open config file '" + *path + "'");
        }
        std::stringstream ss;
        ss << in.rdbuf();
        cfg = parse_config_text(ss.str());
    }
    for (const auto &o : overrides) {
        cfg.set_override(o);
    }
    cfg.fill_defaults();
    cfg.validate();
    return cfg;
}

} // namespace shiftwaring
