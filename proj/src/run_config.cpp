#include "specstat/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "specstat/errors.hpp"
#include "specstat/model.hpp"

namespace specstat {

namespace {

enum class Type
{
    real,
    uint,
    boolean,
    text,
    list,
    model,
    mode
};

std::optional<Type> key_type(std::string_view key)
{
    static const std::map<std::string_view, Type> types{
        {"model", Type::model},       {"beta", Type::real},           {"alpha", Type::real},
        {"center", Type::real},       {"width", Type::real},          {"size", Type::uint},
        {"seed", Type::uint},         {"eps", Type::real},            {"emax", Type::real},
        {"e_window_max", Type::real}, {"grid_points", Type::uint},    {"cache_dir", Type::text},
        {"out_dir", Type::text},      {"mode", Type::mode},           {"eps_min", Type::real},
        {"eps_max", Type::real},      {"window_periods", Type::real}, {"betas", Type::list},
        {"ensemble_average", Type::boolean}, {"svg", Type::boolean},  {"threads", Type::uint},
        {"m_r_max", Type::uint},      {"m_theta_max", Type::uint},   {"normalized", Type::boolean},
        {"tol_scale", Type::real},
    };
    auto it = types.find(key);
    if (it == types.end()) return std::nullopt;
    return it->second;
}

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::optional<double> to_double(std::string_view s)
{
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<std::uint64_t> to_uint(std::string_view s)
{
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<bool> to_bool(std::string_view s)
{
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    return std::nullopt;
}

std::optional<std::vector<double>> to_list(std::string_view s)
{
    std::vector<double> out;
    while (true) {
        const auto comma = s.find(',');
        auto v = to_double(trim(s.substr(0, comma)));
        if (!v) return std::nullopt;
        out.push_back(*v);
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    return out;
}

void check_value(std::string_view key, std::string_view value)
{
    const auto type = key_type(key);
    if (!type) throw ConfigError(fmt::format("unknown configuration key '{}'", key));
    bool ok = true;
    switch (*type) {
    case Type::real: ok = to_double(value).has_value(); break;
    case Type::uint: ok = to_uint(value).has_value(); break;
    case Type::boolean: ok = to_bool(value).has_value(); break;
    case Type::list: ok = to_list(value).has_value(); break;
    case Type::text: ok = !value.empty(); break;
    case Type::model: parse_model(value); break;
    case Type::mode: ok = value == "saturation" || value == "width"; break;
    }
    if (!ok) throw ConfigError(fmt::format("invalid value '{}' for key '{}'", value, key));
}

}  // namespace

RunConfig RunConfig::parse(std::istream& in, std::string_view origin)
{
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view s = line;
        if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(fmt::format("{}:{}: expected 'key = value'", origin, lineno));
        try {
            cfg.set(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError(fmt::format("{}:{}: {}", origin, lineno, e.what()));
        }
    }
    return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open configuration file '{}'", path.string()));
    return parse(in, path.string());
}

void RunConfig::set(std::string_view key, std::string_view value)
{
    check_value(key, value);
    values_.insert_or_assign(std::string(key), std::string(value));
}

bool RunConfig::has(std::string_view key) const { return values_.find(key) != values_.end(); }

void RunConfig::merge(const RunConfig& other)
{
    for (const auto& [k, v] : other.values_) values_.insert_or_assign(k, v);
}

std::optional<std::string> RunConfig::get_string(std::string_view key) const
{
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::optional<double> RunConfig::get_double(std::string_view key) const
{
    auto s = get_string(key);
    return s ? to_double(*s) : std::nullopt;
}

std::optional<std::uint64_t> RunConfig::get_uint(std::string_view key) const
{
    auto s = get_string(key);
    return s ? to_uint(*s) : std::nullopt;
}

std::optional<bool> RunConfig::get_bool(std::string_view key) const
{
    auto s = get_string(key);
    return s ? to_bool(*s) : std::nullopt;
}

std::optional<std::vector<double>> RunConfig::get_list(std::string_view key) const
{
    auto s = get_string(key);
    return s ? to_list(*s) : std::nullopt;
}

void RunConfig::write(std::ostream& out) const
{
    for (const auto& [k, v] : values_) out << k << " = " << v << '\n';
}

}  // namespace specstat
