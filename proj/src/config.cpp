#include "codafin/config.hpp"

#include "codafin/association.hpp"
#include "codafin/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace codafin {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const char* first = value.data();
    const char* last = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last) {
        throw ConfigError("invalid value '" + value + "' for " + key);
    }
    return out;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) out += ',';
        out += s;
    }
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void RunConfig::set(const std::string& raw_key, const std::string& raw_value) {
    std::string key = trim(raw_key);
    for (char& ch : key) {
        if (ch == '-') ch = '_';
    }
    const std::string value = trim(raw_value);
    if (key == "dl_percentile") dl_percentile = parse_number<double>(key, value);
    else if (key == "em_tol") em_tol = parse_number<double>(key, value);
    else if (key == "em_max_iter") em_max_iter = parse_number<std::size_t>(key, value);
    else if (key == "delta_fraction") delta_fraction = parse_number<double>(key, value);
    else if (key == "k_min") k_min = parse_number<std::size_t>(key, value);
    else if (key == "k_max") k_max = parse_number<std::size_t>(key, value);
    else if (key == "k") {
        if (value.empty() || value == "auto") k.reset();
        else k = parse_number<std::size_t>(key, value);
    } else if (key == "restarts") restarts = parse_number<std::size_t>(key, value);
    else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
    else if (key == "employee_threshold") employee_threshold = parse_number<std::int64_t>(key, value);
    else if (key == "group_keys" || key == "group_by") {
        group_keys.clear();
        for (const auto& item : split_list(value)) group_keys.push_back(parse_group_key(item));
    } else if (key == "associate") {
        associate.clear();
        for (const auto& item : split_list(value)) {
            if (item != "employees") parse_covariate(item);
            associate.push_back(item);
        }
    } else if (key == "threads") threads = parse_number<std::size_t>(key, value);
    else throw ConfigError("unknown config key '" + key + "'");
}

void RunConfig::validate() const {
    if (!(dl_percentile > 0.0 && dl_percentile < 100.0))
        throw ConfigError("dl_percentile must lie in (0, 100)");
    if (!(em_tol > 0.0 && em_tol < 1.0)) throw ConfigError("em_tol must lie in (0, 1)");
    if (em_max_iter < 1) throw ConfigError("em_max_iter must be >= 1");
    if (!(delta_fraction > 0.0 && delta_fraction < 1.0))
        throw ConfigError("delta_fraction must lie in (0, 1)");
    if (k_min < 2) throw ConfigError("k_min must be >= 2");
    if (k_max < k_min) throw ConfigError("k_max must be >= k_min");
    if (k && *k < 2) throw ConfigError("k must be >= 2");
    if (restarts < 1) throw ConfigError("restarts must be >= 1");
    if (employee_threshold < 0) throw ConfigError("employee_threshold must be >= 0");
    if (threads < 1) throw ConfigError("threads must be >= 1");
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
    std::vector<std::string> keys;
    for (GroupKey g : group_keys) keys.emplace_back(to_string(g));
    return {
        {"dl_percentile", format_double(dl_percentile)},
        {"em_tol", format_double(em_tol)},
        {"em_max_iter", std::to_string(em_max_iter)},
        {"delta_fraction", format_double(delta_fraction)},
        {"k_min", std::to_string(k_min)},
        {"k_max", std::to_string(k_max)},
        {"k", k ? std::to_string(*k) : "auto"},
        {"restarts", std::to_string(restarts)},
        {"seed", seed ? std::to_string(*seed) : "none"},
        {"employee_threshold", std::to_string(employee_threshold)},
        {"group_keys", join(keys)},
        {"associate", join(associate)},
    };
}

RunConfig parse_config(const std::string& text, RunConfig base) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
        }
        try {
            base.set(line.substr(0, eq), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

}  // namespace codafin
