#include "fsl/config.hpp"

#include <fstream>
#include <sstream>

namespace fsl {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

RunConfig RunConfig::parse_string(const std::string& text) {
    RunConfig cfg;
    std::stringstream ss(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value, got '" +
                              line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        cfg.sections_[section][key] = value;
    }
    return cfg;
}

bool RunConfig::has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string RunConfig::get_string(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end() || !s->second.count(key))
        throw ConfigError("missing key '" + key + "' in section [" + section + "]");
    return s->second.at(key);
}

std::string RunConfig::get_string_or(const std::string& section, const std::string& key,
                                     const std::string& fallback) const {
    return has(section, key) ? get_string(section, key) : fallback;
}

double RunConfig::get_double(const std::string& section, const std::string& key) const {
    const std::string v = get_string(section, key);
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "' in [" + section + "] is not a number: '" + v + "'");
    }
}

double RunConfig::get_double_or(const std::string& section, const std::string& key,
                                double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

int RunConfig::get_int_or(const std::string& section, const std::string& key, int fallback) const {
    if (!has(section, key)) return fallback;
    const double v = get_double(section, key);
    const int i = static_cast<int>(v);
    if (i != v) throw ConfigError("key '" + key + "' in [" + section + "] must be an integer");
    return i;
}

GridAxis RunConfig::get_axis(const std::string& section, const std::string& key) const {
    const std::string v = get_string(section, key);
    GridAxis ax;
    char c1 = 0, c2 = 0;
    std::stringstream ss(v);
    if (!(ss >> ax.min >> c1 >> ax.max >> c2 >> ax.count) || c1 != ':' || c2 != ':' ||
        ax.count < 1 || !(ss >> std::ws).eof())
        throw ConfigError("key '" + key + "' in [" + section + "] must be 'min:max:count', got '" +
                          v + "'");
    return ax;
}

std::vector<ChartPoint> RunConfig::base_grid() const {
    if (!has("grid", "u1") && !has("grid", "u2")) return {ChartPoint{0.0, 0.0}};
    const GridAxis a1 = get_axis("grid", "u1");
    const GridAxis a2 = get_axis("grid", "u2");
    std::vector<ChartPoint> out;
    for (int i = 0; i < a1.count; ++i)
        for (int j = 0; j < a2.count; ++j) {
            const double u1 = a1.count == 1 ? a1.min : a1.min + (a1.max - a1.min) * i / (a1.count - 1);
            const double u2 = a2.count == 1 ? a2.min : a2.min + (a2.max - a2.min) * j / (a2.count - 1);
            out.push_back({u1, u2});
        }
    return out;
}

}  // namespace fsl
