#pragma once

// Run configuration: a flat sectioned key-value file. Lines are
// `key = value`, sections are `[name]`, comments start with '#'.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fsl/geometry.hpp"

namespace fsl {

struct GridAxis {
    double min = 0.0, max = 0.0;
    int count = 1;
};

class RunConfig {
  public:
    static RunConfig parse_file(const std::string& path);
    static RunConfig parse_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string_or(const std::string& section, const std::string& key,
                              const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key, double fallback) const;
    int get_int_or(const std::string& section, const std::string& key, int fallback) const;
    GridAxis get_axis(const std::string& section, const std::string& key) const;  // "min:max:count"

    // base-point grid from [grid] u1/u2 axes; defaults to the single origin
    std::vector<ChartPoint> base_grid() const;

  private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace fsl
