#include <sstream>
#include <vector>

#include "fsl/metric_field.hpp"
#include "fsl/plane.hpp"

namespace fsl {

namespace {

std::vector<double> parse_params(const std::string& s, size_t expected, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            size_t pos = 0;
            out.push_back(std::stod(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError("bad numeric parameter '" + tok + "' in " + what);
        }
    }
    if (out.size() != expected)
        throw ConfigError(what + " expects " + std::to_string(expected) + " parameters");
    return out;
}

}  // namespace

MetricField make_preset(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);

    if (head == "euclidean") return euclidean_metric();
    if (head == "randers") {
        const auto p = parse_params(args, 2, "randers");
        if (p[0] * p[0] + p[1] * p[1] >= 1.0)
            throw ConfigError("randers drift must satisfy |b| < 1");
        return randers_metric(p[0], p[1]);
    }
    if (head == "randers-x") {
        const auto p = parse_params(args, 1, "randers-x");
        return randers_x_metric(p[0]);
    }
    if (head == "ellipse") {
        const auto p = parse_params(args, 2, "ellipse");
        return axis_ellipse_metric(p[0], p[1]);
    }
    if (head == "plane") {
        if (args == "trifocal-rot")
            return metric_from_field(SeedIndicatrix::trifocal(), OneFormField::rotational(),
                                     "plane:trifocal-rot");
        if (args == "circle-rot")
            return metric_from_field(SeedIndicatrix::circle(), OneFormField::rotational(),
                                     "plane:circle-rot");
        throw ConfigError("unknown plane construction id 'plane:" + args + "'");
    }
    throw ConfigError("unknown metric preset '" + spec + "'");
}

}  // namespace fsl
