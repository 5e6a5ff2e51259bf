#include "pitlab/config.hpp"

#include <fstream>
#include <regex>
#include <set>

namespace pitlab {

ExperimentConfig::ExperimentConfig() : family(family_for_alpha("sqrt2")) {}

nlohmann::json family_for_alpha(const std::string& text) {
    static const std::regex fraction(R"(\s*([+-]?\d+)\s*/\s*(\d+)\s*)");
    std::smatch m;
    if (std::regex_match(text, m, fraction)) {
        const std::int64_t p = std::stoll(m[1].str());
        const std::int64_t q = std::stoll(m[2].str());
        if (q < 1) throw ConfigError("alpha fraction needs a positive denominator");
        return {{"phase", {{"kind", "rational"}, {"p", p}, {"q", q}}}};
    }
    try {
        AlphaSpec::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError("bad alpha '" + text + "': " + e.what());
    }
    return {{"phase", {{"kind", "quadratic"}, {"alpha", text}}}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const std::set<std::string> known{"family", "alpha", "params", "out", "tolerance", "precision_bits",
                                             "threads"};
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw ConfigError("unknown config key: " + key);
    }
    if (j.contains("family") && j.contains("alpha")) throw ConfigError("config has both family and alpha");

    ExperimentConfig c;
    try {
        if (j.contains("family")) c.family = j.at("family");
        if (j.contains("alpha")) {
            const auto& a = j.at("alpha");
            c.set_alpha(a.is_string() ? a.get<std::string>() : a.dump());
        }
        if (j.contains("params")) {
            if (!j.at("params").is_object()) throw ConfigError("params must be an object");
            c.params = j.at("params");
        }
        if (j.contains("out")) c.out = j.at("out").get<std::string>();
        if (j.contains("tolerance")) c.tolerance = j.at("tolerance").get<double>();
        if (j.contains("precision_bits")) c.precision_bits = j.at("precision_bits").get<Bits>();
        if (j.contains("threads")) c.threads = j.at("threads").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (c.tolerance && !(*c.tolerance > 0.0)) throw ConfigError("tolerance must be positive");
    if (c.precision_bits && *c.precision_bits < 64) throw ConfigError("precision_bits must be >= 64");
    if (c.threads < 0) throw ConfigError("threads must be >= 0");
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
    return from_json(j);
}

void ExperimentConfig::set_alpha(const std::string& text) { family = family_for_alpha(text); }

CoefficientSequence ExperimentConfig::sequence() const {
    nlohmann::json f = family;
    if (precision_bits) f["precision_bits"] = *precision_bits;
    try {
        return sequence_from_json(f);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("family: ") + e.what());
    }
}

}  // namespace pitlab
