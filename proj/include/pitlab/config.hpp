#pragma once

// Experiment configuration shared by the command-line front end.
//
// A config file is a JSON object:
//   {
//     "family": { "phase": {...}, "modulus": {...} },   // or "alpha": "sqrt2" | "1/3" | "0.25"
//     "params": { ... command parameters ... },
//     "out": "result.csv",
//     "tolerance": 1e-20,
//     "precision_bits": 192,
//     "threads": 4
//   }
// Command-line flags override file values.

#include "pitlab/coeffs.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace pitlab {

class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

struct ExperimentConfig {
    nlohmann::json family;                      // accepted by sequence_from_json
    nlohmann::json params = nlohmann::json::object();
    std::string out;                            // empty writes to standard output
    std::optional<double> tolerance;
    std::optional<Bits> precision_bits;
    int threads = 0;                            // 0 keeps the OpenMP default

    ExperimentConfig();

    /// Throws ConfigError on unknown keys or ill-typed values.
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig load(const std::string& path);

    /// Replaces the family by the one named by an alpha token.
    void set_alpha(const std::string& text);

    /// The configured family, at precision_bits when set.
    CoefficientSequence sequence() const;
};

/// "p/q" gives the rational family, "sqrt2", "golden", "pi" or a decimal literal the
/// quadratic family with that alpha. Throws ConfigError on malformed input.
nlohmann::json family_for_alpha(const std::string& text);

}  // namespace pitlab
