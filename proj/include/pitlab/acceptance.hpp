#pragma once

// Acceptance criteria as runnable checks. Each criterion reports pass/fail,
// wall time and a one-line summary of the measured quantities.

#include "pitlab/mp.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace pitlab {

enum class Suite { Quick, Full };

/// "quick" or "full"; throws std::invalid_argument otherwise.
Suite parse_suite(const std::string& name);

struct AcceptanceOptions {
    Suite suite = Suite::Full;
    std::optional<Bits> precision_bits;  // working precision of the pantograph check (default 160)
    std::optional<double> tolerance;     // quadrature tolerance for contour and line integrals
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    std::string detail;
};

constexpr int kCriterionCount = 12;

/// Runs criteria `ids` (all when empty) in order. Criteria 3, 4, 5 and 12 share one zero search.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts, const std::vector<int>& ids = {});

/// "PASS  3  zero count  (1.20 s)  n(30)=30 ..."
std::string format_result(const CriterionResult& r);
nlohmann::json results_to_json(const std::vector<CriterionResult>& results);

}  // namespace pitlab
