// Prints one PASS/FAIL line per acceptance criterion.
//
// The exit status is 0 when every failing criterion is listed in --expect-fail,
// so criteria known to be out of reach at desk scale still print FAIL without
// breaking the test run. A listed criterion that passes is reported as such.

#include "pitlab/acceptance.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <set>

int main(int argc, char** argv) {
    CLI::App app{"pitlab acceptance criteria"};
    std::string suite = "full";
    std::vector<int> only;
    std::vector<int> expect_fail;
    bool json = false;
    app.add_option("--suite", suite, "quick or full")->check(CLI::IsMember({"quick", "full"}));
    app.add_option("--only", only, "run these criteria only")->delimiter(',');
    app.add_option("--expect-fail", expect_fail, "criteria allowed to fail")->delimiter(',');
    app.add_flag("--json", json, "print results as JSON after the summary");
    CLI11_PARSE(app, argc, argv);

    pitlab::AcceptanceOptions opts;
    opts.suite = pitlab::parse_suite(suite);
    std::vector<pitlab::CriterionResult> results;
    try {
        results = pitlab::run_acceptance(opts, only);
    } catch (const std::exception& e) {
        std::cerr << "acceptance: " << e.what() << '\n';
        return 2;
    }

    const std::set<int> allowed(expect_fail.begin(), expect_fail.end());
    int passed = 0, unexpected = 0;
    for (const auto& r : results) {
        std::cout << pitlab::format_result(r) << std::endl;
        if (r.pass) {
            ++passed;
            if (allowed.count(r.id)) std::cout << "     criterion " << r.id << " was listed as expected to fail\n";
        } else if (!allowed.count(r.id)) {
            ++unexpected;
        }
    }
    std::cout << suite << " suite: " << passed << "/" << results.size() << " criteria passed";
    if (results.size() - passed > 0) {
        std::cout << ", " << (results.size() - passed - unexpected) << " expected failure(s), " << unexpected
                  << " unexpected";
    }
    std::cout << std::endl;
    if (json) std::cout << pitlab::results_to_json(results).dump(2) << std::endl;
    return unexpected == 0 ? 0 : 1;
}
