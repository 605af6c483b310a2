#pragma once

#include <functional>
#include <string>
#include <vector>

namespace kneck {

struct CheckRow {
    std::string test_id;
    double T = 0.0;
    std::string zone_or_case;
    double value = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    std::vector<CheckRow> rows;
    double seconds = 0.0;
    double budget_seconds = 0.0;
    bool checks_pass = false;
    bool pass() const { return checks_pass && seconds < budget_seconds; }
};

// T_list drives the order fits of criteria 6, 8 and 12; the other criteria use fixed parameters.
struct SuiteConfig {
    std::vector<double> T_list = {25.0, 50.0, 100.0};
    int k_minus = 0;
    int k_plus = -1;
    int torus_modes = 6; // |m|, |n| bound of the default neck torus
};

inline constexpr int criterion_count = 12;

// Errors from the library propagate; callers attach the criterion id.
CriterionResult run_criterion(int id, const SuiteConfig& cfg);

std::vector<CriterionResult> run_suite(const SuiteConfig& cfg, const std::vector<int>& ids = {},
                                       const std::function<void(const CriterionResult&)>& on_done = {});

} // namespace kneck
