#pragma once

#include <string>
#include <vector>

namespace collapse {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Fault injection for mutation sanity tests of the validation suite.
struct CheckOptions {
    unsigned threads = 0;
    bool flip_theta_sign = false; // corrupts Theta after construction
    bool quick = false;           // reduced sample counts, for unit tests
};

// Oracle cross-checks exposed through `validate`. Each returns exactly one
// result; run_validation_suite runs them all in a fixed order.
CheckResult check_ftilde_oracle(const CheckOptions& opts = {});
CheckResult check_gamma_grid_oracle(const CheckOptions& opts = {});
CheckResult check_generator_identities(const CheckOptions& opts = {});
CheckResult check_rk4_vs_exact(const CheckOptions& opts = {});
CheckResult check_first_order_negativity(const CheckOptions& opts = {});
CheckResult check_backaction_factorization(const CheckOptions& opts = {});
CheckResult check_ensemble_vs_master(const CheckOptions& opts = {});

std::vector<CheckResult> run_validation_suite(const CheckOptions& opts = {});

std::string format_check_report(const std::vector<CheckResult>& results);
std::string format_check_report_json(const std::vector<CheckResult>& results);

} // namespace collapse
