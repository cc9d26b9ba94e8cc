// validate.hpp — Built-in identity suite: ordering identity, Gaussian
// integral identity, oracle-vs-closed-form spot checks, transform round trips.

#pragma once

#include <string>
#include <vector>

namespace ovtom::cli {

struct ValidateOptions {
    bool fast = false;
    // Test hook: evaluates the closed form with the kernel argument sign
    // flipped, which must trip the oracle comparison.
    bool inject_kernel_sign_flip = false;
};

struct CheckResult {
    std::string name;
    double deviation = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

std::vector<CheckResult> run_validation_suite(const ValidateOptions& options);
bool all_passed(const std::vector<CheckResult>& results);
std::string render_validation_table(const std::vector<CheckResult>& results);

} // namespace ovtom::cli
