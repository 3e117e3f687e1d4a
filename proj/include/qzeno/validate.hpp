#pragma once

// Fast self-checks run by `qzeno validate`.

#include <string>
#include <vector>

namespace qzeno {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

std::vector<CheckResult> run_invariant_checks();

}  // namespace qzeno
