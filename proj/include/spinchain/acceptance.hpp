#ifndef SPINCHAIN_ACCEPTANCE_HPP
#define SPINCHAIN_ACCEPTANCE_HPP

#include <string>
#include <vector>

namespace spinchain {

struct CriterionResult {
    int index = 0;
    std::string name;
    bool passed = false;
    std::string detail;    // measured numbers behind the verdict
    double seconds = 0.0;
};

// Runs the full verification battery (12 criteria). Each criterion is
// self-contained; a throw inside one is caught and reported as a failure.
std::vector<CriterionResult> run_acceptance();

// Prints one "PASS"/"FAIL" line per criterion; returns the failure count.
int report_acceptance(const std::vector<CriterionResult>& results);

}  // namespace spinchain

#endif
