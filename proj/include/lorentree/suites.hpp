#pragma once

#include <string>
#include <vector>

namespace lorentree {

struct CheckResult {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    // Exact checks report residual 0 or a failure, no tolerance.
    bool exact = false;
    bool ok = false;
    std::string detail;
};

struct SuiteOptions {
    double lambda = 1.25;
    int depth = 6;
    int valence = 3;
    unsigned seed = 1;
};

// Names: quad, hymodel, lorentz, embed, elementary, gelfand, all.
std::vector<std::string> suite_names();
std::vector<CheckResult> run_suite(const std::string& name, const SuiteOptions& options);

std::string format_check(const CheckResult& r);

} // namespace lorentree
