#pragma once

#include <string>
#include <vector>

namespace smlab {

// Outcome of one numerical identity check.
struct ResidualReport {
    std::string check;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    int n_points = 0;
    double half_width = 0.0;
    double dt = 0.0;

    std::string to_json() const;
};

// One named pass/fail entry of a verification suite.
struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

}  // namespace smlab
