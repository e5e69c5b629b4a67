#pragma once

#include <functional>
#include <string>
#include <vector>

#include "density/numerics/params.hpp"

namespace density::numerics {

struct GradCheckOptions {
    double epsilon = 1e-5;
    // 0 probes every component; otherwise a seeded random subset per parameter.
    int max_probes_per_param = 0;
    std::uint64_t probe_seed = 0x9d2c5680;
};

struct GradCheckEntry {
    std::string name;
    double max_rel_error = 0.0;
    std::size_t components_checked = 0;
    bool pass = false;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> per_parameter;
    double tolerance = 0.0;
    double max_rel_error = 0.0;
    bool pass = false;
};

// Relative error between analytic and numeric gradient components,
// |a - n| / (|a| + |n|), zero when both are negligibly small.
double gradient_rel_error(double analytic, double numeric);

// Compares the analytic gradient of `loss` (as produced by
// `analytic_backward`) against central finite differences at the current
// parameter values. Failures are data in the report, not errors.
GradCheckReport gradient_check(const std::function<double(const ParamSet&)>& loss,
                               const std::function<void(const ParamSet&, Gradients&)>& analytic_backward,
                               ParamSet& params, double tolerance, const GradCheckOptions& options = {});

}  // namespace density::numerics
