#include "density/numerics/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace density::numerics {

double gradient_rel_error(double analytic, double numeric) {
    const double denom = std::abs(analytic) + std::abs(numeric);
    if (denom < 1e-10) return 0.0;
    return std::abs(analytic - numeric) / denom;
}

GradCheckReport gradient_check(const std::function<double(const ParamSet&)>& loss,
                               const std::function<void(const ParamSet&, Gradients&)>& analytic_backward,
                               ParamSet& params, double tolerance, const GradCheckOptions& options) {
    Gradients analytic(params);
    analytic_backward(params, analytic);

    GradCheckReport report;
    report.tolerance = tolerance;

    Rng probe_rng(options.probe_seed);
    for (const auto& name : params.names()) {
        Tensor& value = params.at(name);
        const Tensor& grad = analytic.at(name);

        std::vector<std::size_t> probes;
        const std::size_t n = value.size();
        if (options.max_probes_per_param <= 0 || static_cast<std::size_t>(options.max_probes_per_param) >= n) {
            probes.resize(n);
            for (std::size_t i = 0; i < n; ++i) probes[i] = i;
        } else {
            for (int k = 0; k < options.max_probes_per_param; ++k) {
                probes.push_back(probe_rng.uniform_index(n));
            }
            std::sort(probes.begin(), probes.end());
            probes.erase(std::unique(probes.begin(), probes.end()), probes.end());
        }

        GradCheckEntry entry;
        entry.name = name;
        entry.components_checked = probes.size();
        for (std::size_t idx : probes) {
            const double original = value[idx];
            value[idx] = original + options.epsilon;
            const double up = loss(params);
            value[idx] = original - options.epsilon;
            const double down = loss(params);
            value[idx] = original;
            const double numeric = (up - down) / (2.0 * options.epsilon);
            entry.max_rel_error = std::max(entry.max_rel_error, gradient_rel_error(grad[idx], numeric));
        }
        entry.pass = entry.max_rel_error < tolerance;
        report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
        report.per_parameter.push_back(std::move(entry));
    }

    report.pass = std::all_of(report.per_parameter.begin(), report.per_parameter.end(),
                              [](const GradCheckEntry& e) { return e.pass; });
    return report;
}

}  // namespace density::numerics
