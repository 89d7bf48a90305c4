#include "lbp/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace lbp {

void ChainStats::record(const StepResult& step, double state_logp) {
    ++n_steps;
    const double w = 1.0 / static_cast<double>(n_steps);
    mean_accept += w * (step.accept_prob - mean_accept);
    ejd_rb += w * (step.accept_prob * step.jump_distance - ejd_rb);
    ejd_realized += w * ((step.accepted ? step.jump_distance : 0) - ejd_realized);
    trace.push_back(state_logp);
    scale_history.push_back(step.scale);
}

void ChainStats::reset() {
    n_steps = 0;
    mean_accept = ejd_rb = ejd_realized = 0.0;
    trace.clear();
    scale_history.clear();
}

double effective_sample_size(std::span<const double> trace) {
    const long n = static_cast<long>(trace.size());
    if (n < 10) throw std::invalid_argument("effective_sample_size: trace too short (need >= 10)");

    double mean = 0.0;
    for (double y : trace) mean += y;
    mean /= static_cast<double>(n);

    std::vector<double> centered(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) centered[i] = trace[i] - mean;

    auto gamma = [&](long k) {
        double s = 0.0;
        for (long t = 0; t + k < n; ++t)
            s += centered[static_cast<std::size_t>(t)] * centered[static_cast<std::size_t>(t + k)];
        return s / static_cast<double>(n);
    };

    const double gamma0 = gamma(0);
    if (gamma0 <= 0.0) return 1.0;  // constant trace

    double tau = -1.0;
    for (long k = 0; 2 * k < n; ++k) {
        const double rho_even = (2 * k == 0) ? 1.0 : gamma(2 * k) / gamma0;
        const double rho_odd = (2 * k + 1 < n) ? gamma(2 * k + 1) / gamma0 : 0.0;
        const double pair = rho_even + rho_odd;
        if (pair <= 0.0) break;
        tau += 2.0 * pair;
    }

    if (tau <= 0.0) return static_cast<double>(n);
    const double ess = static_cast<double>(n) / tau;
    return std::min(std::max(ess, 1.0), static_cast<double>(n));
}

MergedStats merge(std::span<const ChainStats> chains) {
    MergedStats m;
    double ess_sum = 0.0;
    for (const ChainStats& c : chains) {
        if (c.n_steps == 0) continue;
        const double w_new = static_cast<double>(c.n_steps);
        const double w_tot = static_cast<double>(m.n_steps) + w_new;
        m.mean_accept += w_new / w_tot * (c.mean_accept - m.mean_accept);
        m.ejd_rb += w_new / w_tot * (c.ejd_rb - m.ejd_rb);
        m.ejd_realized += w_new / w_tot * (c.ejd_realized - m.ejd_realized);
        m.n_steps += c.n_steps;
        ess_sum += c.ess();
        ++m.chains;
    }
    m.mean_ess = m.chains > 0 ? ess_sum / m.chains : 0.0;
    return m;
}

}  // namespace lbp
