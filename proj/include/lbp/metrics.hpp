#pragma once

#include <span>
#include <vector>

#include "lbp/samplers.hpp"

namespace lbp {

// ESS of a scalar chain trace: n / (1 + 2 sum_k rho_k), autocorrelations
// summed under the initial-positive-sequence rule (stop at the first
// non-positive pair rho_{2k} + rho_{2k+1}). Result clipped to [1, n];
// a constant trace reports 1 by convention. Requires n >= 10.
double effective_sample_size(std::span<const double> trace);

// Online per-chain accumulator of acceptance rate, expected jump distance
// (Rao-Blackwellized accept_prob * jump and realized), the log-probability
// trace, and the per-step scale history.
struct ChainStats {
    long n_steps = 0;
    double mean_accept = 0.0;
    double ejd_rb = 0.0;
    double ejd_realized = 0.0;
    std::vector<double> trace;       // log pi(x_t) after each recorded step
    std::vector<int> scale_history;  // integer scale used per step

    void record(const StepResult& step, double state_logp);
    void reset();

    double ess() const { return effective_sample_size(trace); }
};

// Cross-chain summary: means weighted by step counts; ESS is computed per
// chain and averaged.
struct MergedStats {
    long n_steps = 0;
    int chains = 0;
    double mean_accept = 0.0;
    double ejd_rb = 0.0;
    double ejd_realized = 0.0;
    double mean_ess = 0.0;
};

MergedStats merge(std::span<const ChainStats> chains);

}  // namespace lbp
