#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "lbp/model.hpp"
#include "lbp/samplers.hpp"
#include "lbp/theory.hpp"

namespace lbp {

// Dense transition kernel over {0,1}^N together with the exact normalized
// target, for small-instance verification.
struct ExactKernel {
    int sites = 0;
    std::size_t n_states = 0;
    std::vector<double> pi;  // normalized target, indexed by BitState::to_index
    std::vector<double> p;   // row-major n_states x n_states, row stochastic

    double& at(std::size_t from, std::size_t to) { return p[from * n_states + to]; }
    double at(std::size_t from, std::size_t to) const { return p[from * n_states + to]; }
};

// Exact normalized target by enumeration; N <= 20.
std::vector<double> exact_target(const TargetModel& model, int max_dim = 20);

struct KernelConfig {
    SamplerFamily sampler = SamplerFamily::Lbp;
    int scale = 1;
    LbpOptions lbp;  // weight function / replacement / gradient mode
};

// Full transition matrix of the configured sampler: every ordered index
// sequence u is enumerated and scored with the production selection and
// acceptance code (evaluate_lbp_proposal), so the oracle tests the shipped
// logic. Limits: N <= 10, scale <= 3.
ExactKernel exact_kernel(const TargetModel& model, const KernelConfig& config);

// Same enumeration with a caller-supplied acceptance probability
// A(x, u, y); the production kernel uses the shipped acceptance, tests can
// inject mutated ones.
using AcceptFn =
    std::function<double(const BitState& x, const std::vector<int>& u, const BitState& y)>;
ExactKernel exact_kernel_custom(const TargetModel& model, const KernelConfig& config,
                                const AcceptFn& accept);

// max |pi_x P(x,y) - pi_y P(y,x)|
double check_detailed_balance(const ExactKernel& kernel);
// max |(pi^T P - pi^T)_y|
double check_stationarity(const ExactKernel& kernel);
// max |row sum - 1|
double max_row_sum_error(const ExactKernel& kernel);

// The full toy verification grid: every model family at sizes 4-6, samplers
// RWM / LBP without replacement / LBP with replacement, both weight
// functions, scales 1-3, plus gradient-weight variants. Residuals must stay
// below 1e-10.
struct ValidationCase {
    std::string description;
    double db_residual = 0.0;
    double stationarity_residual = 0.0;
    double row_sum_error = 0.0;
};
std::vector<ValidationCase> standard_validation_grid(std::uint64_t seed);

constexpr double kOracleTolerance = 1e-10;

}  // namespace lbp
