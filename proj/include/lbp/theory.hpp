#pragma once

#include <span>

#include "lbp/models.hpp"
#include "lbp/samplers.hpp"

namespace lbp {

enum class SamplerFamily { Rwm, Lbp };

SamplerFamily parse_sampler_family(const std::string& s);
std::string to_string(SamplerFamily f);

namespace theory {

// Standard normal c.d.f., absolute error below 1e-12.
double std_normal_cdf(double t);

// log Phi(t), stable far into the left tail.
double log_std_normal_cdf(double t);

// Target-dependent decay constants of the asymptotic acceptance curves for
// product targets. lambda1 drives the LBP curve, lambda2 (with class
// exponent beta >= 0) the RWM curve.
double lambda1(const BernoulliModel& model, WeightFn fn);
double lambda2(const BernoulliModel& model, double beta);

// Plug-in versions from estimated site marginals, for overlaying curves on
// non-product targets. These are estimates, not the analytic constants.
double lambda1_from_marginals(std::span<const double> marginals, WeightFn fn);
double lambda2_from_marginals(std::span<const double> marginals, double beta);

struct TheoryCurve {
    SamplerFamily kind = SamplerFamily::Lbp;
    double lambda = 0.0;
    int dim = 1;
    double beta = 0.0;  // RWM class exponent
};

// Asymptotic acceptance at scale parameter l (R = l N^{2/3} for LBP,
// R = l N^{2 beta} for RWM):
//   LBP: 2 Phi(-lambda1 l^{3/2} / 2), RWM: 2 Phi(-lambda2 l^{1/2} / 2).
double theoretical_acceptance(const TheoryCurve& curve, double l);

// Expected jump distance at the same parameterization: a(l) * R(l).
double theoretical_efficiency(const TheoryCurve& curve, double l);

// Acceptance predicted at an integer-valued scale R.
double acceptance_at_scale(const TheoryCurve& curve, double scale);

struct OptimalPoint {
    double z_star = 0.0;
    double a_star = 0.0;
};

// Maximizes 2 z Phi(-z^{3/2}/2) (LBP) or 2 z Phi(-z^{1/2}/2) (RWM) by
// golden-section search; the optimal acceptance rates are 0.574 and 0.234.
OptimalPoint solve_optimal(SamplerFamily kind);

// E[1 ^ e^Z] for Z ~ N(mu, sigma^2):
// Phi(mu/sigma) + exp(mu + sigma^2/2) Phi(-sigma - mu/sigma).
double gaussian_min_exp(double mu, double sigma);

}  // namespace theory
}  // namespace lbp
