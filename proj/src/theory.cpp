#include "lbp/theory.hpp"

#include <cmath>
#include <stdexcept>

namespace lbp {

SamplerFamily parse_sampler_family(const std::string& s) {
    if (s == "rwm") return SamplerFamily::Rwm;
    if (s == "lbp") return SamplerFamily::Lbp;
    throw std::invalid_argument("unknown sampler: " + s + " (want rwm|lbp)");
}

std::string to_string(SamplerFamily f) {
    return f == SamplerFamily::Rwm ? "rwm" : "lbp";
}

namespace theory {

double std_normal_cdf(double t) { return 0.5 * std::erfc(-t * M_SQRT1_2); }

double log_std_normal_cdf(double t) {
    if (t > -37.0) return std::log(std_normal_cdf(t));
    // Mills-ratio asymptotics for the far left tail
    const double t2 = t * t;
    return -0.5 * t2 - std::log(-t) - 0.5 * std::log(2.0 * M_PI) +
           std::log1p(-1.0 / t2 + 3.0 / (t2 * t2));
}

namespace {

// per-site weights at both bit values: w(1) = g((1-p)/p), w(0) = g(p/(1-p))
struct SiteWeights {
    double w1, w0;
};

SiteWeights site_weights(double p, WeightFn fn) {
    const double logit = std::log(p) - std::log1p(-p);
    return {std::exp(log_weight(fn, -logit)), std::exp(log_weight(fn, logit))};
}

double lambda1_impl(std::span<const double> p, WeightFn fn) {
    double num = 0.0;       // sum p_j w_j(1) (w_j(0) - w_j(1))^2
    double mean_w = 0.0;    // E_x[(1/N) sum_i w_i(x_i)]
    double sum_pw1 = 0.0;   // sum p_i w_i(1)
    const auto n = static_cast<double>(p.size());
    for (double pi : p) {
        if (!(pi > 0.0 && pi < 1.0))
            throw std::invalid_argument("lambda1: marginals must lie in (0, 1)");
        const auto [w1, w0] = site_weights(pi, fn);
        num += pi * w1 * (w0 - w1) * (w0 - w1);
        mean_w += (pi * w1 + (1.0 - pi) * w0) / n;
        sum_pw1 += pi * w1;
    }
    const double l2 = num / (4.0 * mean_w * mean_w * sum_pw1);
    return std::sqrt(l2);
}

double lambda2_impl(std::span<const double> p, double beta) {
    if (beta < 0.0) throw std::invalid_argument("lambda2: beta must be >= 0");
    const auto n = static_cast<double>(p.size());
    const double scale = std::pow(n, 2.0 * beta);
    double sum = 0.0;
    for (double pi : p) {
        if (!(pi > 0.0 && pi < 1.0))
            throw std::invalid_argument("lambda2: marginals must lie in (0, 1)");
        sum += scale * (2.0 * pi - 1.0) * (std::log(pi) - std::log1p(-pi));
    }
    return std::sqrt(2.0 / n * sum);
}

}  // namespace

double lambda1(const BernoulliModel& model, WeightFn fn) {
    return lambda1_impl(model.probs(), fn);
}

double lambda2(const BernoulliModel& model, double beta) {
    return lambda2_impl(model.probs(), beta);
}

double lambda1_from_marginals(std::span<const double> marginals, WeightFn fn) {
    return lambda1_impl(marginals, fn);
}

double lambda2_from_marginals(std::span<const double> marginals, double beta) {
    return lambda2_impl(marginals, beta);
}

double theoretical_acceptance(const TheoryCurve& curve, double l) {
    if (!(l > 0.0)) throw std::invalid_argument("theoretical_acceptance: l must be positive");
    const double power = curve.kind == SamplerFamily::Lbp ? 1.5 : 0.5;
    return 2.0 * std_normal_cdf(-0.5 * curve.lambda * std::pow(l, power));
}

double theoretical_efficiency(const TheoryCurve& curve, double l) {
    const double exponent = curve.kind == SamplerFamily::Lbp ? 2.0 / 3.0 : 2.0 * curve.beta;
    return theoretical_acceptance(curve, l) * l * std::pow(curve.dim, exponent);
}

double acceptance_at_scale(const TheoryCurve& curve, double scale) {
    const double exponent = curve.kind == SamplerFamily::Lbp ? 2.0 / 3.0 : 2.0 * curve.beta;
    const double l = scale / std::pow(curve.dim, exponent);
    return theoretical_acceptance(curve, l);
}

namespace {

double optimal_objective(SamplerFamily kind, double z) {
    const double power = kind == SamplerFamily::Lbp ? 1.5 : 0.5;
    return 2.0 * z * std_normal_cdf(-0.5 * std::pow(z, power));
}

}  // namespace

OptimalPoint solve_optimal(SamplerFamily kind) {
    // coarse grid to bracket the maximum (the objective is numerically zero
    // over most of [1e-4, 50], which would defeat golden section ties),
    // then golden-section refinement inside the bracket
    const int grid = 400;
    double best_z = 1e-4, best_f = -1.0;
    for (int i = 0; i <= grid; ++i) {
        const double z = 1e-4 + (50.0 - 1e-4) * i / grid;
        const double f = optimal_objective(kind, z);
        if (f > best_f) {
            best_f = f;
            best_z = z;
        }
    }
    const double span = (50.0 - 1e-4) / grid;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = std::max(1e-4, best_z - span), hi = std::min(50.0, best_z + span);
    double c = hi - gr * (hi - lo);
    double d = lo + gr * (hi - lo);
    double fc = optimal_objective(kind, c);
    double fd = optimal_objective(kind, d);
    while (hi - lo > 1e-9) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = optimal_objective(kind, c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = optimal_objective(kind, d);
        }
    }
    OptimalPoint p;
    p.z_star = 0.5 * (lo + hi);
    const double power = kind == SamplerFamily::Lbp ? 1.5 : 0.5;
    p.a_star = 2.0 * std_normal_cdf(-0.5 * std::pow(p.z_star, power));
    return p;
}

double gaussian_min_exp(double mu, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_min_exp: sigma must be positive");
    const double first = std_normal_cdf(mu / sigma);
    // exp * Phi product evaluated in log space; the product is <= 1
    const double log_second = mu + 0.5 * sigma * sigma + log_std_normal_cdf(-sigma - mu / sigma);
    return first + std::exp(log_second);
}

}  // namespace theory
}  // namespace lbp
