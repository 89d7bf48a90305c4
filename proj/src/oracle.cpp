#include "lbp/oracle.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <utility>

namespace lbp {

std::vector<double> exact_target(const TargetModel& model, int max_dim) {
    const int n = model.dim();
    if (n > max_dim)
        throw std::invalid_argument("exact_target: dimension too large for enumeration");
    const std::size_t n_states = std::size_t{1} << n;
    std::vector<double> logp(n_states);
    double max_lp = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < n_states; ++s) {
        logp[s] = model.log_prob(BitState::from_index(s, n));
        max_lp = std::max(max_lp, logp[s]);
    }
    double z = 0.0;
    for (double lp : logp) z += std::exp(lp - max_lp);
    std::vector<double> pi(n_states);
    for (std::size_t s = 0; s < n_states; ++s) pi[s] = std::exp(logp[s] - max_lp) / z;
    return pi;
}

namespace {

// enumerate ordered sequences u_1..u_R and hand each to `visit` with its
// selection log-probability under the configured sampler
void enumerate_sequences(const TargetModel& model, const BitState& x,
                         const KernelConfig& config,
                         const std::function<void(const std::vector<int>&, double)>& visit) {
    const int n = model.dim();
    const int r_total = config.scale;
    std::vector<int> u;
    u.reserve(static_cast<std::size_t>(r_total));

    if (config.sampler == SamplerFamily::Rwm) {
        // unordered R-subsets, uniform
        double log_comb = 0.0;
        for (int i = 0; i < r_total; ++i)
            log_comb += std::log(static_cast<double>(n - i) / static_cast<double>(i + 1));
        const double log_q = -log_comb;
        std::function<void(int)> rec = [&](int first) {
            if (static_cast<int>(u.size()) == r_total) {
                visit(u, log_q);
                return;
            }
            for (int i = first; i < n; ++i) {
                u.push_back(i);
                rec(i + 1);
                u.pop_back();
            }
        };
        rec(0);
        return;
    }

    // LBP: ordered sequences; the selection probability comes from the
    // production evaluation, so recursion only enumerates the index tuples.
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    std::function<void()> rec = [&]() {
        if (static_cast<int>(u.size()) == r_total) {
            const auto ev = evaluate_lbp_proposal(model, x, u, config.lbp);
            visit(u, ev.log_q_forward);
            return;
        }
        for (int i = 0; i < n; ++i) {
            if (!config.lbp.with_replacement && used[static_cast<std::size_t>(i)]) continue;
            used[static_cast<std::size_t>(i)] = 1;
            u.push_back(i);
            rec();
            u.pop_back();
            used[static_cast<std::size_t>(i)] = 0;
        }
    };
    rec();
}

ExactKernel build_kernel(const TargetModel& model, const KernelConfig& config,
                         const AcceptFn* custom_accept) {
    const int n = model.dim();
    if (n > 10) throw std::invalid_argument("exact_kernel: dimension must be <= 10");
    if (config.scale < 1 || config.scale > 3)
        throw std::invalid_argument("exact_kernel: scale must lie in [1, 3]");
    if (config.sampler == SamplerFamily::Lbp && !config.lbp.with_replacement &&
        config.scale > n)
        throw std::invalid_argument("exact_kernel: scale exceeds dimension");
    if (config.sampler == SamplerFamily::Rwm && config.scale > n)
        throw std::invalid_argument("exact_kernel: scale exceeds dimension");

    ExactKernel kernel;
    kernel.sites = n;
    kernel.n_states = std::size_t{1} << n;
    kernel.pi = exact_target(model);
    kernel.p.assign(kernel.n_states * kernel.n_states, 0.0);

    BitState scratch;
    for (std::size_t s = 0; s < kernel.n_states; ++s) {
        const BitState x = BitState::from_index(s, n);
        enumerate_sequences(model, x, config, [&](const std::vector<int>& u, double log_q) {
            const double q = std::exp(log_q);
            double accept = 0.0;
            std::uint64_t to = 0;
            if (config.sampler == SamplerFamily::Rwm) {
                const double dlogpi = model.log_ratio_for_flips(x, u, scratch);
                accept = std::min(1.0, std::exp(dlogpi));
                to = scratch.to_index();
            } else {
                const auto ev = evaluate_lbp_proposal(model, x, u, config.lbp);
                accept = ev.accept_prob;
                to = ev.proposed.to_index();
            }
            if (custom_accept) {
                BitState y = x;
                for (int idx : u) y.flip(idx);
                accept = (*custom_accept)(x, u, y);
                to = y.to_index();
            }
            kernel.at(s, to) += q * accept;
            kernel.at(s, s) += q * (1.0 - accept);
        });
    }
    return kernel;
}

}  // namespace

ExactKernel exact_kernel(const TargetModel& model, const KernelConfig& config) {
    return build_kernel(model, config, nullptr);
}

ExactKernel exact_kernel_custom(const TargetModel& model, const KernelConfig& config,
                                const AcceptFn& accept) {
    return build_kernel(model, config, &accept);
}

double check_detailed_balance(const ExactKernel& kernel) {
    double worst = 0.0;
    for (std::size_t a = 0; a < kernel.n_states; ++a)
        for (std::size_t b = a + 1; b < kernel.n_states; ++b)
            worst = std::max(worst,
                             std::abs(kernel.pi[a] * kernel.at(a, b) -
                                      kernel.pi[b] * kernel.at(b, a)));
    return worst;
}

double check_stationarity(const ExactKernel& kernel) {
    double worst = 0.0;
    for (std::size_t b = 0; b < kernel.n_states; ++b) {
        double mass = 0.0;
        for (std::size_t a = 0; a < kernel.n_states; ++a)
            mass += kernel.pi[a] * kernel.at(a, b);
        worst = std::max(worst, std::abs(mass - kernel.pi[b]));
    }
    return worst;
}

double max_row_sum_error(const ExactKernel& kernel) {
    double worst = 0.0;
    for (std::size_t a = 0; a < kernel.n_states; ++a) {
        double row = 0.0;
        for (std::size_t b = 0; b < kernel.n_states; ++b) row += kernel.at(a, b);
        worst = std::max(worst, std::abs(row - 1.0));
    }
    return worst;
}

namespace {

RbmModel make_toy_rbm(int visible, int hidden, std::uint64_t seed) {
    Rng rng = make_rng(seed, 17);
    std::normal_distribution<double> gauss(0.0, 0.8);
    std::vector<double> w(static_cast<std::size_t>(hidden) * static_cast<std::size_t>(visible));
    for (double& v : w) v = gauss(rng);
    std::vector<double> b(static_cast<std::size_t>(visible));
    for (double& v : b) v = gauss(rng);
    std::vector<double> c(static_cast<std::size_t>(hidden));
    for (double& v : c) v = gauss(rng);
    return RbmModel(hidden, visible, std::move(w), std::move(b), std::move(c));
}

}  // namespace

std::vector<ValidationCase> standard_validation_grid(std::uint64_t seed) {
    std::vector<std::pair<std::string, std::unique_ptr<TargetModel>>> models;
    for (int n : {4, 5, 6})
        models.emplace_back("bernoulli-C2-n" + std::to_string(n),
                            std::make_unique<BernoulliModel>(
                                make_bernoulli(n, ConfigLabel::C2, seed)));
    models.emplace_back("ising-C2-side2",
                        std::make_unique<IsingModel>(make_ising(2, ConfigLabel::C2, seed)));
    models.emplace_back("fhmm-C2-L2K2", std::make_unique<FhmmModel>(
                                            make_fhmm(2, 2, ConfigLabel::C2, seed)));
    models.emplace_back("fhmm-C2-L3K2", std::make_unique<FhmmModel>(
                                            make_fhmm(3, 2, ConfigLabel::C2, seed)));
    models.emplace_back("rbm-n5h3", std::make_unique<RbmModel>(make_toy_rbm(5, 3, seed)));

    std::vector<ValidationCase> cases;
    auto run = [&](const std::string& name, const TargetModel& model, const KernelConfig& kc) {
        const ExactKernel kernel = exact_kernel(model, kc);
        ValidationCase vc;
        vc.description = name;
        vc.db_residual = check_detailed_balance(kernel);
        vc.stationarity_residual = check_stationarity(kernel);
        vc.row_sum_error = max_row_sum_error(kernel);
        cases.push_back(vc);
    };

    for (const auto& [model_name, model] : models) {
        for (int scale = 1; scale <= 3; ++scale) {
            KernelConfig kc;
            kc.sampler = SamplerFamily::Rwm;
            kc.scale = scale;
            run(model_name + "/rwm-" + std::to_string(scale), *model, kc);

            for (bool replacement : {false, true}) {
                for (WeightFn fn : {WeightFn::Sqrt, WeightFn::Barker}) {
                    KernelConfig lc;
                    lc.sampler = SamplerFamily::Lbp;
                    lc.scale = scale;
                    lc.lbp = LbpOptions{fn, replacement, false};
                    run(model_name + "/" + (replacement ? "gwg" : "lbp") + "-" +
                            std::to_string(scale) + "-" + to_string(fn),
                        *model, lc);
                }
            }
            // gradient-surrogate weights; the M-H test must keep the kernel
            // in detailed balance for any weight choice
            KernelConfig gc;
            gc.sampler = SamplerFamily::Lbp;
            gc.scale = scale;
            gc.lbp = LbpOptions{WeightFn::Barker, false, true};
            run(model_name + "/lbp-" + std::to_string(scale) + "-barker-grad", *model, gc);
        }
    }
    return cases;
}

}  // namespace lbp
