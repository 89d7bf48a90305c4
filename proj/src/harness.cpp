#include "lbp/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <ostream>

namespace lbp {

std::unique_ptr<TargetModel> build_model(const ExperimentConfig& cfg) {
    if (cfg.model == "bernoulli")
        return std::make_unique<BernoulliModel>(make_bernoulli(cfg.n, cfg.config, cfg.seed));
    if (cfg.model == "ising")
        return std::make_unique<IsingModel>(make_ising(cfg.side, cfg.config, cfg.seed));
    if (cfg.model == "fhmm")
        return std::make_unique<FhmmModel>(
            make_fhmm(cfg.length, cfg.factors, cfg.config, cfg.seed));
    if (cfg.model == "rbm") return std::make_unique<RbmModel>(load_rbm(cfg.rbm_file));
    throw std::invalid_argument("config: invalid value for 'model': " + cfg.model);
}

namespace {

struct ChainOutput {
    ChainStats stats;
    double frozen_scale = 0.0;
};

// One chain: fixed scale == controller frozen from step 0; adaptive ==
// warmup over the burn-in half, frozen thereafter. Metrics accumulate over
// the post-burn-in steps only.
ChainOutput run_one_chain(const TargetModel& model, const ExperimentConfig& cfg,
                          bool adaptive, double scale_or_target, std::uint64_t seed_base,
                          std::uint64_t stream) {
    Rng rng = make_rng(seed_base, stream);
    const int n = model.dim();

    BitState x(n);
    for (int i = 0; i < n; ++i) x.set(i, uniform01(rng) < 0.5 ? 1 : 0);

    const double target = adaptive ? scale_or_target : cfg.default_target_rate();
    const double init_scale = adaptive ? 1.0 : scale_or_target;
    const long warmup = adaptive ? cfg.burnin : 0;
    ScaleController ctl(init_scale, target, warmup, n);

    ChainOutput out;
    LbpOptions opts{cfg.weight_fn, cfg.replacement, cfg.gradient};
    auto loop = [&](auto& sampler) {
        for (long t = 0; t < cfg.steps; ++t) {
            const int scale = ctl.round_scale(rng);
            const StepResult res = sampler.step(scale, rng);
            ctl.adapt(res.accept_prob);
            if (t >= cfg.burnin) out.stats.record(res, sampler.state_log_prob());
        }
    };
    if (cfg.sampler == SamplerFamily::Lbp) {
        LbpSampler sampler(model, std::move(x), opts);
        loop(sampler);
    } else {
        RwmSampler sampler(model, std::move(x));
        loop(sampler);
    }
    out.frozen_scale = ctl.scale_real();
    return out;
}

SettingResult run_group(const TargetModel& model, const ExperimentConfig& cfg, bool adaptive,
                        double scale_or_target, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::future<ChainOutput>> futures;
    futures.reserve(static_cast<std::size_t>(cfg.chains));
    for (int c = 0; c < cfg.chains; ++c)
        futures.push_back(std::async(std::launch::async, [&, c] {
            return run_one_chain(model, cfg, adaptive, scale_or_target, seed,
                                 static_cast<std::uint64_t>(c) + 1);
        }));
    std::vector<ChainOutput> outputs;
    outputs.reserve(futures.size());
    for (auto& f : futures) outputs.push_back(f.get());
    const auto t1 = std::chrono::steady_clock::now();

    std::vector<ChainStats> stats;
    double scale_sum = 0.0;
    for (const auto& o : outputs) {
        stats.push_back(o.stats);
        scale_sum += o.frozen_scale;
    }
    const MergedStats merged = merge(stats);

    SettingResult res;
    res.mode = adaptive ? "adaptive" : "fixed";
    res.dim = model.dim();
    res.target_rate = adaptive ? scale_or_target : std::numeric_limits<double>::quiet_NaN();
    res.scale_real = adaptive ? scale_sum / cfg.chains : scale_or_target;
    res.acc_rate = merged.mean_accept;
    res.ejd_rb = merged.ejd_rb;
    res.ejd_realized = merged.ejd_realized;
    res.ess = merged.mean_ess;
    res.seconds = cfg.timing ? std::chrono::duration<double>(t1 - t0).count() : 0.0;
    res.steps = cfg.steps;
    res.chains = cfg.chains;
    res.seed = seed;
    return res;
}

// frozen scale of a single-chain adaptive run of `burnin` warmup steps
double estimate_scale(const TargetModel& model, const ExperimentConfig& cfg,
                      double target_rate, std::uint64_t seed) {
    ExperimentConfig est = cfg;
    est.steps = std::max<long>(cfg.burnin, 1);
    est.burnin = est.steps;  // all warmup; no metrics wanted
    return run_one_chain(model, est, true, target_rate, seed, 1).frozen_scale;
}

}  // namespace

SettingResult run_fixed_scale(const TargetModel& model, const ExperimentConfig& cfg,
                              double scale_real, std::uint64_t seed) {
    return run_group(model, cfg, false, scale_real, seed);
}

SettingResult run_adaptive(const TargetModel& model, const ExperimentConfig& cfg,
                           double target_rate, std::uint64_t seed) {
    return run_group(model, cfg, true, target_rate, seed);
}

SettingResult run_setting(const TargetModel& model, const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.mode == RunMode::Adaptive) {
        const double target =
            cfg.target_rate > 0.0 ? cfg.target_rate : cfg.default_target_rate();
        return run_adaptive(model, cfg, target, cfg.seed);
    }
    return run_fixed_scale(model, cfg, static_cast<double>(cfg.scale), cfg.seed);
}

std::vector<SettingResult> sweep(const TargetModel& model, const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<SettingResult> rows;

    SettingResult base = run_fixed_scale(model, cfg, 1.0, cfg.seed);
    base.mode = "sweep";
    const double a_max = base.acc_rate;
    base.target_rate = a_max;
    rows.push_back(base);

    for (int k = 1;; ++k) {
        const double target = a_max - cfg.rate_step * k;
        if (target < 0.03) break;
        const std::uint64_t row_seed = cfg.seed + 1000003ull * static_cast<std::uint64_t>(k);
        const double scale = estimate_scale(model, cfg, target, row_seed);
        SettingResult row = run_fixed_scale(model, cfg, scale, row_seed);
        row.mode = "sweep";
        row.target_rate = target;
        rows.push_back(row);
    }
    return rows;
}

double ls_slope(std::span<const double> x, std::span<const double> y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

ScalingResult scaling_study(const ExperimentConfig& cfg) {
    if (cfg.sizes.size() < 3)
        throw std::invalid_argument("scaling study needs at least 3 sizes");
    ScalingResult result;
    for (int size : cfg.sizes) {
        ExperimentConfig sub = cfg;
        sub.n = size;
        sub.side = size;
        sub.length = size;
        ScalingPoint point;
        point.size = size;

        sub.sampler = SamplerFamily::Lbp;
        auto model = build_model(sub);
        SettingResult lbp = run_adaptive(*model, sub, ScaleController::kLbpTargetRate, sub.seed);
        point.lbp_scale = lbp.scale_real;
        point.lbp_ejd = lbp.ejd_rb;

        sub.sampler = SamplerFamily::Rwm;
        SettingResult rwm = run_adaptive(*model, sub, ScaleController::kRwmTargetRate, sub.seed);
        point.rwm_scale = rwm.scale_real;
        point.rwm_ejd = rwm.ejd_rb;

        result.points.push_back(point);
    }
    std::vector<double> log_n, log_lbp_r, log_rwm_r, log_ratio;
    for (const auto& p : result.points) {
        log_n.push_back(std::log(p.size));
        log_lbp_r.push_back(std::log(p.lbp_scale));
        log_rwm_r.push_back(std::log(p.rwm_scale));
        log_ratio.push_back(std::log(p.lbp_ejd / p.rwm_ejd));
    }
    result.lbp_scale_slope = ls_slope(log_n, log_lbp_r);
    result.rwm_scale_slope = ls_slope(log_n, log_rwm_r);
    result.efficiency_ratio_slope = ls_slope(log_n, log_ratio);
    return result;
}

void write_csv_header(std::ostream& os) {
    os << "sampler,model,config,N,mode,target_rate,R,acc_rate,ejd_rb,ejd_realized,ess,"
          "seconds,seed\n";
}

void write_csv_row(std::ostream& os, const ExperimentConfig& cfg, const SettingResult& row) {
    char buf[64];
    auto num = [&](double v, const char* fmt) {
        if (std::isnan(v)) return std::string("nan");
        std::snprintf(buf, sizeof buf, fmt, v);
        return std::string(buf);
    };
    os << to_string(cfg.sampler) << ',' << cfg.model << ',' << to_string(cfg.config) << ','
       << row.dim << ',' << row.mode << ',' << num(row.target_rate, "%.6g") << ','
       << num(row.scale_real, "%.6g") << ',' << num(row.acc_rate, "%.6g") << ','
       << num(row.ejd_rb, "%.6g") << ',' << num(row.ejd_realized, "%.6g") << ','
       << num(row.ess, "%.6g") << ',' << num(row.seconds, "%.3f") << ',' << row.seed << '\n';
}

}  // namespace lbp
