#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lbp/adaptive.hpp"
#include "lbp/metrics.hpp"
#include "lbp/models.hpp"
#include "lbp/samplers.hpp"
#include "lbp/theory.hpp"

namespace lbp {

enum class RunMode { Fixed, Adaptive, Sweep, Scaling, Validate };

RunMode parse_run_mode(const std::string& s);
std::string to_string(RunMode m);

// One experiment setting. Every field round-trips through the flat
// `key = value` config file format.
struct ExperimentConfig {
    std::string model = "bernoulli";  // bernoulli | ising | fhmm | rbm
    ConfigLabel config = ConfigLabel::C2;
    int n = 100;                       // bernoulli dimension
    int side = 20;                     // ising lattice side
    int length = 200;                  // fhmm L
    int factors = 5;                   // fhmm K
    std::string rbm_file;              // rbm weights path

    SamplerFamily sampler = SamplerFamily::Lbp;
    WeightFn weight_fn = WeightFn::Barker;
    bool replacement = false;
    bool gradient = false;

    RunMode mode = RunMode::Fixed;
    int scale = 1;                     // fixed-R runs
    double target_rate = -1.0;         // adaptive target; < 0 picks the sampler default
    long steps = 10000;
    long burnin = 5000;
    int chains = 20;
    std::uint64_t seed = 1;
    std::vector<int> sizes = {100, 400, 1600};  // scaling study
    double rate_step = 0.02;           // sweep spacing
    bool timing = true;                // record wall-clock seconds in output
    std::string out;                   // csv path; empty = stdout only

    void validate() const;
    int dimension() const;             // model dimension implied by the fields
    double default_target_rate() const;
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(std::istream& is);
void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value);
void write_config(const ExperimentConfig& cfg, std::ostream& os);

std::unique_ptr<TargetModel> build_model(const ExperimentConfig& cfg);

// Result of one chain group (fixed scale or adaptive), one CSV row.
struct SettingResult {
    std::string mode;
    int dim = 0;
    double target_rate = std::numeric_limits<double>::quiet_NaN();
    double scale_real = 0.0;  // frozen adaptive scale or the fixed scale
    double acc_rate = 0.0;
    double ejd_rb = 0.0;
    double ejd_realized = 0.0;
    double ess = 0.0;
    double seconds = 0.0;
    long steps = 0;
    int chains = 0;
    std::uint64_t seed = 0;
};

// `chains` chains at a frozen real-valued scale (probabilistic rounding per
// step). Chains run concurrently with generators derived from seed + chain
// index; aggregation order is deterministic.
SettingResult run_fixed_scale(const TargetModel& model, const ExperimentConfig& cfg,
                              double scale_real, std::uint64_t seed);

// Adaptive runs: one controller per chain, warmup = burnin, metrics from the
// post-warmup half; reports the mean frozen scale.
SettingResult run_adaptive(const TargetModel& model, const ExperimentConfig& cfg,
                           double target_rate, std::uint64_t seed);

// Convenience single-setting entry (mode fixed or adaptive per cfg).
SettingResult run_setting(const TargetModel& model, const ExperimentConfig& cfg);

// Acceptance-rate sweep: start from the R = 1 acceptance a_max, then target
// rates a_max - k*rate_step down to 0.03; per target, a single-chain
// adaptive run estimates the scale and `chains` chains measure at it.
std::vector<SettingResult> sweep(const TargetModel& model, const ExperimentConfig& cfg);

// Optimal-scaling study over cfg.sizes (bernoulli family): adaptive optimum
// per size for both samplers, plus log-log slopes.
struct ScalingPoint {
    int size = 0;
    double lbp_scale = 0.0, lbp_ejd = 0.0;
    double rwm_scale = 0.0, rwm_ejd = 0.0;
};
struct ScalingResult {
    std::vector<ScalingPoint> points;
    double lbp_scale_slope = 0.0;
    double rwm_scale_slope = 0.0;
    double efficiency_ratio_slope = 0.0;
};
ScalingResult scaling_study(const ExperimentConfig& cfg);

// Least-squares slope of y against x.
double ls_slope(std::span<const double> x, std::span<const double> y);

// CSV emission. Schema is stable:
// sampler,model,config,N,mode,target_rate,R,acc_rate,ejd_rb,ejd_realized,ess,seconds,seed
void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const ExperimentConfig& cfg, const SettingResult& row);

}  // namespace lbp
