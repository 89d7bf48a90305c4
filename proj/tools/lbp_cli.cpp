#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>

#include "lbp/harness.hpp"
#include "lbp/mnist.hpp"
#include "lbp/oracle.hpp"
#include "lbp/theory.hpp"

namespace {

struct CommonArgs {
    std::string config_file;
    std::vector<std::string> overrides;  // key=value pairs
};

void add_common(CLI::App* app, CommonArgs& args, lbp::ExperimentConfig& cfg) {
    app->add_option("--config", args.config_file, "flat key = value configuration file");
    app->add_option("--set", args.overrides,
                    "override a config entry, e.g. --set model=ising")
        ->type_name("KEY=VALUE");
    app->add_option("--seed", cfg.seed, "master seed");
    app->add_option("--out", cfg.out, "CSV output path");
    app->add_option("--chains", cfg.chains, "chains per setting");
    app->add_option("--steps", cfg.steps, "chain length");
    app->add_option("--burnin", cfg.burnin, "burn-in / warmup steps");
}

// Config file first, explicit flags second, --set overrides last.
lbp::ExperimentConfig resolve_config(const CLI::App* app, const CommonArgs& args,
                                     const lbp::ExperimentConfig& flag_values) {
    lbp::ExperimentConfig cfg;
    if (!args.config_file.empty()) cfg = lbp::parse_config_file(args.config_file);
    auto keep = [&](const char* flag, auto member) {
        if (app->count(flag) > 0) cfg.*member = flag_values.*member;
    };
    keep("--seed", &lbp::ExperimentConfig::seed);
    keep("--out", &lbp::ExperimentConfig::out);
    keep("--chains", &lbp::ExperimentConfig::chains);
    keep("--steps", &lbp::ExperimentConfig::steps);
    keep("--burnin", &lbp::ExperimentConfig::burnin);
    for (const std::string& kv : args.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects KEY=VALUE, got: " + kv);
        lbp::apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::invalid_argument("cannot open output file: " + path);
    return os;
}

void emit_rows(const lbp::ExperimentConfig& cfg,
               const std::vector<lbp::SettingResult>& rows) {
    if (!cfg.out.empty()) {
        auto os = open_out(cfg.out);
        lbp::write_csv_header(os);
        for (const auto& row : rows) lbp::write_csv_row(os, cfg, row);
    } else {
        lbp::write_csv_header(std::cout);
        for (const auto& row : rows) lbp::write_csv_row(std::cout, cfg, row);
    }
}

int cmd_simulate(const lbp::ExperimentConfig& cfg) {
    cfg.validate();
    auto model = lbp::build_model(cfg);
    const lbp::SettingResult row = lbp::run_setting(*model, cfg);
    emit_rows(cfg, {row});
    std::cerr << "simulate: N=" << row.dim << " R=" << row.scale_real
              << " acc=" << row.acc_rate << " ejd=" << row.ejd_rb << " ess=" << row.ess
              << "\n";
    return 0;
}

int cmd_sweep(const lbp::ExperimentConfig& cfg) {
    cfg.validate();
    auto model = lbp::build_model(cfg);
    const auto rows = lbp::sweep(*model, cfg);
    emit_rows(cfg, rows);
    std::cerr << "sweep: " << rows.size() << " target rates\n";
    return 0;
}

int cmd_scaling(lbp::ExperimentConfig cfg) {
    cfg.mode = lbp::RunMode::Scaling;
    cfg.validate();
    const lbp::ScalingResult res = lbp::scaling_study(cfg);
    std::vector<lbp::SettingResult> rows;
    std::cout << "size,lbp_R,lbp_ejd,rwm_R,rwm_ejd\n";
    for (const auto& p : res.points)
        std::cout << p.size << ',' << p.lbp_scale << ',' << p.lbp_ejd << ',' << p.rwm_scale
                  << ',' << p.rwm_ejd << '\n';
    std::cout << "lbp_scale_slope," << res.lbp_scale_slope << '\n'
              << "rwm_scale_slope," << res.rwm_scale_slope << '\n'
              << "efficiency_ratio_slope," << res.efficiency_ratio_slope << '\n';
    if (!cfg.out.empty()) {
        auto os = open_out(cfg.out);
        os << "size,lbp_R,lbp_ejd,rwm_R,rwm_ejd\n";
        for (const auto& p : res.points)
            os << p.size << ',' << p.lbp_scale << ',' << p.lbp_ejd << ',' << p.rwm_scale
               << ',' << p.rwm_ejd << '\n';
    }
    return 0;
}

int cmd_adapt(lbp::ExperimentConfig cfg) {
    cfg.mode = lbp::RunMode::Adaptive;
    cfg.validate();
    auto model = lbp::build_model(cfg);
    const double target = cfg.target_rate > 0.0 ? cfg.target_rate : cfg.default_target_rate();
    const lbp::SettingResult row = lbp::run_adaptive(*model, cfg, target, cfg.seed);
    emit_rows(cfg, {row});
    std::cout << "target_rate=" << target << " frozen_R=" << row.scale_real
              << " realized_rate=" << row.acc_rate << " ejd=" << row.ejd_rb << "\n";
    return 0;
}

int cmd_theory(const lbp::ExperimentConfig& cfg, const std::string& curve_out) {
    using namespace lbp::theory;
    const OptimalPoint lbp_opt = solve_optimal(lbp::SamplerFamily::Lbp);
    const OptimalPoint rwm_opt = solve_optimal(lbp::SamplerFamily::Rwm);
    std::cout << "lbp: z*=" << lbp_opt.z_star << " a*=" << lbp_opt.a_star << "\n";
    std::cout << "rwm: z*=" << rwm_opt.z_star << " a*=" << rwm_opt.a_star << "\n";

    if (cfg.model != "bernoulli") {
        std::cout << "lambda curves are analytic for bernoulli targets only; "
                     "model '" << cfg.model << "' needs estimated marginals\n";
        return 0;
    }
    const lbp::BernoulliModel model = lbp::make_bernoulli(cfg.n, cfg.config, cfg.seed);
    const double l1 = lambda1(model, cfg.weight_fn);
    const double l2 = lambda2(model, 0.0);
    std::cout << "bernoulli " << lbp::to_string(cfg.config) << " N=" << cfg.n
              << " weight_fn=" << lbp::to_string(cfg.weight_fn) << ": lambda1=" << l1
              << " lambda2=" << l2 << "\n";

    if (!curve_out.empty()) {
        auto os = open_out(curve_out);
        os << "kind,l,R,acceptance,efficiency\n";
        const TheoryCurve lbp_curve{lbp::SamplerFamily::Lbp, l1, cfg.n, 0.0};
        const TheoryCurve rwm_curve{lbp::SamplerFamily::Rwm, l2, cfg.n, 0.0};
        for (int i = 1; i <= 200; ++i) {
            const double l = 0.05 * i;
            os << "lbp," << l << ',' << l * std::pow(cfg.n, 2.0 / 3.0) << ','
               << theoretical_acceptance(lbp_curve, l) << ','
               << theoretical_efficiency(lbp_curve, l) << '\n';
            os << "rwm," << l << ',' << l << ','
               << theoretical_acceptance(rwm_curve, l) << ','
               << theoretical_efficiency(rwm_curve, l) << '\n';
        }
    }
    return 0;
}

int cmd_validate(const lbp::ExperimentConfig& cfg) {
    const auto cases = lbp::standard_validation_grid(cfg.seed);
    double worst = 0.0;
    for (const auto& c : cases) {
        const double r = std::max({c.db_residual, c.stationarity_residual, c.row_sum_error});
        worst = std::max(worst, r);
        std::cout << (r < lbp::kOracleTolerance ? "ok   " : "FAIL ") << c.description
                  << "  db=" << c.db_residual << " stat=" << c.stationarity_residual
                  << " rows=" << c.row_sum_error << "\n";
    }
    std::cout << "worst residual: " << worst << " (tolerance " << lbp::kOracleTolerance
              << ", " << cases.size() << " kernels)\n";
    return worst < lbp::kOracleTolerance ? 0 : 2;
}

int cmd_train_rbm(const std::string& idx_file, bool synthetic, int hidden, int epochs,
                  double lr, int limit, std::uint64_t seed, const std::string& out_path) {
    std::vector<std::vector<std::uint8_t>> data;
    if (synthetic) {
        // two-cluster toy set: first half of the bits on, or second half
        lbp::Rng rng = lbp::make_rng(seed, 99);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const int n = 64, samples = 200;
        for (int s = 0; s < samples; ++s) {
            std::vector<std::uint8_t> row(n);
            const bool first = s % 2 == 0;
            for (int i = 0; i < n; ++i) {
                const bool on = first ? i < n / 2 : i >= n / 2;
                row[static_cast<std::size_t>(i)] = (u(rng) < (on ? 0.9 : 0.1)) ? 1 : 0;
            }
            data.push_back(std::move(row));
        }
    } else {
        if (idx_file.empty())
            throw std::invalid_argument("train-rbm: need --idx FILE or --synthetic");
        data = lbp::load_mnist_idx(idx_file);
        if (limit > 0 && static_cast<int>(data.size()) > limit)
            data.resize(static_cast<std::size_t>(limit));
    }
    const lbp::RbmModel model = lbp::train_rbm_cd(data, hidden, epochs, lr, seed);
    lbp::save_rbm(model, out_path);
    std::cout << "trained rbm h=" << model.hidden() << " N=" << model.dim() << " on "
              << data.size() << " rows -> " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Metropolis-Hastings sampling on binary state spaces with locally "
                 "balanced proposals, adaptive scale tuning, and exact small-instance "
                 "verification"};
    app.require_subcommand(1);

    lbp::ExperimentConfig flags;
    CommonArgs common;

    auto* simulate = app.add_subcommand("simulate", "run one setting (fixed or adaptive)");
    add_common(simulate, common, flags);
    auto* sweep_cmd = app.add_subcommand("sweep", "acceptance-rate sweep");
    add_common(sweep_cmd, common, flags);
    auto* scaling = app.add_subcommand("scaling", "optimal-scaling study over sizes");
    add_common(scaling, common, flags);
    auto* adapt = app.add_subcommand("adapt", "adaptive run; report frozen R and rate");
    add_common(adapt, common, flags);

    auto* theory_cmd = app.add_subcommand("theory", "print lambda, optimal constants");
    add_common(theory_cmd, common, flags);
    std::string curve_out;
    theory_cmd->add_option("--curve", curve_out, "write theoretical curves CSV here");

    auto* validate = app.add_subcommand("validate", "exact-kernel oracle checks");
    add_common(validate, common, flags);

    auto* train = app.add_subcommand("train-rbm", "contrastive-divergence RBM training");
    std::string idx_file, weights_out = "rbm.txt";
    bool synthetic = false;
    int hidden = 16, epochs = 5, limit = 0;
    double lr = 0.05;
    std::uint64_t train_seed = 1;
    train->add_option("--idx", idx_file, "IDX image file (MNIST format)");
    train->add_flag("--synthetic", synthetic, "use the built-in two-cluster toy dataset");
    train->add_option("--hidden", hidden, "hidden units");
    train->add_option("--epochs", epochs, "training epochs");
    train->add_option("--lr", lr, "learning rate");
    train->add_option("--limit", limit, "cap the number of training rows");
    train->add_option("--seed", train_seed, "training seed");
    train->add_option("--out", weights_out, "weights file to write");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed())
            return cmd_train_rbm(idx_file, synthetic, hidden, epochs, lr, limit, train_seed,
                                 weights_out);
        const lbp::ExperimentConfig cfg = resolve_config(
            app.get_subcommands().front(), common, flags);
        if (simulate->parsed()) return cmd_simulate(cfg);
        if (sweep_cmd->parsed()) return cmd_sweep(cfg);
        if (scaling->parsed()) return cmd_scaling(cfg);
        if (adapt->parsed()) return cmd_adapt(cfg);
        if (theory_cmd->parsed()) return cmd_theory(cfg, curve_out);
        if (validate->parsed()) return cmd_validate(cfg);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
