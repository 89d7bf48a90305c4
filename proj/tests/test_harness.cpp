#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "lbp/harness.hpp"
#include "lbp/mnist.hpp"

using namespace lbp;

namespace {

std::string temp_path(const std::string& name) {
    return std::string("/tmp/lbp_test_") + name;
}

void write_bytes(const std::string& path, const std::vector<unsigned char>& bytes) {
    std::ofstream os(path, std::ios::binary);
    os.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
}

void push_be32(std::vector<unsigned char>& bytes, std::uint32_t v) {
    bytes.push_back(static_cast<unsigned char>(v >> 24));
    bytes.push_back(static_cast<unsigned char>(v >> 16));
    bytes.push_back(static_cast<unsigned char>(v >> 8));
    bytes.push_back(static_cast<unsigned char>(v));
}

}  // namespace

TEST_CASE("config file round-trips every field") {
    ExperimentConfig cfg;
    cfg.model = "ising";
    cfg.config = ConfigLabel::C3;
    cfg.n = 123;
    cfg.side = 7;
    cfg.length = 31;
    cfg.factors = 4;
    cfg.rbm_file = "weights.txt";
    cfg.sampler = SamplerFamily::Rwm;
    cfg.weight_fn = WeightFn::Sqrt;
    cfg.replacement = true;
    cfg.gradient = true;
    cfg.mode = RunMode::Sweep;
    cfg.scale = 9;
    cfg.target_rate = 0.41;
    cfg.steps = 2222;
    cfg.burnin = 555;
    cfg.chains = 3;
    cfg.seed = 987654321;
    cfg.sizes = {64, 256, 1024};
    cfg.rate_step = 0.05;
    cfg.timing = false;
    cfg.out = "rows.csv";

    std::stringstream ss;
    write_config(cfg, ss);
    const ExperimentConfig back = parse_config_text(ss);
    CHECK(back.model == cfg.model);
    CHECK(back.config == cfg.config);
    CHECK(back.n == cfg.n);
    CHECK(back.side == cfg.side);
    CHECK(back.length == cfg.length);
    CHECK(back.factors == cfg.factors);
    CHECK(back.rbm_file == cfg.rbm_file);
    CHECK(back.sampler == cfg.sampler);
    CHECK(back.weight_fn == cfg.weight_fn);
    CHECK(back.replacement == cfg.replacement);
    CHECK(back.gradient == cfg.gradient);
    CHECK(back.mode == cfg.mode);
    CHECK(back.scale == cfg.scale);
    CHECK(back.target_rate == cfg.target_rate);
    CHECK(back.steps == cfg.steps);
    CHECK(back.burnin == cfg.burnin);
    CHECK(back.chains == cfg.chains);
    CHECK(back.seed == cfg.seed);
    CHECK(back.sizes == cfg.sizes);
    CHECK(back.rate_step == cfg.rate_step);
    CHECK(back.timing == cfg.timing);
    CHECK(back.out == cfg.out);
}

TEST_CASE("config parser reports the offending key") {
    std::stringstream unknown("model = bernoulli\nbogus_key = 3\n");
    CHECK_THROWS_WITH_AS(parse_config_text(unknown),
                         doctest::Contains("unknown key 'bogus_key'"),
                         std::invalid_argument);

    std::stringstream bad_value("steps = twelve\n");
    CHECK_THROWS_WITH_AS(parse_config_text(bad_value), doctest::Contains("'steps'"),
                         std::invalid_argument);

    std::stringstream with_comments("# a comment\n  \nmodel = fhmm # trailing\n");
    CHECK(parse_config_text(with_comments).model == "fhmm");
}

TEST_CASE("config validation rejects inconsistent settings") {
    ExperimentConfig cfg;
    cfg.burnin = cfg.steps;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("'burnin'"),
                         std::invalid_argument);

    ExperimentConfig rbm;
    rbm.model = "rbm";
    CHECK_THROWS_WITH_AS(rbm.validate(), doctest::Contains("'rbm_file'"),
                         std::invalid_argument);

    ExperimentConfig bad_model;
    bad_model.model = "gaussian";
    CHECK_THROWS_AS(bad_model.validate(), std::invalid_argument);
}

TEST_CASE("idx loader: fixture, thresholds, error paths") {
    std::vector<unsigned char> bytes;
    push_be32(bytes, 0x00000803);
    push_be32(bytes, 4);  // images
    push_be32(bytes, 2);  // rows
    push_be32(bytes, 2);  // cols
    // one image per threshold case: 200 -> 1, 100 -> 0, 128 -> 1, 127 -> 0
    for (int img = 0; img < 4; ++img)
        for (int px = 0; px < 4; ++px)
            bytes.push_back(static_cast<unsigned char>(img == 0   ? 200
                                                       : img == 1 ? 100
                                                       : img == 2 ? 128
                                                                  : 127));
    const std::string path = temp_path("images.idx");
    write_bytes(path, bytes);

    const auto images = load_mnist_idx(path);
    REQUIRE(images.size() == 4);
    for (const auto& row : images) CHECK(row.size() == 4);
    CHECK(images[0][0] == 1);  // 200/255 > 0.5
    CHECK(images[1][0] == 0);  // 100/255 < 0.5
    CHECK(images[2][0] == 1);  // 128/255 just above
    CHECK(images[3][0] == 0);  // 127/255 just below

    bytes.resize(bytes.size() - 3);  // truncate
    write_bytes(path, bytes);
    CHECK_THROWS_WITH_AS(load_mnist_idx(path), doctest::Contains("truncated"),
                         std::runtime_error);

    std::vector<unsigned char> wrong;
    push_be32(wrong, 0x00000801);
    write_bytes(path, wrong);
    CHECK_THROWS_WITH_AS(load_mnist_idx(path), doctest::Contains("magic"),
                         std::runtime_error);

    std::vector<unsigned char> labels;
    push_be32(labels, 0x00000801);
    push_be32(labels, 3);
    labels.insert(labels.end(), {7, 1, 2});
    write_bytes(path, labels);
    const auto parsed = load_mnist_labels(path);
    CHECK(parsed == std::vector<std::uint8_t>{7, 1, 2});

    std::remove(path.c_str());
}

TEST_CASE("uniform target rwm-1 accepts everything") {
    ExperimentConfig cfg;
    cfg.model = "bernoulli";
    cfg.sampler = SamplerFamily::Rwm;
    cfg.steps = 1000;
    cfg.burnin = 200;
    cfg.chains = 2;
    cfg.timing = false;
    const BernoulliModel uniform(std::vector<double>(30, 0.5));
    const SettingResult res = run_fixed_scale(uniform, cfg, 1.0, cfg.seed);
    CHECK(res.acc_rate == 1.0);
    CHECK(res.ejd_rb == doctest::Approx(1.0));
}

TEST_CASE("identical config and seed produce identical csv bytes") {
    ExperimentConfig cfg;
    cfg.model = "bernoulli";
    cfg.n = 40;
    cfg.config = ConfigLabel::C2;
    cfg.sampler = SamplerFamily::Lbp;
    cfg.steps = 600;
    cfg.burnin = 200;
    cfg.chains = 3;
    cfg.scale = 2;
    cfg.timing = false;  // seconds column pinned to zero

    auto render = [&]() {
        auto model = build_model(cfg);
        const SettingResult row = run_setting(*model, cfg);
        std::stringstream ss;
        write_csv_header(ss);
        write_csv_row(ss, cfg, row);
        return ss.str();
    };
    const std::string first = render();
    const std::string second = render();
    CHECK(first == second);
    CHECK(first.substr(0, first.find('\n')) ==
          "sampler,model,config,N,mode,target_rate,R,acc_rate,ejd_rb,ejd_realized,ess,"
          "seconds,seed");
}

TEST_CASE("adaptive runs converge to the target acceptance rate") {
    for (ConfigLabel label : {ConfigLabel::C1, ConfigLabel::C2, ConfigLabel::C3}) {
        CAPTURE(to_string(label));
        ExperimentConfig cfg;
        cfg.model = "bernoulli";
        cfg.n = 100;
        cfg.config = label;
        cfg.sampler = SamplerFamily::Lbp;
        cfg.steps = 6000;
        cfg.burnin = 3000;
        cfg.chains = 2;
        cfg.timing = false;
        auto model = build_model(cfg);
        const SettingResult res = run_adaptive(*model, cfg, 0.574, cfg.seed);
        CHECK(res.acc_rate > 0.574 - 0.05);
        CHECK(res.acc_rate < 0.574 + 0.05);
        CHECK(res.scale_real >= 1.0);
        CHECK(res.scale_real <= 100.0);
    }
}

TEST_CASE("sweep rows are monotone in target rate with valid scales") {
    ExperimentConfig cfg;
    cfg.model = "bernoulli";
    cfg.n = 30;
    cfg.config = ConfigLabel::C3;
    cfg.sampler = SamplerFamily::Rwm;
    cfg.steps = 800;
    cfg.burnin = 300;
    cfg.chains = 2;
    cfg.rate_step = 0.1;  // coarse grid keeps the test quick
    cfg.timing = false;
    auto model = build_model(cfg);
    const auto rows = sweep(*model, cfg);
    REQUIRE(rows.size() >= 3);
    for (std::size_t i = 1; i < rows.size(); ++i)
        CHECK(rows[i].target_rate < rows[i - 1].target_rate);
    for (const auto& row : rows) {
        CHECK(row.scale_real >= 1.0);
        CHECK(row.scale_real <= 30.0);
        CHECK(row.acc_rate >= 0.0);
        CHECK(row.acc_rate <= 1.0);
        CHECK(row.mode == "sweep");
    }
}

TEST_CASE("build_model covers every family and loads rbm weights from disk") {
    ExperimentConfig cfg;
    cfg.model = "ising";
    cfg.side = 4;
    CHECK(build_model(cfg)->dim() == 16);
    cfg.model = "fhmm";
    cfg.length = 5;
    cfg.factors = 3;
    CHECK(build_model(cfg)->dim() == 15);
    cfg.model = "bernoulli";
    cfg.n = 12;
    CHECK(build_model(cfg)->dim() == 12);

    const std::string path = temp_path("weights.rbm");
    std::vector<std::vector<std::uint8_t>> data(30, std::vector<std::uint8_t>(6, 0));
    for (auto& row : data)
        for (std::size_t i = 0; i < 3; ++i) row[i] = 1;
    const RbmModel trained = train_rbm_cd(data, 3, 2, 0.1, 9);
    save_rbm(trained, path);

    cfg.model = "rbm";
    cfg.rbm_file = path;
    auto loaded = build_model(cfg);
    CHECK(loaded->dim() == 6);
    // file round-trip preserves the distribution exactly
    const BitState probe = BitState::from_bits({1, 0, 1, 1, 0, 0});
    CHECK(loaded->log_prob(probe) == trained.log_prob(probe));
    std::remove(path.c_str());
}

TEST_CASE("least-squares slope on an exact line") {
    const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
    const std::vector<double> y{1.0, 1.5, 2.0, 2.5};
    CHECK(ls_slope(x, y) == doctest::Approx(0.5).epsilon(1e-12));
}
