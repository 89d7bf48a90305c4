#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lbp/models.hpp"
#include "lbp/samplers.hpp"
#include "test_util.hpp"

using namespace lbp;
using test_util::random_state;

TEST_CASE("locally balanced identity g(t) = t g(1/t) on a log grid") {
    for (WeightFn fn : {WeightFn::Sqrt, WeightFn::Barker}) {
        for (double log_t = std::log(1e-6); log_t <= std::log(1e6) + 1e-9;
             log_t += std::log(10.0) / 2.0) {
            const double lhs = log_weight(fn, log_t);
            const double rhs = log_t + log_weight(fn, -log_t);
            CHECK(std::abs(lhs - rhs) < 1e-12);
        }
    }
}

TEST_CASE("weight values at simple ratios") {
    CHECK(std::exp(log_weight(WeightFn::Sqrt, 0.0)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::exp(log_weight(WeightFn::Barker, 0.0)) == doctest::Approx(0.5).epsilon(1e-14));
    // Bernoulli site with p = 0.8: w(1) = g(0.25), w(0) = g(4)
    const double logit = std::log(0.8 / 0.2);
    CHECK(std::exp(log_weight(WeightFn::Barker, -logit)) ==
          doctest::Approx(0.2).epsilon(1e-12));
    CHECK(std::exp(log_weight(WeightFn::Barker, logit)) ==
          doctest::Approx(0.8).epsilon(1e-12));
    CHECK(std::exp(log_weight(WeightFn::Sqrt, logit)) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("gradient site deltas equal exact ones on bernoulli") {
    const BernoulliModel model = make_bernoulli(40, ConfigLabel::C3, 6);
    Rng rng = make_rng(5);
    const BitState x = random_state(40, rng);
    std::vector<double> exact(40), grad(40);
    site_deltas(model, x, false, exact);
    site_deltas(model, x, true, grad);
    for (int i = 0; i < 40; ++i)
        CHECK(std::abs(exact[static_cast<std::size_t>(i)] -
                       grad[static_cast<std::size_t>(i)]) < 1e-12);
}

TEST_CASE("locally balanced cancellation on product targets") {
    // log pi(y) - log pi(x) + sum_r [log w_u(y) - log w_u(x)] = 0
    Rng rng = make_rng(42);
    for (WeightFn fn : {WeightFn::Sqrt, WeightFn::Barker}) {
        for (int rep = 0; rep < 20; ++rep) {
            const int n = 6 + rep % 5;
            const BernoulliModel model = make_bernoulli(n, ConfigLabel::C3, 100 + rep);
            const BitState x = random_state(n, rng);
            std::vector<int> u;
            for (int i = 0; i < n; ++i)
                if (uniform01(rng) < 0.5) u.push_back(i);
            if (u.empty()) u.push_back(0);

            BitState y = x;
            for (int i : u) y.flip(i);
            std::vector<double> dx(static_cast<std::size_t>(n)), dy(static_cast<std::size_t>(n));
            site_deltas(model, x, false, dx);
            site_deltas(model, y, false, dy);
            double acc = model.log_prob(y) - model.log_prob(x);
            for (int i : u)
                acc += log_weight(fn, dy[static_cast<std::size_t>(i)]) -
                       log_weight(fn, dx[static_cast<std::size_t>(i)]);
            CHECK(std::abs(acc) < 1e-10);
        }
    }
}

TEST_CASE("sequential selection probability on a worked example") {
    // weights (2, 1), complement mass 3: P(pick 0 then 1) = 2/6 * 1/4
    const std::vector<double> v{2.0, 1.0};
    CHECK(std::exp(seq_selection_log_prob(v, 3.0)) ==
          doctest::Approx(2.0 / 6.0 * 1.0 / 4.0).epsilon(1e-12));
    CHECK(std::exp(iid_selection_log_prob(v, 6.0)) ==
          doctest::Approx(2.0 / 6.0 * 1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("uniform target accepts every lbp proposal") {
    const BernoulliModel model(std::vector<double>(12, 0.5));
    Rng rng = make_rng(3);
    for (bool replacement : {false, true}) {
        for (int scale : {1, 3, 7, 12}) {
            LbpOptions opts{WeightFn::Barker, replacement, false};
            const BitState x = random_state(12, rng);
            const ProposalOutcome out = lbp_step(model, x, scale, opts, rng);
            CHECK(out.accept_prob == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("selection probabilities over all ordered sequences sum to one") {
    const BernoulliModel model = make_bernoulli(5, ConfigLabel::C3, 9);
    Rng rng = make_rng(8);
    const BitState x = random_state(5, rng);
    for (bool replacement : {false, true}) {
        LbpOptions opts{WeightFn::Sqrt, replacement, false};
        double total = 0.0;
        std::vector<int> u(2);
        for (int a = 0; a < 5; ++a) {
            for (int b = 0; b < 5; ++b) {
                if (!replacement && a == b) continue;
                u[0] = a;
                u[1] = b;
                total += std::exp(evaluate_lbp_proposal(model, x, u, opts).log_q_forward);
            }
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("lbp steps keep state on reject and flip exactly jump_distance bits") {
    const IsingModel model = make_ising(4, ConfigLabel::C3, 17);
    Rng rng = make_rng(4);
    LbpOptions opts{WeightFn::Barker, false, false};
    LbpSampler sampler(model, random_state(model.dim(), rng), opts);
    int accepted = 0, rejected = 0;
    for (int t = 0; t < 400; ++t) {
        const BitState before = sampler.state();
        const StepResult res = sampler.step(1 + t % 5, rng);
        CHECK(res.accept_prob >= 0.0);
        CHECK(res.accept_prob <= 1.0);
        if (res.accepted) {
            ++accepted;
            CHECK(before.hamming_distance(sampler.state()) == res.jump_distance);
            CHECK(res.jump_distance == res.scale);  // without replacement
        } else {
            ++rejected;
            CHECK(before == sampler.state());
        }
        // no duplicate selections without replacement
        auto picked = sampler.last_picked();
        std::sort(picked.begin(), picked.end());
        CHECK(std::adjacent_find(picked.begin(), picked.end()) == picked.end());
        // cached log-probability stays exact
        CHECK(sampler.state_log_prob() ==
              doctest::Approx(model.log_prob(sampler.state())).epsilon(1e-10));
    }
    CHECK(accepted > 0);
    CHECK(rejected > 0);
}

TEST_CASE("with-replacement flips use xor semantics") {
    const BernoulliModel model = make_bernoulli(6, ConfigLabel::C2, 23);
    Rng rng = make_rng(29);
    LbpOptions opts{WeightFn::Barker, true, false};
    bool saw_cancellation = false;
    for (int t = 0; t < 300; ++t) {
        const BitState x = random_state(6, rng);
        const ProposalOutcome out = lbp_step(model, x, 4, opts, rng);
        std::vector<int> odd;
        for (int idx : out.picked) {
            auto it = std::find(odd.begin(), odd.end(), idx);
            if (it == odd.end())
                odd.push_back(idx);
            else
                odd.erase(it);
        }
        CHECK(out.jump_distance == static_cast<int>(odd.size()));
        CHECK(x.hamming_distance(out.proposed) == out.jump_distance);
        if (out.jump_distance < 4) saw_cancellation = true;
    }
    CHECK(saw_cancellation);
}

TEST_CASE("rwm acceptance on one- and two-state examples") {
    // single site p = 0.8, x = 1: accept prob = 0.25
    const BernoulliModel model({0.8});
    Rng rng = make_rng(1);
    const ProposalOutcome down = rwm_step(model, BitState::from_bits({1}), 1, rng);
    CHECK(down.accept_prob == doctest::Approx(0.25).epsilon(1e-12));
    const ProposalOutcome up = rwm_step(model, BitState::from_bits({0}), 1, rng);
    CHECK(up.accept_prob == doctest::Approx(1.0).epsilon(1e-12));

    const BernoulliModel uniform(std::vector<double>(8, 0.5));
    RwmSampler sampler(uniform, random_state(8, rng));
    for (int t = 0; t < 50; ++t) {
        const StepResult res = sampler.step(1 + t % 8, rng);
        CHECK(res.accept_prob == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(res.accepted);
    }
}

TEST_CASE("rwm picks distinct sites and validates the scale") {
    const BernoulliModel model = make_bernoulli(10, ConfigLabel::C1, 2);
    Rng rng = make_rng(6);
    RwmSampler sampler(model, random_state(10, rng));
    for (int t = 0; t < 200; ++t) {
        sampler.step(1 + t % 10, rng);
        auto picked = sampler.last_picked();
        std::sort(picked.begin(), picked.end());
        CHECK(std::adjacent_find(picked.begin(), picked.end()) == picked.end());
    }
    CHECK_THROWS_AS(sampler.step(0, rng), std::invalid_argument);
    CHECK_THROWS_AS(sampler.step(11, rng), std::invalid_argument);

    LbpSampler lbp_sampler(model, random_state(10, rng), LbpOptions{});
    CHECK_THROWS_AS(lbp_sampler.step(11, rng), std::invalid_argument);
    LbpSampler gwg(model, random_state(10, rng), LbpOptions{WeightFn::Sqrt, true, false});
    CHECK_NOTHROW(gwg.step(14, rng));  // with replacement may exceed N
}

TEST_CASE("full-complement proposal at R = N against independent brute force") {
    // At R = N the proposal is the complement; check every ordering's
    // acceptance against a direct evaluation of the ratio computed straight
    // from log_prob and the weight definition, sharing no code with the
    // sampler.
    const BernoulliModel model = make_bernoulli(4, ConfigLabel::C3, 77);
    Rng rng = make_rng(31);
    const BitState x = random_state(4, rng);
    for (WeightFn fn : {WeightFn::Sqrt, WeightFn::Barker}) {
        LbpOptions opts{fn, false, false};
        std::vector<int> u{0, 1, 2, 3};
        std::sort(u.begin(), u.end());
        double total_q = 0.0;
        do {
            const auto ev = evaluate_lbp_proposal(model, x, u, opts);
            BitState y = x;
            for (int i : u) y.flip(i);
            CHECK(ev.proposed == y);
            CHECK(y.hamming_distance(x) == 4);

            auto w = [&](const BitState& s, int j) {
                BitState f = s;
                f.flip(j);
                return std::exp(log_weight(fn, model.log_prob(f) - model.log_prob(s)));
            };

            // forward: sequential draws from x; reverse: from y in reverse order
            double log_den = model.log_prob(x);
            double remaining = 0.0;
            for (int j = 0; j < 4; ++j) remaining += w(x, j);
            for (int r = 0; r < 4; ++r) {
                const double wr = w(x, u[static_cast<std::size_t>(r)]);
                log_den += std::log(wr) - std::log(remaining);
                remaining -= wr;
            }
            double log_num = model.log_prob(y);
            double remaining_y = 0.0;
            for (int j = 0; j < 4; ++j) remaining_y += w(y, j);
            for (int r = 3; r >= 0; --r) {
                const double wr = w(y, u[static_cast<std::size_t>(r)]);
                log_num += std::log(wr) - std::log(remaining_y);
                remaining_y -= wr;
            }
            const double direct = std::min(1.0, std::exp(log_num - log_den));
            CHECK(ev.accept_prob == doctest::Approx(direct).epsilon(1e-9));
            total_q += std::exp(ev.log_q_forward);
        } while (std::next_permutation(u.begin(), u.end()));
        CHECK(total_q == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("incremental weight cache matches a fresh sampler on coupled models") {
    Rng model_rng = make_rng(55);
    const IsingModel ising = make_ising(3, ConfigLabel::C2, 61);
    const FhmmModel fhmm = make_fhmm(4, 3, ConfigLabel::C3, 62);
    const std::vector<const TargetModel*> models{&ising, &fhmm};
    for (const TargetModel* model : models) {
        CAPTURE(model->family());
        for (bool replacement : {false, true}) {
            for (bool gradient : {false, true}) {
                LbpOptions opts{WeightFn::Barker, replacement, gradient};
                Rng rng_chain = make_rng(7, 1);
                LbpSampler chain(*model, random_state(model->dim(), model_rng), opts);
                for (int t = 0; t < 200; ++t) {
                    const BitState before = chain.state();
                    Rng rng_fresh = rng_chain;  // same stream for both paths
                    const StepResult a = chain.step(1 + t % 3, rng_chain);
                    LbpSampler fresh(*model, before, opts);
                    const StepResult b = fresh.step(1 + t % 3, rng_fresh);
                    CHECK(a.accept_prob == doctest::Approx(b.accept_prob).epsilon(1e-12));
                    CHECK(a.accepted == b.accepted);
                    CHECK(chain.state() == fresh.state());
                }
            }
        }
    }
}
