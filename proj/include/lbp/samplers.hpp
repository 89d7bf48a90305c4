#pragma once

#include <span>
#include <string>
#include <vector>

#include "lbp/bit_state.hpp"
#include "lbp/model.hpp"
#include "lbp/rng.hpp"

namespace lbp {

// Locally balanced weight functions g with g(t) = t g(1/t):
// Sqrt g(t) = sqrt(t), Barker g(t) = t / (t + 1).
enum class WeightFn { Sqrt, Barker };

WeightFn parse_weight_fn(const std::string& s);
std::string to_string(WeightFn fn);

// log g(e^delta), evaluated stably in log space:
// Sqrt -> delta / 2, Barker -> -softplus(-delta).
double log_weight(WeightFn fn, double delta);

// Per-site flip log-ratios driving the weights: exact flip deltas, or the
// gradient surrogate (1 - 2 x_i) * (grad log pi(x))_i.
void site_deltas(const TargetModel& model, const BitState& x, bool gradient_weights,
                 std::span<double> out);

struct LbpOptions {
    WeightFn weight_fn = WeightFn::Barker;
    bool with_replacement = false;
    bool gradient_weights = false;
};

// One proposed M-H move.
struct ProposalOutcome {
    std::vector<int> picked;  // chosen sites u in draw order (repeats possible with replacement)
    BitState proposed;        // y
    double accept_prob = 0.0; // A(x, y, u)
    bool accepted = false;
    int jump_distance = 0;    // Hamming d(x, y)
    int scale = 0;            // R used this step
};

// Scalar per-step record kept by the stateful samplers (proposal buffers
// stay inside the sampler and are reused).
struct StepResult {
    double accept_prob = 0.0;
    bool accepted = false;
    int jump_distance = 0;
    int scale = 0;
    double log_ratio = 0.0;   // uncapped log acceptance ratio
    double delta_logpi = 0.0; // log pi(y) - log pi(x)
};

// Probability of drawing the given sites sequentially, proportional to their
// weights, without replacement. `v_sel` holds the scaled weights of the
// selected sites in draw order, `complement_mass` the scaled weight mass of
// the never-selected sites; the common scale cancels. The acceptance ratio's
// numerator is the same expression for the reversed draw order under the
// proposed state's weights.
double seq_selection_log_prob(std::span<const double> v_sel, double complement_mass);

// With-replacement analog: R iid draws from the full weight distribution.
double iid_selection_log_prob(std::span<const double> v_sel, double total_mass);

// Shared acceptance-ratio core, used by the samplers and by the exact-kernel
// oracle so the oracle exercises the shipped logic. All reverse-path weights
// are the caller's freshly computed values at y; nothing is reused from x.
struct AcceptInputs {
    double delta_logpi = 0.0;
    std::span<const double> vx_sel;  // scaled weights at x of u, draw order
    std::span<const double> vy_sel;  // scaled weights at y of u, draw order
    double complement_x = 0.0;       // scaled mass at x over sites not in u
    double complement_y = 0.0;       // same at y
    double total_x = 0.0;            // full scaled mass (replacement variant)
    double total_y = 0.0;
    bool with_replacement = false;
};
double log_accept_ratio(const AcceptInputs& in);

// ---------------------------------------------------------------------------
// LBP-R chain. Keeps the current state, its log-probability, and a per-site
// weight cache that is patched incrementally after accepted moves (each
// model reports which sites a flip can affect). One step: sequential
// weighted selection of R sites, flip, auxiliary-path M-H test.
class LbpSampler {
public:
    LbpSampler(const TargetModel& model, BitState init, LbpOptions opts);

    // One M-H step flipping `scale` sites. Without replacement requires
    // 1 <= scale <= N; with replacement scale >= 1.
    StepResult step(int scale, Rng& rng);

    const BitState& state() const { return x_; }
    double state_log_prob() const { return logp_; }
    const std::vector<int>& last_picked() const { return picked_; }
    const TargetModel& model() const { return model_; }
    const LbpOptions& options() const { return opts_; }

    void reset(BitState state);

private:
    void rebuild_cache();
    void prepare_patches();
    double scaled_weight(double delta) const;
    double v_at_y(int site) const {
        const int slot = patch_pos_[static_cast<std::size_t>(site)];
        return slot >= 0 ? patch_v_[static_cast<std::size_t>(slot)]
                         : v_[static_cast<std::size_t>(site)];
    }

    const TargetModel& model_;
    LbpOptions opts_;
    int n_;
    BitState x_;
    double logp_ = 0.0;

    // weight cache at x_
    std::vector<double> delta_, v_;
    double shift_ = 0.0;
    long steps_since_rebuild_ = 0;

    // per-step scratch
    std::vector<double> tree_;
    std::vector<int> picked_, odd_flips_, affected_;
    std::vector<char> in_u_;
    std::vector<int> patch_pos_;  // site -> patch slot or -1
    std::vector<double> patch_delta_, patch_v_;
    std::vector<double> vx_sel_, vy_sel_;
    BitState scratch_;
};

// ---------------------------------------------------------------------------
// RWM-R chain: R distinct sites uniformly at random, A = 1 ^ pi(y)/pi(x).
class RwmSampler {
public:
    RwmSampler(const TargetModel& model, BitState init);

    StepResult step(int scale, Rng& rng);

    const BitState& state() const { return x_; }
    double state_log_prob() const { return logp_; }
    const std::vector<int>& last_picked() const { return picked_; }

    void reset(BitState state);

private:
    const TargetModel& model_;
    int n_;
    BitState x_;
    double logp_ = 0.0;
    std::vector<int> picked_;
    BitState scratch_;
};

// Stateless single steps; convenient for tests and the oracle.
ProposalOutcome lbp_step(const TargetModel& model, const BitState& x, int scale,
                         const LbpOptions& opts, Rng& rng);
ProposalOutcome rwm_step(const TargetModel& model, const BitState& x, int scale, Rng& rng);

// Full evaluation of one ordered index sequence u at state x: selection
// probability q(u|x), the proposed y, and the acceptance probability. Used
// by the exact-kernel enumeration; recomputes everything from scratch.
struct ProposalEvaluation {
    double log_q_forward = 0.0;
    double accept_prob = 0.0;
    double log_accept_ratio = 0.0;
    BitState proposed;
};
ProposalEvaluation evaluate_lbp_proposal(const TargetModel& model, const BitState& x,
                                         std::span<const int> u, const LbpOptions& opts);

}  // namespace lbp
