#include "lbp/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lbp {

namespace {

// Product accumulated in linear space with an explicit binary exponent, so
// chains of hundreds of probability factors neither underflow nor overflow;
// one log at the end.
struct LogProduct {
    double m = 1.0;
    long e = 0;
    int k = 0;

    void mul(double t) {
        m *= t;
        if (++k == 16 || m > 1e250 || (m < 1e-250 && m > 0.0)) {
            k = 0;
            int ee = 0;
            m = std::frexp(m, &ee);
            e += ee;
        }
    }

    double log_value() const {
        int ee = 0;
        const double mm = std::frexp(m, &ee);
        if (mm == 0.0) return -std::numeric_limits<double>::infinity();
        return std::log(mm) + static_cast<double>(e + ee) * M_LN2;
    }
};

// log prod_r v[r] / (complement + S_r) where S_r sums v over the suffix
// (suffix_form) or prefix (prefix form, the reversed draw order) including
// position r. Both sums are accumulated by addition only; no cancellation.
double selection_log_prob_impl(std::span<const double> v_sel, double complement,
                               bool suffix_form) {
    LogProduct prod;
    double running = 0.0;
    const int r_count = static_cast<int>(v_sel.size());
    if (suffix_form) {
        for (int r = r_count - 1; r >= 0; --r) {
            running += v_sel[static_cast<std::size_t>(r)];
            prod.mul(v_sel[static_cast<std::size_t>(r)] / (complement + running));
        }
    } else {
        for (int r = 0; r < r_count; ++r) {
            running += v_sel[static_cast<std::size_t>(r)];
            prod.mul(v_sel[static_cast<std::size_t>(r)] / (complement + running));
        }
    }
    return prod.log_value();
}

int floor_log2(int n) {
    int k = 0;
    while ((2 << k) <= n) ++k;
    return k;
}

// Fenwick prefix-sum tree over site weights; selection by bit descent.
void fenwick_build(std::span<const double> v, std::vector<double>& tree) {
    const int n = static_cast<int>(v.size());
    tree.assign(static_cast<std::size_t>(n) + 1, 0.0);
    for (int i = 1; i <= n; ++i) {
        tree[static_cast<std::size_t>(i)] += v[static_cast<std::size_t>(i - 1)];
        const int j = i + (i & -i);
        if (j <= n) tree[static_cast<std::size_t>(j)] += tree[static_cast<std::size_t>(i)];
    }
}

void fenwick_add(std::vector<double>& tree, int idx0, double value) {
    const int n = static_cast<int>(tree.size()) - 1;
    for (int i = idx0 + 1; i <= n; i += i & -i) tree[static_cast<std::size_t>(i)] += value;
}

// Smallest 0-based index whose inclusive prefix sum exceeds t.
int fenwick_find(const std::vector<double>& tree, int top_bit, double t) {
    const int n = static_cast<int>(tree.size()) - 1;
    int pos = 0;
    double rem = t;
    for (int k = 1 << top_bit; k > 0; k >>= 1) {
        const int next = pos + k;
        if (next <= n && tree[static_cast<std::size_t>(next)] < rem) {
            pos = next;
            rem -= tree[static_cast<std::size_t>(next)];
        }
    }
    return std::min(pos, n - 1);
}

}  // namespace

WeightFn parse_weight_fn(const std::string& s) {
    if (s == "sqrt") return WeightFn::Sqrt;
    if (s == "barker") return WeightFn::Barker;
    throw std::invalid_argument("unknown weight function: " + s + " (want sqrt|barker)");
}

std::string to_string(WeightFn fn) {
    return fn == WeightFn::Sqrt ? "sqrt" : "barker";
}

double log_weight(WeightFn fn, double delta) {
    if (fn == WeightFn::Sqrt) return 0.5 * delta;
    // Barker: log(e^d / (1 + e^d)) = -softplus(-d)
    if (delta < 0) return delta - std::log1p(std::exp(delta));
    return -std::log1p(std::exp(-delta));
}

void site_deltas(const TargetModel& model, const BitState& x, bool gradient_weights,
                 std::span<double> out) {
    if (!gradient_weights) {
        model.flip_deltas(x, out);
        return;
    }
    model.grad_log_prob(x, out);
    for (int i = 0; i < model.dim(); ++i)
        out[static_cast<std::size_t>(i)] *= 1.0 - 2.0 * x[i];
}

double seq_selection_log_prob(std::span<const double> v_sel, double complement_mass) {
    return selection_log_prob_impl(v_sel, complement_mass, /*suffix_form=*/true);
}

double iid_selection_log_prob(std::span<const double> v_sel, double total_mass) {
    LogProduct prod;
    for (double v : v_sel) prod.mul(v / total_mass);
    return prod.log_value();
}

double log_accept_ratio(const AcceptInputs& in) {
    if (in.with_replacement)
        return in.delta_logpi + iid_selection_log_prob(in.vy_sel, in.total_y) -
               iid_selection_log_prob(in.vx_sel, in.total_x);
    // reverse path draws u in reverse order from y: suffix form over the
    // reversed sequence equals prefix form over the original one
    return in.delta_logpi +
           selection_log_prob_impl(in.vy_sel, in.complement_y, /*suffix_form=*/false) -
           selection_log_prob_impl(in.vx_sel, in.complement_x, /*suffix_form=*/true);
}

// ---------------------------------------------------------------------------
// LbpSampler

LbpSampler::LbpSampler(const TargetModel& model, BitState init, LbpOptions opts)
    : model_(model), opts_(opts), n_(model.dim()), x_(std::move(init)) {
    model_.check_state(x_);
    delta_.resize(static_cast<std::size_t>(n_));
    v_.resize(static_cast<std::size_t>(n_));
    in_u_.assign(static_cast<std::size_t>(n_), 0);
    patch_pos_.assign(static_cast<std::size_t>(n_), -1);
    logp_ = model_.log_prob(x_);
    rebuild_cache();
}

void LbpSampler::reset(BitState state) {
    model_.check_state(state);
    x_ = std::move(state);
    logp_ = model_.log_prob(x_);
    rebuild_cache();
}

void LbpSampler::rebuild_cache() {
    site_deltas(model_, x_, opts_.gradient_weights, delta_);
    shift_ = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_; ++i)
        shift_ = std::max(shift_, log_weight(opts_.weight_fn, delta_[static_cast<std::size_t>(i)]));
    for (int i = 0; i < n_; ++i) {
        const double lw = log_weight(opts_.weight_fn, delta_[static_cast<std::size_t>(i)]);
        v_[static_cast<std::size_t>(i)] = std::exp(lw - shift_);
    }
    steps_since_rebuild_ = 0;
}

// Weight values at the proposed state for every site a flip could have
// touched; everything else keeps the value cached at x, which is exact
// because the models' affected_sites is a dependency superset.
void LbpSampler::prepare_patches() {
    affected_.clear();
    if (opts_.gradient_weights || odd_flips_.empty()) {
        if (odd_flips_.empty()) return;
        affected_.resize(static_cast<std::size_t>(n_));
        std::iota(affected_.begin(), affected_.end(), 0);
    } else {
        model_.affected_sites(odd_flips_, affected_);
    }
    const std::size_t m = affected_.size();
    patch_delta_.resize(m);
    patch_v_.resize(m);
    if (m == static_cast<std::size_t>(n_)) {
        site_deltas(model_, scratch_, opts_.gradient_weights, patch_delta_);
    } else {
        for (std::size_t s = 0; s < m; ++s)
            patch_delta_[s] = model_.flip_delta(scratch_, affected_[s]);
    }
    for (std::size_t s = 0; s < m; ++s) {
        const double lw = log_weight(opts_.weight_fn, patch_delta_[s]);
        const double pv = std::exp(lw - shift_);
        if (!std::isfinite(pv))
            throw std::runtime_error("lbp: weight overflow, flip log-ratio too large");
        patch_v_[s] = pv;
        patch_pos_[static_cast<std::size_t>(affected_[s])] = static_cast<int>(s);
    }
}

StepResult LbpSampler::step(int scale, Rng& rng) {
    if (scale < 1)
        throw std::invalid_argument("lbp: scale must be >= 1");
    if (!opts_.with_replacement && scale > n_)
        throw std::invalid_argument("lbp: scale exceeds dimension for sampling without replacement");
    if (++steps_since_rebuild_ >= 8192) rebuild_cache();

    // sequential weighted selection
    fenwick_build(v_, tree_);
    const int top_bit = floor_log2(n_);
    double total = std::accumulate(v_.begin(), v_.end(), 0.0);
    const double total_x = total;
    picked_.clear();
    for (int r = 0; r < scale; ++r) {
        const double t = uniform01(rng) * total;
        int idx = fenwick_find(tree_, top_bit, t);
        if (!opts_.with_replacement) {
            while (in_u_[static_cast<std::size_t>(idx)]) idx = (idx + 1) % n_;  // fp-dust guard
            in_u_[static_cast<std::size_t>(idx)] = 1;
            fenwick_add(tree_, idx, -v_[static_cast<std::size_t>(idx)]);
            total -= v_[static_cast<std::size_t>(idx)];
        }
        picked_.push_back(idx);
    }
    if (opts_.with_replacement)
        for (int idx : picked_) in_u_[static_cast<std::size_t>(idx)] = 1;

    // y = x with the odd-multiplicity sites flipped
    odd_flips_.clear();
    if (opts_.with_replacement) {
        for (int idx : picked_) {
            auto it = std::find(odd_flips_.begin(), odd_flips_.end(), idx);
            if (it == odd_flips_.end())
                odd_flips_.push_back(idx);
            else
                odd_flips_.erase(it);
        }
    } else {
        odd_flips_ = picked_;
    }

    const double dlogpi = model_.log_ratio_for_flips(x_, odd_flips_, scratch_);
    prepare_patches();

    // acceptance inputs; complements accumulate by addition only
    vx_sel_.clear();
    vy_sel_.clear();
    for (int idx : picked_) {
        vx_sel_.push_back(v_[static_cast<std::size_t>(idx)]);
        vy_sel_.push_back(v_at_y(idx));
    }
    double comp_x = 0.0, comp_y = 0.0;
    for (int j = 0; j < n_; ++j) {
        if (in_u_[static_cast<std::size_t>(j)]) continue;
        comp_x += v_[static_cast<std::size_t>(j)];
        comp_y += v_at_y(j);
    }
    double total_y = comp_y;
    for (int j = 0; j < n_; ++j)
        if (in_u_[static_cast<std::size_t>(j)]) total_y += v_at_y(j);

    AcceptInputs in;
    in.delta_logpi = dlogpi;
    in.vx_sel = vx_sel_;
    in.vy_sel = vy_sel_;
    in.complement_x = comp_x;
    in.complement_y = comp_y;
    in.total_x = total_x;
    in.total_y = total_y;
    in.with_replacement = opts_.with_replacement;

    StepResult res;
    res.scale = scale;
    res.jump_distance = static_cast<int>(odd_flips_.size());
    res.delta_logpi = dlogpi;
    res.log_ratio = log_accept_ratio(in);
    res.accept_prob = std::min(1.0, std::exp(res.log_ratio));
    res.accepted = uniform01(rng) < res.accept_prob;

    if (res.accepted) {
        std::swap(x_, scratch_);
        logp_ += dlogpi;
        for (std::size_t s = 0; s < affected_.size(); ++s) {
            const auto a = static_cast<std::size_t>(affected_[s]);
            delta_[a] = patch_delta_[s];
            v_[a] = patch_v_[s];
        }
    }

    for (int a : affected_) patch_pos_[static_cast<std::size_t>(a)] = -1;
    for (int idx : picked_) in_u_[static_cast<std::size_t>(idx)] = 0;
    return res;
}

// ---------------------------------------------------------------------------
// RwmSampler

RwmSampler::RwmSampler(const TargetModel& model, BitState init)
    : model_(model), n_(model.dim()), x_(std::move(init)) {
    model_.check_state(x_);
    logp_ = model_.log_prob(x_);
}

void RwmSampler::reset(BitState state) {
    model_.check_state(state);
    x_ = std::move(state);
    logp_ = model_.log_prob(x_);
}

StepResult RwmSampler::step(int scale, Rng& rng) {
    if (scale < 1 || scale > n_)
        throw std::invalid_argument("rwm: scale must lie in [1, N]");
    // Floyd's algorithm: uniform R-subset without replacement
    picked_.clear();
    for (int j = n_ - scale; j < n_; ++j) {
        const int t = std::uniform_int_distribution<int>(0, j)(rng);
        if (std::find(picked_.begin(), picked_.end(), t) != picked_.end())
            picked_.push_back(j);
        else
            picked_.push_back(t);
    }

    const double dlogpi = model_.log_ratio_for_flips(x_, picked_, scratch_);

    StepResult res;
    res.scale = scale;
    res.jump_distance = scale;
    res.delta_logpi = dlogpi;
    res.log_ratio = dlogpi;
    res.accept_prob = std::min(1.0, std::exp(dlogpi));
    res.accepted = uniform01(rng) < res.accept_prob;
    if (res.accepted) {
        std::swap(x_, scratch_);
        logp_ += dlogpi;
    }
    return res;
}

// ---------------------------------------------------------------------------
// Stateless wrappers and the oracle-facing evaluation

namespace {

ProposalOutcome make_outcome(const BitState& x, const std::vector<int>& picked,
                             const StepResult& res) {
    ProposalOutcome out;
    out.picked = picked;
    out.proposed = x;
    for (int idx : picked) out.proposed.flip(idx);
    out.accept_prob = res.accept_prob;
    out.accepted = res.accepted;
    out.jump_distance = res.jump_distance;
    out.scale = res.scale;
    return out;
}

}  // namespace

ProposalOutcome lbp_step(const TargetModel& model, const BitState& x, int scale,
                         const LbpOptions& opts, Rng& rng) {
    LbpSampler sampler(model, x, opts);
    const StepResult res = sampler.step(scale, rng);
    return make_outcome(x, sampler.last_picked(), res);
}

ProposalOutcome rwm_step(const TargetModel& model, const BitState& x, int scale, Rng& rng) {
    RwmSampler sampler(model, x);
    const StepResult res = sampler.step(scale, rng);
    return make_outcome(x, sampler.last_picked(), res);
}

ProposalEvaluation evaluate_lbp_proposal(const TargetModel& model, const BitState& x,
                                         std::span<const int> u, const LbpOptions& opts) {
    model.check_state(x);
    const int n = model.dim();
    if (u.empty()) throw std::invalid_argument("evaluate_lbp_proposal: empty index sequence");
    for (int idx : u) model.check_site(idx);

    std::vector<double> delta_x(static_cast<std::size_t>(n));
    site_deltas(model, x, opts.gradient_weights, delta_x);
    std::vector<double> vx(static_cast<std::size_t>(n));
    double shift_x = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        shift_x = std::max(shift_x, log_weight(opts.weight_fn, delta_x[static_cast<std::size_t>(i)]));
    for (int i = 0; i < n; ++i)
        vx[static_cast<std::size_t>(i)] =
            std::exp(log_weight(opts.weight_fn, delta_x[static_cast<std::size_t>(i)]) - shift_x);

    std::vector<int> odd;
    for (int idx : u) {
        auto it = std::find(odd.begin(), odd.end(), idx);
        if (it == odd.end())
            odd.push_back(idx);
        else
            odd.erase(it);
    }
    if (!opts.with_replacement && odd.size() != u.size())
        throw std::invalid_argument("evaluate_lbp_proposal: duplicate index without replacement");

    BitState scratch;
    const double dlogpi = model.log_ratio_for_flips(x, odd, scratch);
    const BitState& y = scratch;

    std::vector<double> delta_y(static_cast<std::size_t>(n));
    site_deltas(model, y, opts.gradient_weights, delta_y);
    std::vector<double> vy(static_cast<std::size_t>(n));
    double shift_y = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        shift_y = std::max(shift_y, log_weight(opts.weight_fn, delta_y[static_cast<std::size_t>(i)]));
    for (int i = 0; i < n; ++i)
        vy[static_cast<std::size_t>(i)] =
            std::exp(log_weight(opts.weight_fn, delta_y[static_cast<std::size_t>(i)]) - shift_y);

    std::vector<char> in_u(static_cast<std::size_t>(n), 0);
    for (int idx : u) in_u[static_cast<std::size_t>(idx)] = 1;
    double comp_x = 0.0, comp_y = 0.0, total_x = 0.0, total_y = 0.0;
    for (int j = 0; j < n; ++j) {
        total_x += vx[static_cast<std::size_t>(j)];
        total_y += vy[static_cast<std::size_t>(j)];
        if (!in_u[static_cast<std::size_t>(j)]) {
            comp_x += vx[static_cast<std::size_t>(j)];
            comp_y += vy[static_cast<std::size_t>(j)];
        }
    }

    std::vector<double> vx_sel, vy_sel;
    vx_sel.reserve(u.size());
    vy_sel.reserve(u.size());
    for (int idx : u) {
        vx_sel.push_back(vx[static_cast<std::size_t>(idx)]);
        vy_sel.push_back(vy[static_cast<std::size_t>(idx)]);
    }

    AcceptInputs in;
    in.delta_logpi = dlogpi;
    in.vx_sel = vx_sel;
    in.vy_sel = vy_sel;
    in.complement_x = comp_x;
    in.complement_y = comp_y;
    in.total_x = total_x;
    in.total_y = total_y;
    in.with_replacement = opts.with_replacement;

    ProposalEvaluation ev;
    ev.log_q_forward = opts.with_replacement ? iid_selection_log_prob(vx_sel, total_x)
                                             : seq_selection_log_prob(vx_sel, comp_x);
    ev.log_accept_ratio = log_accept_ratio(in);
    ev.accept_prob = std::min(1.0, std::exp(ev.log_accept_ratio));
    ev.proposed = y;
    return ev;
}

}  // namespace lbp
