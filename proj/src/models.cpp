#include "lbp/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace lbp {

namespace {

// log(1 + e^t) without overflow.
double softplus(double t) {
    if (t > 0) return t + std::log1p(std::exp(-t));
    return std::log1p(std::exp(t));
}

double sigmoid(double t) {
    if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

}  // namespace

void TargetModel::flip_deltas(const BitState& x, std::span<double> out) const {
    check_state(x);
    for (int i = 0; i < dim(); ++i) out[static_cast<std::size_t>(i)] = flip_delta(x, i);
}

double TargetModel::log_ratio_for_flips(const BitState& x, std::span<const int> flips,
                                        BitState& scratch) const {
    check_state(x);
    scratch = x;
    double delta = 0.0;
    for (int site : flips) {
        delta += flip_delta(scratch, site);
        scratch.flip(site);
    }
    return delta;
}

void TargetModel::affected_sites(std::span<const int> flips, std::vector<int>& out) const {
    (void)flips;
    out.resize(static_cast<std::size_t>(dim()));
    std::iota(out.begin(), out.end(), 0);
}

ConfigLabel parse_config_label(const std::string& s) {
    if (s == "C1" || s == "c1") return ConfigLabel::C1;
    if (s == "C2" || s == "c2") return ConfigLabel::C2;
    if (s == "C3" || s == "c3") return ConfigLabel::C3;
    throw std::invalid_argument("unknown configuration label: " + s);
}

std::string to_string(ConfigLabel c) {
    switch (c) {
        case ConfigLabel::C1: return "C1";
        case ConfigLabel::C2: return "C2";
        case ConfigLabel::C3: return "C3";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Bernoulli

BernoulliModel::BernoulliModel(std::vector<double> p, std::optional<double> epsilon)
    : p_(std::move(p)) {
    if (p_.empty()) throw std::invalid_argument("bernoulli: empty probability vector");
    if (epsilon && (*epsilon <= 0.0 || *epsilon >= 0.25))
        throw std::invalid_argument("bernoulli: epsilon must lie in (0, 1/4)");
    logit_.reserve(p_.size());
    log_p_.reserve(p_.size());
    log_1mp_.reserve(p_.size());
    for (double pi : p_) {
        if (!(pi > 0.0 && pi < 1.0))
            throw std::invalid_argument("bernoulli: probabilities must lie in (0, 1)");
        if (epsilon && std::min(pi, 1.0 - pi) <= *epsilon)
            throw std::invalid_argument("bernoulli: epsilon bound violated by p = " +
                                        std::to_string(pi));
        log_p_.push_back(std::log(pi));
        log_1mp_.push_back(std::log1p(-pi));
        logit_.push_back(std::log(pi) - std::log1p(-pi));
    }
}

double BernoulliModel::log_prob(const BitState& x) const {
    check_state(x);
    double lp = 0.0;
    for (int i = 0; i < dim(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        lp += x[i] ? log_p_[k] : log_1mp_[k];
    }
    return lp;
}

double BernoulliModel::flip_delta(const BitState& x, int site) const {
    check_state(x);
    check_site(site);
    return (1 - 2 * static_cast<int>(x[site])) * logit_[static_cast<std::size_t>(site)];
}

void BernoulliModel::flip_deltas(const BitState& x, std::span<double> out) const {
    check_state(x);
    for (int i = 0; i < dim(); ++i)
        out[static_cast<std::size_t>(i)] =
            (1 - 2 * static_cast<int>(x[i])) * logit_[static_cast<std::size_t>(i)];
}

void BernoulliModel::grad_log_prob(const BitState& x, std::span<double> out) const {
    check_state(x);
    std::copy(logit_.begin(), logit_.end(), out.begin());
}

double BernoulliModel::relaxed_log_prob(std::span<const double> x) const {
    double lp = 0.0;
    for (std::size_t i = 0; i < p_.size(); ++i)
        lp += x[i] * log_p_[i] + (1.0 - x[i]) * log_1mp_[i];
    return lp;
}

void BernoulliModel::affected_sites(std::span<const int> flips, std::vector<int>& out) const {
    out.assign(flips.begin(), flips.end());
}

BernoulliModel make_bernoulli(int n, ConfigLabel config, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("make_bernoulli: n must be >= 1");
    double lo = 0.25, hi = 0.75;
    switch (config) {
        case ConfigLabel::C1: lo = 0.25; hi = 0.75; break;
        case ConfigLabel::C2: lo = 0.15; hi = 0.85; break;
        case ConfigLabel::C3: lo = 0.05; hi = 0.95; break;
    }
    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> p(static_cast<std::size_t>(n));
    for (double& pi : p) pi = u(rng);
    return BernoulliModel(std::move(p));
}

// ---------------------------------------------------------------------------
// Ising

IsingModel::IsingModel(int side, std::vector<double> alpha, double lambda)
    : side_(side), alpha_(std::move(alpha)), lambda_(lambda) {
    if (side_ < 2) throw std::invalid_argument("ising: side must be >= 2");
    const int n = side_ * side_;
    if (static_cast<int>(alpha_.size()) != n)
        throw std::invalid_argument("ising: field must have side^2 entries");
    nbr_.resize(static_cast<std::size_t>(n));
    nbr_count_.assign(static_cast<std::size_t>(n), 0);
    for (int r = 0; r < side_; ++r) {
        for (int c = 0; c < side_; ++c) {
            const int v = r * side_ + c;
            auto add = [&](int rr, int cc) {
                if (rr < 0 || rr >= side_ || cc < 0 || cc >= side_) return;
                auto& count = nbr_count_[static_cast<std::size_t>(v)];
                nbr_[static_cast<std::size_t>(v)][static_cast<std::size_t>(count++)] =
                    rr * side_ + cc;
            };
            add(r - 1, c);
            add(r + 1, c);
            add(r, c - 1);
            add(r, c + 1);
        }
    }
}

double IsingModel::log_prob(const BitState& x) const {
    check_state(x);
    double field = 0.0, pair = 0.0;
    for (int v = 0; v < dim(); ++v) {
        const int s = x.spin(v);
        field += alpha_[static_cast<std::size_t>(v)] * s;
        // count each lattice edge once via the right/down neighbors
        const int r = v / side_, c = v % side_;
        if (c + 1 < side_) pair += s * x.spin(v + 1);
        if (r + 1 < side_) pair += s * x.spin(v + side_);
    }
    return field - lambda_ * pair;
}

double IsingModel::flip_delta(const BitState& x, int site) const {
    check_state(x);
    check_site(site);
    const int s = x.spin(site);
    int nbr_sum = 0;
    for (int j : neighbors(site)) nbr_sum += x.spin(j);
    return -2.0 * s * alpha_[static_cast<std::size_t>(site)] + 2.0 * lambda_ * s * nbr_sum;
}

void IsingModel::grad_log_prob(const BitState& x, std::span<double> out) const {
    check_state(x);
    for (int v = 0; v < dim(); ++v) {
        int nbr_sum = 0;
        for (int j : neighbors(v)) nbr_sum += x.spin(j);
        // d/dx of alpha.s - lambda sum s_i s_j with s = 2x - 1
        out[static_cast<std::size_t>(v)] =
            2.0 * (alpha_[static_cast<std::size_t>(v)] - lambda_ * nbr_sum);
    }
}

double IsingModel::relaxed_log_prob(std::span<const double> x) const {
    double field = 0.0, pair = 0.0;
    for (int v = 0; v < dim(); ++v) {
        const double s = 2.0 * x[static_cast<std::size_t>(v)] - 1.0;
        field += alpha_[static_cast<std::size_t>(v)] * s;
        const int r = v / side_, c = v % side_;
        if (c + 1 < side_) pair += s * (2.0 * x[static_cast<std::size_t>(v + 1)] - 1.0);
        if (r + 1 < side_) pair += s * (2.0 * x[static_cast<std::size_t>(v + side_)] - 1.0);
    }
    return field - lambda_ * pair;
}

void IsingModel::affected_sites(std::span<const int> flips, std::vector<int>& out) const {
    out.clear();
    for (int site : flips) {
        out.push_back(site);
        for (int j : neighbors(site)) out.push_back(j);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
}

IsingModel make_ising(int side, ConfigLabel config, std::uint64_t seed) {
    if (side < 2) throw std::invalid_argument("make_ising: side must be >= 2");
    double in_lo = 0, in_hi = 0, lambda = 0;
    switch (config) {
        case ConfigLabel::C1: in_lo = -0.2; in_hi = 0.4; lambda = 0.1; break;
        case ConfigLabel::C2: in_lo = -0.3; in_hi = 0.6; lambda = 0.15; break;
        case ConfigLabel::C3: in_lo = -0.4; in_hi = 0.8; lambda = 0.2; break;
    }
    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> inside(in_lo, in_hi);
    std::uniform_real_distribution<double> outside(-in_hi, -in_lo);
    const double half = side / 2.0;
    const double disk = side * side / 2.0;
    std::vector<double> alpha(static_cast<std::size_t>(side) * static_cast<std::size_t>(side));
    for (int r = 0; r < side; ++r) {
        for (int c = 0; c < side; ++c) {
            const double d2 = (r - half) * (r - half) + (c - half) * (c - half);
            alpha[static_cast<std::size_t>(r * side + c)] =
                d2 <= disk ? inside(rng) : outside(rng);
        }
    }
    return IsingModel(side, std::move(alpha), lambda);
}

// ---------------------------------------------------------------------------
// FHMM

FhmmModel::FhmmModel(int length, int factors, std::vector<double> w, double b, double sigma2,
                     std::vector<double> y)
    : length_(length),
      factors_(factors),
      w_(std::move(w)),
      b_(b),
      sigma2_(sigma2),
      y_(std::move(y)) {
    if (length_ < 1 || factors_ < 1)
        throw std::invalid_argument("fhmm: length and factors must be >= 1");
    if (!(sigma2_ > 0.0)) throw std::invalid_argument("fhmm: sigma2 must be positive");
    if (static_cast<int>(w_.size()) != factors_)
        throw std::invalid_argument("fhmm: emission weights must have K entries");
    if (static_cast<int>(y_.size()) != length_)
        throw std::invalid_argument("fhmm: observation series must have L entries");
    log_init_[0] = std::log1p(-kInitOn);
    log_init_[1] = std::log(kInitOn);
    log_trans_[0] = std::log1p(-kStay);
    log_trans_[1] = std::log(kStay);
}

double FhmmModel::emission_mean(const BitState& x, int l) const {
    double m = b_;
    const int base = l * factors_;
    for (int k = 0; k < factors_; ++k)
        if (x[base + k]) m += w_[static_cast<std::size_t>(k)];
    return m;
}

double FhmmModel::log_prob(const BitState& x) const {
    check_state(x);
    double lp = 0.0;
    const double norm = -0.5 * std::log(2.0 * M_PI * sigma2_);
    for (int l = 0; l < length_; ++l) {
        const int base = l * factors_;
        lp += log_init_[x[base]];
        for (int k = 1; k < factors_; ++k)
            lp += log_trans_[x[base + k] == x[base + k - 1]];
        const double r = y_[static_cast<std::size_t>(l)] - emission_mean(x, l);
        lp += norm - r * r / (2.0 * sigma2_);
    }
    return lp;
}

double FhmmModel::flip_delta(const BitState& x, int site) const {
    check_state(x);
    check_site(site);
    const int l = site / factors_, k = site % factors_;
    const int base = l * factors_;
    double delta = 0.0;
    const int old_bit = x[site], new_bit = 1 - old_bit;
    if (k == 0) {
        delta += log_init_[new_bit] - log_init_[old_bit];
    } else {
        const int prev = x[base + k - 1];
        delta += log_trans_[new_bit == prev] - log_trans_[old_bit == prev];
    }
    if (k + 1 < factors_) {
        const int next = x[base + k + 1];
        delta += log_trans_[next == new_bit] - log_trans_[next == old_bit];
    }
    const double m_old = emission_mean(x, l);
    const double m_new = m_old + (new_bit - old_bit) * w_[static_cast<std::size_t>(k)];
    const double yl = y_[static_cast<std::size_t>(l)];
    delta += ((yl - m_old) * (yl - m_old) - (yl - m_new) * (yl - m_new)) / (2.0 * sigma2_);
    return delta;
}

void FhmmModel::grad_log_prob(const BitState& x, std::span<double> out) const {
    check_state(x);
    const double trans_gap = log_trans_[1] - log_trans_[0];
    for (int l = 0; l < length_; ++l) {
        const int base = l * factors_;
        const double resid = (y_[static_cast<std::size_t>(l)] - emission_mean(x, l)) / sigma2_;
        for (int k = 0; k < factors_; ++k) {
            double g = resid * w_[static_cast<std::size_t>(k)];
            if (k == 0)
                g += log_init_[1] - log_init_[0];
            else
                g += (2.0 * x[base + k - 1] - 1.0) * trans_gap;
            if (k + 1 < factors_) g += (2.0 * x[base + k + 1] - 1.0) * trans_gap;
            out[static_cast<std::size_t>(base + k)] = g;
        }
    }
}

double FhmmModel::relaxed_log_prob(std::span<const double> x) const {
    double lp = 0.0;
    const double norm = -0.5 * std::log(2.0 * M_PI * sigma2_);
    for (int l = 0; l < length_; ++l) {
        const std::size_t base = static_cast<std::size_t>(l) * static_cast<std::size_t>(factors_);
        lp += x[base] * log_init_[1] + (1.0 - x[base]) * log_init_[0];
        for (int k = 1; k < factors_; ++k) {
            const double a = x[base + static_cast<std::size_t>(k) - 1];
            const double bq = x[base + static_cast<std::size_t>(k)];
            const double same = a * bq + (1.0 - a) * (1.0 - bq);
            lp += same * log_trans_[1] + (1.0 - same) * log_trans_[0];
        }
        double m = b_;
        for (int k = 0; k < factors_; ++k)
            m += w_[static_cast<std::size_t>(k)] * x[base + static_cast<std::size_t>(k)];
        const double r = y_[static_cast<std::size_t>(l)] - m;
        lp += norm - r * r / (2.0 * sigma2_);
    }
    return lp;
}

void FhmmModel::affected_sites(std::span<const int> flips, std::vector<int>& out) const {
    // the emission couples all factors within a time step
    out.clear();
    for (int site : flips) {
        const int base = (site / factors_) * factors_;
        for (int k = 0; k < factors_; ++k) out.push_back(base + k);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
}

FhmmModel make_fhmm(int length, int factors, ConfigLabel config, std::uint64_t seed) {
    if (length < 1 || factors < 1)
        throw std::invalid_argument("make_fhmm: length and factors must be >= 1");
    double sigma2 = 1.0;
    switch (config) {
        case ConfigLabel::C1: sigma2 = 2.0; break;
        case ConfigLabel::C2: sigma2 = 1.0; break;
        case ConfigLabel::C3: sigma2 = 0.5; break;
    }
    Rng rng = make_rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> w(static_cast<std::size_t>(factors));
    for (double& wk : w) wk = gauss(rng);
    const double b = gauss(rng);

    // latent truth from the prior, then observations from the emission model
    std::uniform_real_distribution<double> u(0.0, 1.0);
    BitState truth(length * factors);
    for (int l = 0; l < length; ++l) {
        const int base = l * factors;
        truth.set(base, u(rng) < FhmmModel::kInitOn ? 1 : 0);
        for (int k = 1; k < factors; ++k) {
            const int prev = truth[base + k - 1];
            truth.set(base + k, u(rng) < FhmmModel::kStay ? prev : 1 - prev);
        }
    }
    std::vector<double> y(static_cast<std::size_t>(length));
    for (int l = 0; l < length; ++l) {
        double m = b;
        for (int k = 0; k < factors; ++k)
            if (truth[l * factors + k]) m += w[static_cast<std::size_t>(k)];
        y[static_cast<std::size_t>(l)] = m + std::sqrt(sigma2) * gauss(rng);
    }
    return FhmmModel(length, factors, std::move(w), b, sigma2, std::move(y));
}

// ---------------------------------------------------------------------------
// RBM

RbmModel::RbmModel(int hidden, int visible, std::vector<double> weights, std::vector<double> b,
                   std::vector<double> c)
    : hidden_(hidden), visible_(visible), w_(std::move(weights)), b_(std::move(b)),
      c_(std::move(c)) {
    if (hidden_ < 1 || visible_ < 1)
        throw std::invalid_argument("rbm: hidden and visible must be >= 1");
    if (w_.size() != static_cast<std::size_t>(hidden_) * static_cast<std::size_t>(visible_))
        throw std::invalid_argument("rbm: weight matrix shape mismatch");
    if (static_cast<int>(b_.size()) != visible_)
        throw std::invalid_argument("rbm: visible bias length mismatch");
    if (static_cast<int>(c_.size()) != hidden_)
        throw std::invalid_argument("rbm: hidden bias length mismatch");
}

void RbmModel::activations(const BitState& x, std::vector<double>& a) const {
    a.assign(c_.begin(), c_.end());
    for (int i = 0; i < visible_; ++i) {
        if (!x[i]) continue;
        const double* col = &w_[static_cast<std::size_t>(i)];
        for (int j = 0; j < hidden_; ++j)
            a[static_cast<std::size_t>(j)] += col[static_cast<std::size_t>(j) *
                                                  static_cast<std::size_t>(visible_)];
    }
}

double RbmModel::log_prob(const BitState& x) const {
    check_state(x);
    double lp = 0.0;
    for (int i = 0; i < visible_; ++i)
        if (x[i]) lp += b_[static_cast<std::size_t>(i)];
    std::vector<double> a;
    activations(x, a);
    for (double aj : a) lp += softplus(aj);
    return lp;
}

double RbmModel::flip_delta(const BitState& x, int site) const {
    check_state(x);
    check_site(site);
    const double sign = 1.0 - 2.0 * x[site];
    double delta = sign * b_[static_cast<std::size_t>(site)];
    std::vector<double> a;
    activations(x, a);
    for (int j = 0; j < hidden_; ++j)
        delta += softplus(a[static_cast<std::size_t>(j)] + sign * weight(j, site)) -
                 softplus(a[static_cast<std::size_t>(j)]);
    return delta;
}

void RbmModel::flip_deltas(const BitState& x, std::span<double> out) const {
    check_state(x);
    std::vector<double> a;
    activations(x, a);
    std::vector<double> sp(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) sp[j] = softplus(a[j]);
    for (int i = 0; i < visible_; ++i) {
        const double sign = 1.0 - 2.0 * x[i];
        double delta = sign * b_[static_cast<std::size_t>(i)];
        for (int j = 0; j < hidden_; ++j)
            delta += softplus(a[static_cast<std::size_t>(j)] + sign * weight(j, i)) -
                     sp[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = delta;
    }
}

void RbmModel::grad_log_prob(const BitState& x, std::span<double> out) const {
    check_state(x);
    std::vector<double> a;
    activations(x, a);
    for (int i = 0; i < visible_; ++i) out[static_cast<std::size_t>(i)] =
        b_[static_cast<std::size_t>(i)];
    for (int j = 0; j < hidden_; ++j) {
        const double s = sigmoid(a[static_cast<std::size_t>(j)]);
        const double* row = &w_[static_cast<std::size_t>(j) * static_cast<std::size_t>(visible_)];
        for (int i = 0; i < visible_; ++i) out[static_cast<std::size_t>(i)] += s * row[i];
    }
}

double RbmModel::relaxed_log_prob(std::span<const double> x) const {
    double lp = 0.0;
    for (int i = 0; i < visible_; ++i) lp += b_[static_cast<std::size_t>(i)] * x[i];
    for (int j = 0; j < hidden_; ++j) {
        double a = c_[static_cast<std::size_t>(j)];
        const double* row = &w_[static_cast<std::size_t>(j) * static_cast<std::size_t>(visible_)];
        for (int i = 0; i < visible_; ++i) a += row[i] * x[static_cast<std::size_t>(i)];
        lp += softplus(a);
    }
    return lp;
}

double RbmModel::log_ratio_for_flips(const BitState& x, std::span<const int> flips,
                                     BitState& scratch) const {
    // one activation pass plus O(h) per flip beats repeated O(hN) flip_delta
    check_state(x);
    scratch = x;
    std::vector<double> a;
    activations(x, a);
    double delta = 0.0;
    for (int site : flips) {
        const double sign = 1.0 - 2.0 * scratch[site];
        delta += sign * b_[static_cast<std::size_t>(site)];
        for (int j = 0; j < hidden_; ++j) {
            const double aj = a[static_cast<std::size_t>(j)];
            const double anew = aj + sign * weight(j, site);
            delta += softplus(anew) - softplus(aj);
            a[static_cast<std::size_t>(j)] = anew;
        }
        scratch.flip(site);
    }
    return delta;
}

void write_rbm(const RbmModel& model, std::ostream& os) {
    const int h = model.hidden(), n = model.dim();
    os << "rbm " << h << " " << n << "\n";
    char buf[40];
    auto put = [&](double v, char sep) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf << sep;
    };
    for (int j = 0; j < h; ++j)
        for (int i = 0; i < n; ++i) put(model.weight(j, i), i + 1 == n ? '\n' : ' ');
    for (int i = 0; i < n; ++i) put(model.visible_bias()[static_cast<std::size_t>(i)],
                                    i + 1 == n ? '\n' : ' ');
    for (int j = 0; j < h; ++j) put(model.hidden_bias()[static_cast<std::size_t>(j)],
                                    j + 1 == h ? '\n' : ' ');
}

RbmModel read_rbm(std::istream& is) {
    std::string tag;
    int h = 0, n = 0;
    if (!(is >> tag >> h >> n) || tag != "rbm")
        throw std::runtime_error("rbm file: malformed header, expected 'rbm <h> <N>'");
    if (h < 1 || n < 1) throw std::runtime_error("rbm file: nonpositive dimensions in header");
    auto read_block = [&](std::size_t count, const char* what) {
        std::vector<double> v(count);
        for (std::size_t i = 0; i < count; ++i)
            if (!(is >> v[i]))
                throw std::runtime_error(std::string("rbm file: truncated while reading ") +
                                         what);
        return v;
    };
    auto w = read_block(static_cast<std::size_t>(h) * static_cast<std::size_t>(n), "W");
    auto b = read_block(static_cast<std::size_t>(n), "b");
    auto c = read_block(static_cast<std::size_t>(h), "c");
    return RbmModel(h, n, std::move(w), std::move(b), std::move(c));
}

void save_rbm(const RbmModel& model, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_rbm(model, os);
    if (!os) throw std::runtime_error("write failed: " + path);
}

RbmModel load_rbm(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open rbm weights file: " + path);
    return read_rbm(is);
}

RbmModel train_rbm_cd(const std::vector<std::vector<std::uint8_t>>& data, int hidden,
                      int epochs, double learning_rate, std::uint64_t seed, int batch_size) {
    if (data.empty()) throw std::invalid_argument("train_rbm_cd: empty dataset");
    const int n = static_cast<int>(data.front().size());
    for (const auto& row : data) {
        if (static_cast<int>(row.size()) != n)
            throw std::invalid_argument("train_rbm_cd: ragged dataset rows");
        for (auto v : row)
            if (v != 0 && v != 1)
                throw std::invalid_argument("train_rbm_cd: data entries must be binary");
    }
    if (hidden < 1) throw std::invalid_argument("train_rbm_cd: hidden must be >= 1");

    Rng rng = make_rng(seed);
    std::normal_distribution<double> gauss(0.0, 0.01);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t hn = static_cast<std::size_t>(hidden) * static_cast<std::size_t>(n);
    std::vector<double> w(hn);
    for (double& wi : w) wi = gauss(rng);
    std::vector<double> b(static_cast<std::size_t>(n), 0.0);
    std::vector<double> c(static_cast<std::size_t>(hidden), 0.0);

    const std::size_t m = data.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);

    std::vector<double> h0(static_cast<std::size_t>(hidden));
    std::vector<std::uint8_t> h0s(static_cast<std::size_t>(hidden));
    std::vector<double> v1p(static_cast<std::size_t>(n));
    std::vector<std::uint8_t> v1(static_cast<std::size_t>(n));
    std::vector<double> h1(static_cast<std::size_t>(hidden));
    std::vector<double> gw(hn), gb(static_cast<std::size_t>(n)),
        gc(static_cast<std::size_t>(hidden));

    for (int epoch = 0; epoch < epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < m; start += static_cast<std::size_t>(batch_size)) {
            const std::size_t stop = std::min(m, start + static_cast<std::size_t>(batch_size));
            const double scale = learning_rate / static_cast<double>(stop - start);
            std::fill(gw.begin(), gw.end(), 0.0);
            std::fill(gb.begin(), gb.end(), 0.0);
            std::fill(gc.begin(), gc.end(), 0.0);
            for (std::size_t s = start; s < stop; ++s) {
                const auto& v0 = data[order[s]];
                // positive phase
                for (int j = 0; j < hidden; ++j) {
                    double a = c[static_cast<std::size_t>(j)];
                    const double* row = &w[static_cast<std::size_t>(j) *
                                           static_cast<std::size_t>(n)];
                    for (int i = 0; i < n; ++i)
                        if (v0[static_cast<std::size_t>(i)]) a += row[i];
                    h0[static_cast<std::size_t>(j)] = sigmoid(a);
                    h0s[static_cast<std::size_t>(j)] =
                        u(rng) < h0[static_cast<std::size_t>(j)] ? 1 : 0;
                }
                // one Gibbs reconstruction
                for (int i = 0; i < n; ++i) {
                    double a = b[static_cast<std::size_t>(i)];
                    for (int j = 0; j < hidden; ++j)
                        if (h0s[static_cast<std::size_t>(j)])
                            a += w[static_cast<std::size_t>(j) * static_cast<std::size_t>(n) +
                                   static_cast<std::size_t>(i)];
                    v1p[static_cast<std::size_t>(i)] = sigmoid(a);
                    v1[static_cast<std::size_t>(i)] = u(rng) < v1p[static_cast<std::size_t>(i)]
                                                          ? 1 : 0;
                }
                for (int j = 0; j < hidden; ++j) {
                    double a = c[static_cast<std::size_t>(j)];
                    const double* row = &w[static_cast<std::size_t>(j) *
                                           static_cast<std::size_t>(n)];
                    for (int i = 0; i < n; ++i)
                        if (v1[static_cast<std::size_t>(i)]) a += row[i];
                    h1[static_cast<std::size_t>(j)] = sigmoid(a);
                }
                for (int j = 0; j < hidden; ++j) {
                    double* grow = &gw[static_cast<std::size_t>(j) *
                                       static_cast<std::size_t>(n)];
                    const double hp = h0[static_cast<std::size_t>(j)];
                    const double hm = h1[static_cast<std::size_t>(j)];
                    for (int i = 0; i < n; ++i)
                        grow[i] += hp * v0[static_cast<std::size_t>(i)] -
                                   hm * v1[static_cast<std::size_t>(i)];
                    gc[static_cast<std::size_t>(j)] += hp - hm;
                }
                for (int i = 0; i < n; ++i)
                    gb[static_cast<std::size_t>(i)] +=
                        static_cast<double>(v0[static_cast<std::size_t>(i)]) -
                        static_cast<double>(v1[static_cast<std::size_t>(i)]);
            }
            for (std::size_t i = 0; i < hn; ++i) w[i] += scale * gw[i];
            for (int i = 0; i < n; ++i)
                b[static_cast<std::size_t>(i)] += scale * gb[static_cast<std::size_t>(i)];
            for (int j = 0; j < hidden; ++j)
                c[static_cast<std::size_t>(j)] += scale * gc[static_cast<std::size_t>(j)];
        }
    }
    return RbmModel(hidden, n, std::move(w), std::move(b), std::move(c));
}

}  // namespace lbp
