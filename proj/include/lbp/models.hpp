#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lbp/model.hpp"
#include "lbp/rng.hpp"

namespace lbp {

// Benchmark configuration labels used throughout: C1 smooth, C2 moderate,
// C3 sharp.
enum class ConfigLabel { C1, C2, C3 };

ConfigLabel parse_config_label(const std::string& s);
std::string to_string(ConfigLabel c);

// ---------------------------------------------------------------------------
// Bernoulli product distribution: pi(x) = prod_i p_i^{x_i} (1-p_i)^{1-x_i}.
class BernoulliModel : public TargetModel {
public:
    explicit BernoulliModel(std::vector<double> p,
                            std::optional<double> epsilon = std::nullopt);

    int dim() const override { return static_cast<int>(p_.size()); }
    std::string family() const override { return "bernoulli"; }

    double log_prob(const BitState& x) const override;
    double flip_delta(const BitState& x, int site) const override;
    void flip_deltas(const BitState& x, std::span<double> out) const override;
    void grad_log_prob(const BitState& x, std::span<double> out) const override;
    double relaxed_log_prob(std::span<const double> x) const override;
    void affected_sites(std::span<const int> flips, std::vector<int>& out) const override;

    const std::vector<double>& probs() const { return p_; }
    // log(p_i / (1 - p_i))
    double logit(int i) const { return logit_[static_cast<std::size_t>(i)]; }

private:
    std::vector<double> p_;
    std::vector<double> logit_;
    std::vector<double> log_p_, log_1mp_;
};

// p_i sampled uniformly from the configuration's range:
// C1 [0.25, 0.75], C2 [0.15, 0.85], C3 [0.05, 0.95].
BernoulliModel make_bernoulli(int n, ConfigLabel config, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Ising model on a p x p square lattice with 4-neighbor edges:
// pi(x) ~ exp(sum_i alpha_i s_i - lambda * sum_{(i,j) in E} s_i s_j),
// spins s = 2x - 1. Note the antiferromagnetic sign on the coupling.
class IsingModel : public TargetModel {
public:
    IsingModel(int side, std::vector<double> alpha, double lambda);

    int dim() const override { return side_ * side_; }
    std::string family() const override { return "ising"; }

    double log_prob(const BitState& x) const override;
    double flip_delta(const BitState& x, int site) const override;
    void grad_log_prob(const BitState& x, std::span<double> out) const override;
    double relaxed_log_prob(std::span<const double> x) const override;
    void affected_sites(std::span<const int> flips, std::vector<int>& out) const override;

    int side() const { return side_; }
    double coupling() const { return lambda_; }
    const std::vector<double>& field() const { return alpha_; }
    std::span<const int> neighbors(int site) const {
        return {nbr_[static_cast<std::size_t>(site)].data(),
                static_cast<std::size_t>(nbr_count_[static_cast<std::size_t>(site)])};
    }

private:
    int side_;
    std::vector<double> alpha_;
    double lambda_;
    std::vector<std::array<int, 4>> nbr_;
    std::vector<int> nbr_count_;
};

// Field alpha_v ~ U(in-disk range) inside the disk
// (v1 - p/2)^2 + (v2 - p/2)^2 <= p^2/2, else U(out-disk range):
// C1 (-0.2,0.4)/(-0.4,0.2) lambda 0.1; C2 (-0.3,0.6)/(-0.6,0.3) lambda 0.15;
// C3 (-0.4,0.8)/(-0.8,0.4) lambda 0.2.
IsingModel make_ising(int side, ConfigLabel config, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Factorial HMM posterior. Latent x in {0,1}^{L x K} with, per time step l,
// a chain across factors: p(x_{l,1}=1) = 0.1 and stay probability 0.8;
// emission y_l ~ N(w . x_l + b, sigma2). The model evaluates the
// unnormalized posterior log p(x) + log p(y | x) for the held observation
// series y.
class FhmmModel : public TargetModel {
public:
    FhmmModel(int length, int factors, std::vector<double> w, double b, double sigma2,
              std::vector<double> y);

    int dim() const override { return length_ * factors_; }
    std::string family() const override { return "fhmm"; }

    double log_prob(const BitState& x) const override;
    double flip_delta(const BitState& x, int site) const override;
    void grad_log_prob(const BitState& x, std::span<double> out) const override;
    double relaxed_log_prob(std::span<const double> x) const override;
    void affected_sites(std::span<const int> flips, std::vector<int>& out) const override;

    int length() const { return length_; }
    int factors() const { return factors_; }
    double sigma2() const { return sigma2_; }
    const std::vector<double>& observations() const { return y_; }

    static constexpr double kInitOn = 0.1;   // p(x_{l,1} = 1)
    static constexpr double kStay = 0.8;     // p(x_{l,k} = x_{l,k-1})

private:
    double emission_mean(const BitState& x, int l) const;

    int length_, factors_;
    std::vector<double> w_;
    double b_;
    double sigma2_;
    std::vector<double> y_;
    double log_init_[2];   // log p(x1 = 0), log p(x1 = 1)
    double log_trans_[2];  // [same? 1 : 0]
};

// sigma2 per configuration: C1 2.0, C2 1.0, C3 0.5. Emission parameters
// w_k, b ~ N(0,1); the latent truth is drawn from the prior and y from the
// emission model, all from `seed`.
FhmmModel make_fhmm(int length, int factors, ConfigLabel config, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Restricted Boltzmann machine with hidden units marginalized out:
// log pi(x) = b . x + sum_j softplus(W_j . x + c_j).
class RbmModel : public TargetModel {
public:
    // weights is row-major h x n.
    RbmModel(int hidden, int visible, std::vector<double> weights, std::vector<double> b,
             std::vector<double> c);

    int dim() const override { return visible_; }
    std::string family() const override { return "rbm"; }

    double log_prob(const BitState& x) const override;
    double flip_delta(const BitState& x, int site) const override;
    void flip_deltas(const BitState& x, std::span<double> out) const override;
    void grad_log_prob(const BitState& x, std::span<double> out) const override;
    double relaxed_log_prob(std::span<const double> x) const override;
    double log_ratio_for_flips(const BitState& x, std::span<const int> flips,
                               BitState& scratch) const override;

    int hidden() const { return hidden_; }
    double weight(int j, int i) const {
        return w_[static_cast<std::size_t>(j) * static_cast<std::size_t>(visible_) +
                  static_cast<std::size_t>(i)];
    }
    const std::vector<double>& visible_bias() const { return b_; }
    const std::vector<double>& hidden_bias() const { return c_; }

private:
    void activations(const BitState& x, std::vector<double>& a) const;

    int hidden_, visible_;
    std::vector<double> w_;  // row-major h x n
    std::vector<double> b_, c_;
};

// Textual weights file, round-trip exact:
//   rbm <h> <N>
//   W row 0 ... W row h-1, then b, then c (whitespace separated).
void save_rbm(const RbmModel& model, const std::string& path);
RbmModel load_rbm(const std::string& path);
void write_rbm(const RbmModel& model, std::ostream& os);
RbmModel read_rbm(std::istream& is);

// CD-1 contrastive divergence with minibatches of 100. Rows of `data` are
// binary visible vectors.
RbmModel train_rbm_cd(const std::vector<std::vector<std::uint8_t>>& data, int hidden,
                      int epochs, double learning_rate, std::uint64_t seed,
                      int batch_size = 100);

}  // namespace lbp
