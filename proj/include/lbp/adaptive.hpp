#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lbp/rng.hpp"

namespace lbp {

// floor(r) + 1 with probability frac(r), else floor(r); expectation r.
// Result is clamped below at 1.
inline int probabilistic_round(double scale_real, Rng& rng) {
    const double fl = std::floor(scale_real);
    const double frac = scale_real - fl;
    int r = static_cast<int>(fl);
    if (frac > 0.0 && uniform01(rng) < frac) ++r;
    return std::max(1, r);
}

// Stochastic-approximation controller for the proposal scale:
// R <- R + eta * (A - delta), clamped to [1, N], frozen after the warmup
// horizon. Targets 0.574 for LBP and 0.234 for RWM. One controller per
// chain; never shared.
class ScaleController {
public:
    ScaleController(double initial_scale, double target_rate, long warmup, int dim,
                    double step_size = 1.0)
        : scale_(initial_scale), target_(target_rate), eta_(step_size), warmup_(warmup),
          dim_(dim) {
        if (!(target_rate > 0.0 && target_rate < 1.0))
            throw std::invalid_argument("scale controller: target rate must lie in (0, 1)");
        if (dim < 1) throw std::invalid_argument("scale controller: dimension must be >= 1");
        clamp();
    }

    // Update from the step's acceptance probability (the M-H probability A,
    // not the 0/1 indicator).
    void adapt(double accept_prob) {
        if (accept_prob < 0.0 || accept_prob > 1.0)
            throw std::invalid_argument("scale controller: acceptance probability outside [0, 1]");
        if (!frozen()) {
            scale_ += eta_ * (accept_prob - target_);
            clamp();
        }
        ++t_;
    }

    bool frozen() const { return t_ >= warmup_; }
    double scale_real() const { return scale_; }
    double target_rate() const { return target_; }
    long step_count() const { return t_; }
    long warmup() const { return warmup_; }

    int round_scale(Rng& rng) const {
        return std::min(probabilistic_round(scale_, rng), dim_);
    }

    static constexpr double kLbpTargetRate = 0.574;
    static constexpr double kRwmTargetRate = 0.234;

private:
    void clamp() { scale_ = std::clamp(scale_, 1.0, static_cast<double>(dim_)); }

    double scale_;
    double target_;
    double eta_;
    long warmup_;
    int dim_;
    long t_ = 0;
};

}  // namespace lbp
