#pragma once

#include <cmath>
#include <vector>

#include "lbp/bit_state.hpp"
#include "lbp/model.hpp"
#include "lbp/rng.hpp"

namespace test_util {

inline lbp::BitState random_state(int n, lbp::Rng& rng) {
    lbp::BitState x(n);
    for (int i = 0; i < n; ++i) x.set(i, lbp::uniform01(rng) < 0.5 ? 1 : 0);
    return x;
}

// central finite differences of the relaxed log-density at a binary point
inline std::vector<double> fd_gradient(const lbp::TargetModel& model, const lbp::BitState& x,
                                       double h = 1e-5) {
    const int n = model.dim();
    std::vector<double> point(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) point[static_cast<std::size_t>(i)] = x[i];
    std::vector<double> grad(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double orig = point[static_cast<std::size_t>(i)];
        point[static_cast<std::size_t>(i)] = orig + h;
        const double up = model.relaxed_log_prob(point);
        point[static_cast<std::size_t>(i)] = orig - h;
        const double down = model.relaxed_log_prob(point);
        point[static_cast<std::size_t>(i)] = orig;
        grad[static_cast<std::size_t>(i)] = (up - down) / (2.0 * h);
    }
    return grad;
}

// brute-force flip delta from two log_prob calls
inline double brute_flip_delta(const lbp::TargetModel& model, const lbp::BitState& x, int i) {
    lbp::BitState y = x;
    y.flip(i);
    return model.log_prob(y) - model.log_prob(x);
}

}  // namespace test_util
