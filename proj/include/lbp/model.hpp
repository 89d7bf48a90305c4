#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lbp/bit_state.hpp"

namespace lbp {

// Uniform evaluation interface over the binary target distributions.
// All log-probabilities are unnormalized; only differences are meaningful.
//
// Instances are immutable after construction and safe to share across
// concurrently running chains.
class TargetModel {
public:
    virtual ~TargetModel() = default;

    virtual int dim() const = 0;
    virtual std::string family() const = 0;

    // Unnormalized log pi(x).
    virtual double log_prob(const BitState& x) const = 0;

    // log pi(x with bit `site` flipped) - log pi(x), computed in local time.
    virtual double flip_delta(const BitState& x, int site) const = 0;

    // All N single-site flip deltas at x. Default loops flip_delta; models
    // with shared per-state work (RBM activations) override.
    virtual void flip_deltas(const BitState& x, std::span<double> out) const;

    // Gradient of the continuous relaxation of log pi, evaluated at the
    // binary point x.
    virtual void grad_log_prob(const BitState& x, std::span<double> out) const = 0;

    // The relaxation itself, on real-valued inputs in [0,1]^N. Used by the
    // finite-difference checks of grad_log_prob.
    virtual double relaxed_log_prob(std::span<const double> x) const = 0;

    // log pi(y) - log pi(x) where y is x with `flips` applied in order
    // (XOR semantics; repeated indices cancel). Exact via sequential single
    // flips on a scratch copy; the telescoping sum has no approximation.
    virtual double log_ratio_for_flips(const BitState& x, std::span<const int> flips,
                                       BitState& scratch) const;

    // Superset of sites whose flip_delta may change when the sites in
    // `flips` are toggled. Enables incremental weight updates in the
    // samplers; the conservative default is all sites.
    virtual void affected_sites(std::span<const int> flips, std::vector<int>& out) const;

    void check_state(const BitState& x) const {
        if (x.size() != dim())
            throw std::invalid_argument(family() + ": state dimension " +
                                        std::to_string(x.size()) + " != model dimension " +
                                        std::to_string(dim()));
    }

    void check_site(int site) const {
        if (site < 0 || site >= dim())
            throw std::out_of_range(family() + ": site index " + std::to_string(site) +
                                    " out of range [0, " + std::to_string(dim()) + ")");
    }
};

}  // namespace lbp
