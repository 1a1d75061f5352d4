#pragma once

#include <span>
#include <vector>

#include "ringshape/constellation.hpp"

namespace ringshape {

// Bit-LLR computation over the augmented constellation with ring priors.
// Per received symbol: point logits -|y - s|^2 / n0 + log pi_s; logits of
// the two points sharing a label are combined by max-shifted log-sum-exp;
// per-bit LLRs contrast the label classes (positive favors bit 0).
struct DemapConfig {
    const ConstellationSpec* spec = nullptr;
    std::vector<double> log_priors; // over the 2l augmented points, inner first
    double n0 = 0.0;
    double epsilon = 1e-30; // additive guard inside the logs; bounds LLRs when a class underflows

    void validate() const;
};

// LLRs for all symbols, bit 0 first within each symbol.
std::vector<double> compute_llrs(std::span<const cplx> equalized, const DemapConfig& config);

} // namespace ringshape
