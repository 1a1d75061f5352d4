#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ringshape::oracle {

// Every vector c with H c = 0 over GF(2), by exhaustive enumeration
// (n <= 24). Rows given as variable-index lists.
std::vector<std::vector<std::uint8_t>> all_codewords(int n,
                                                     const std::vector<std::vector<int>>& rows);

// Flooding sum-product (tanh rule) reference decoder. Positive LLR means
// bit 0. Returns hard decisions after convergence or max_iters.
std::vector<std::uint8_t> sum_product_decode(std::span<const double> llrs,
                                             const std::vector<std::vector<int>>& rows,
                                             int max_iters);

} // namespace ringshape::oracle
