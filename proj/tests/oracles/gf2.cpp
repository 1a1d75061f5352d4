#include "oracles/gf2.hpp"

#include <algorithm>
#include <cmath>

namespace ringshape::oracle {

std::vector<std::vector<std::uint8_t>> all_codewords(int n,
                                                     const std::vector<std::vector<int>>& rows) {
    std::vector<std::vector<std::uint8_t>> out;
    for (std::uint32_t v = 0; v < (1u << n); ++v) {
        bool ok = true;
        for (const auto& row : rows) {
            int s = 0;
            for (int idx : row) s ^= (v >> idx) & 1u;
            if (s) {
                ok = false;
                break;
            }
        }
        if (ok) {
            std::vector<std::uint8_t> cw(n);
            for (int i = 0; i < n; ++i) cw[i] = (v >> i) & 1u;
            out.push_back(std::move(cw));
        }
    }
    return out;
}

std::vector<std::uint8_t> sum_product_decode(std::span<const double> llrs,
                                             const std::vector<std::vector<int>>& rows,
                                             int max_iters) {
    const int n = static_cast<int>(llrs.size());
    const int m = static_cast<int>(rows.size());
    std::vector<std::vector<double>> r(m); // check -> var
    for (int c = 0; c < m; ++c) r[c].assign(rows[c].size(), 0.0);

    std::vector<std::uint8_t> hard(n, 0);
    std::vector<double> post(n);
    for (int iter = 0; iter < max_iters; ++iter) {
        // variable-to-check via posteriors minus own message (flooding)
        for (int v = 0; v < n; ++v) post[v] = llrs[v];
        for (int c = 0; c < m; ++c) {
            for (std::size_t j = 0; j < rows[c].size(); ++j) post[rows[c][j]] += r[c][j];
        }
        for (int c = 0; c < m; ++c) {
            const auto& row = rows[c];
            std::vector<double> q(row.size());
            for (std::size_t j = 0; j < row.size(); ++j) q[j] = post[row[j]] - r[c][j];
            for (std::size_t j = 0; j < row.size(); ++j) {
                double prod = 1.0;
                for (std::size_t i = 0; i < row.size(); ++i) {
                    if (i != j) prod *= std::tanh(q[i] / 2.0);
                }
                prod = std::clamp(prod, -0.9999999999, 0.9999999999);
                r[c][j] = 2.0 * std::atanh(prod);
            }
        }
        for (int v = 0; v < n; ++v) post[v] = llrs[v];
        for (int c = 0; c < m; ++c) {
            for (std::size_t j = 0; j < rows[c].size(); ++j) post[rows[c][j]] += r[c][j];
        }
        for (int v = 0; v < n; ++v) hard[v] = post[v] < 0.0 ? 1 : 0;
        bool ok = true;
        for (const auto& row : rows) {
            int s = 0;
            for (int idx : row) s ^= hard[idx];
            if (s) {
                ok = false;
                break;
            }
        }
        if (ok) return hard;
    }
    return hard;
}

} // namespace ringshape::oracle
