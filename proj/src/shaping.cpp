#include "ringshape/shaping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ringshape/errors.hpp"

namespace ringshape {

namespace {

// Exact C(n, k); 128-bit intermediates keep the incremental products safe
// across the whole supported block-length range.
std::uint64_t binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    }
    return static_cast<std::uint64_t>(r);
}

int weight_of(std::span<const std::uint8_t> cw) {
    int w = 0;
    for (auto b : cw) w += b & 1;
    return w;
}

// Rank of a weight-w support tuple within its weight class, supports in
// lexicographic order.
std::uint64_t rank_support(std::span<const int> pos, int z) {
    const int w = static_cast<int>(pos.size());
    std::uint64_t rank = 0;
    int start = 0;
    for (int j = 0; j < w; ++j) {
        for (int t = start; t < pos[j]; ++t) rank += binom(z - 1 - t, w - 1 - j);
        start = pos[j] + 1;
    }
    return rank;
}

std::vector<int> unrank_support(std::uint64_t rank, int z, int w) {
    std::vector<int> pos(w);
    int start = 0;
    for (int j = 0; j < w; ++j) {
        for (int t = start;; ++t) {
            const std::uint64_t c = binom(z - 1 - t, w - 1 - j);
            if (rank < c) {
                pos[j] = t;
                start = t + 1;
                break;
            }
            rank -= c;
        }
    }
    return pos;
}

int nearest_point(cplx y, std::span<const cplx> pts, double* dist_out) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double d = std::norm(y - pts[i]);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(i);
        }
    }
    if (dist_out) *dist_out = std::sqrt(best_d);
    return best;
}

} // namespace

ShapingCode ShapingCode::make(int z, int sparsity) {
    if (z < 1 || z > 62) throw ConfigError("shaping: block length out of range [1, 62]");
    if (sparsity < 0 || sparsity > z) throw ConfigError("shaping: sparsity out of range [0, z]");
    ShapingCode code;
    code.z = z;
    code.sparsity = sparsity;
    code.codebook_size = 0;
    for (int w = 0; w <= sparsity; ++w) code.codebook_size += binom(z, w);
    code.bits_per_block = 0;
    while ((1ull << (code.bits_per_block + 1)) <= code.codebook_size) ++code.bits_per_block;
    return code;
}

bool ShapingCode::is_valid_codeword(std::span<const std::uint8_t> cw) const {
    return static_cast<int>(cw.size()) == z && weight_of(cw) <= sparsity;
}

std::vector<std::uint8_t> index_to_codeword(std::uint64_t index, const ShapingCode& code) {
    if (index >= (1ull << code.bits_per_block)) throw ConfigError("shaping: index out of range");
    std::vector<std::uint8_t> cw(code.z, 0);
    int w = 0;
    while (index >= binom(code.z, w)) {
        index -= binom(code.z, w);
        ++w;
    }
    for (int p : unrank_support(index, code.z, w)) cw[p] = 1;
    return cw;
}

std::uint64_t codeword_to_index(std::span<const std::uint8_t> codeword, const ShapingCode& code) {
    if (static_cast<int>(codeword.size()) != code.z) throw ConfigError("shaping: codeword length mismatch");
    const int w = weight_of(codeword);
    if (w > code.sparsity) throw ConfigError("shaping: codeword weight exceeds sparsity");
    std::vector<int> pos;
    for (int i = 0; i < code.z; ++i) {
        if (codeword[i]) pos.push_back(i);
    }
    std::uint64_t index = 0;
    for (int v = 0; v < w; ++v) index += binom(code.z, v);
    return index + rank_support(pos, code.z);
}

double shaping_rate(const ShapingCode& code) {
    return static_cast<double>(code.bits_per_block) / code.z;
}

double outer_probability(const ShapingCode& code) {
    const std::uint64_t used = 1ull << code.bits_per_block;
    std::uint64_t count = 0;
    std::uint64_t weight_sum = 0;
    for (int w = 0; w <= code.sparsity && count < used; ++w) {
        const std::uint64_t c = std::min(binom(code.z, w), used - count);
        count += c;
        weight_sum += c * static_cast<std::uint64_t>(w);
    }
    return static_cast<double>(weight_sum) / (static_cast<double>(used) * code.z);
}

ShapedBlock shaping_encode(std::span<const cplx> inner_symbols, std::uint64_t shaping_index,
                           const ShapingCode& code, const ConstellationSpec& spec) {
    if (static_cast<int>(inner_symbols.size()) != code.z)
        throw ConfigError("shaping_encode: block length mismatch");
    ShapedBlock blk;
    blk.codeword = index_to_codeword(shaping_index, code);
    blk.symbols.resize(code.z);
    for (int i = 0; i < code.z; ++i) {
        blk.symbols[i] = blk.codeword[i] ? spec.map_outer(inner_symbols[i]) : inner_symbols[i];
        if (!blk.codeword[i] && spec.inner_index_of(inner_symbols[i]) < 0)
            throw ConfigError("shaping_encode: symbol not in the inner ring");
    }
    return blk;
}

ShapingDecodeResult shaping_decode(std::span<const cplx> equalized, const ShapingCode& code,
                                   const ConstellationSpec& spec) {
    if (static_cast<int>(equalized.size()) != code.z)
        throw ConfigError("shaping_decode: block length mismatch");
    const int l = spec.order();

    ShapingDecodeResult res;
    res.codeword.resize(code.z);
    res.hard_symbols.resize(code.z);
    res.distances.resize(code.z);

    // Detection over the full augmented set; the ring indicator of the
    // nearest point is the raw codeword.
    std::vector<cplx> all(spec.inner);
    all.insert(all.end(), spec.outer.begin(), spec.outer.end());
    for (int i = 0; i < code.z; ++i) {
        const int idx = nearest_point(equalized[i], all, &res.distances[i]);
        res.hard_symbols[i] = all[idx];
        res.codeword[i] = idx >= l ? 1 : 0;
    }

    // Repair: while invalid, flip the dirtiest offending position and
    // re-detect it inside the ring the flip forces.
    int guard = 0;
    while (guard++ <= code.z) {
        // Index range cannot overflow when |C| is a power of two; guarded
        // anyway for general codebook sizes.
        if (weight_of(res.codeword) <= code.sparsity &&
            codeword_to_index(res.codeword, code) < (1ull << code.bits_per_block)) {
            break;
        }
        // Flip the 1-position with the largest distance metric.
        int flip = -1;
        double worst = -1.0;
        for (int i = 0; i < code.z; ++i) {
            if (res.codeword[i] && res.distances[i] > worst) {
                worst = res.distances[i];
                flip = i;
            }
        }
        if (flip < 0) break; // all-zero is always valid and in range
        res.codeword[flip] = 0;
        const int idx = nearest_point(equalized[flip], spec.inner, nullptr);
        res.hard_symbols[flip] = spec.inner[idx];
    }

    res.index = codeword_to_index(res.codeword, code);
    return res;
}

std::vector<std::uint8_t> index_to_bits(std::uint64_t index, int nbits) {
    std::vector<std::uint8_t> bits(nbits);
    for (int k = 0; k < nbits; ++k) bits[k] = (index >> (nbits - 1 - k)) & 1u;
    return bits;
}

std::uint64_t bits_to_index(std::span<const std::uint8_t> bits) {
    std::uint64_t v = 0;
    for (auto b : bits) v = (v << 1) | (b & 1u);
    return v;
}

} // namespace ringshape
