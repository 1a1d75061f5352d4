#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace ringshape {

using cplx = std::complex<double>;

// Ring-partitioned QAM constellation: a standard QAM grid (inner ring) plus
// an equal-size outer ring. Each inner point and its outer representative
// carry the same bit label, so the coded bits are recoverable regardless of
// which ring was transmitted.
//
// Immutable after construction; safe to share across threads.
struct ConstellationSpec {
    std::vector<cplx> inner;        // S_i, odd-integer grid coordinates
    std::vector<cplx> outer;        // S_o; outer[ring_map[i]] pairs with inner[i]
    std::vector<int> ring_map;      // inner index -> index of its outer representative
    std::vector<std::uint32_t> labels; // per-inner-point label, bits_per_symbol wide
    int bits_per_symbol = 0;        // log2(inner.size())
    double inner_power = 0.0;       // mean |s|^2 over S_i
    double outer_power = 0.0;       // mean |s|^2 over S_o

    int order() const { return static_cast<int>(inner.size()); }
    int augmented_size() const { return 2 * order(); }

    // The inner->outer map f.
    cplx map_outer(cplx inner_point) const;

    // Augmented point list: indices [0, l) are inner, [l, 2l) are outer.
    cplx point(int idx) const;
    bool is_outer_index(int idx) const { return idx >= order(); }
    std::uint32_t label_of_point(int idx) const;

    // Index of the exactly-matching inner point, or -1.
    int inner_index_of(cplx p) const;

    double peak_power() const;
};

// Builds the augmented constellation for order 4 or 16.
// Order 4:  inner {±1±1j}, outer {±3±1j}, f(a+bj) = (a - 4 sign(a)) + bj.
// Order 16: inner = odd-integer 16-QAM grid, outer = the 16 remaining points
//           of the 32-point cross; f pairs same-quadrant points matched in
//           angle order. Gray labels on the inner grid.
ConstellationSpec build_augmented_qam(int order);

// P_avg = (1 - pi_outer) * P_i + pi_outer * P_o.
double average_power(const ConstellationSpec& spec, double pi_outer);

// Peak symbol energy over the augmented set divided by P_avg.
double papr(const ConstellationSpec& spec, double pi_outer);

// Per-point prior over the 2l augmented points (inner first), for a given
// outer-ring probability. Sums to 1.
std::vector<double> point_priors(const ConstellationSpec& spec, double pi_outer);

// Label bits <-> inner point. bits[k] is bit k of the label (bit 0 first).
cplx bits_to_inner_point(const std::vector<std::uint8_t>& bits, const ConstellationSpec& spec);
std::vector<std::uint8_t> point_to_bits(cplx inner_point, const ConstellationSpec& spec);

// Tabular text dump (columns: re, im, ring, label bits) for plotting.
void dump_constellation(const ConstellationSpec& spec, std::ostream& os);

} // namespace ringshape
