#include "ringshape/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "ringshape/errors.hpp"

namespace ringshape {

namespace {

constexpr double kMatchTol = 1e-9;

std::uint32_t gray_code(std::uint32_t i) { return i ^ (i >> 1); }

// Gray bits for one axis: level values descending (+max first), so the
// all-zero label lands on the first-quadrant point nearest +max+maxj.
// For 4-QAM this puts [0 0] on 1+1j.
std::uint32_t axis_gray_bits(double coord, const std::vector<double>& levels_desc) {
    for (std::uint32_t i = 0; i < levels_desc.size(); ++i) {
        if (std::abs(coord - levels_desc[i]) < kMatchTol) return gray_code(i);
    }
    throw ConfigError("constellation: coordinate off the level grid");
}

double mean_power(const std::vector<cplx>& pts) {
    double s = 0.0;
    for (auto p : pts) s += std::norm(p);
    return s / static_cast<double>(pts.size());
}

int quadrant_of(cplx p) {
    return (p.real() < 0 ? 1 : 0) | (p.imag() < 0 ? 2 : 0);
}

// Sort key inside one quadrant: angle, with modulus breaking angle ties
// (1+1j and 3+3j share the 45 degree diagonal).
bool angle_less(cplx a, cplx b) {
    const double aa = std::atan2(a.imag(), a.real());
    const double ab = std::atan2(b.imag(), b.real());
    if (std::abs(aa - ab) > 1e-12) return aa < ab;
    return std::abs(a) < std::abs(b);
}

void validate(const ConstellationSpec& spec) {
    const int l = spec.order();
    if (l < 2 || (l & (l - 1)) != 0) throw ConfigError("constellation: size must be a power of two");
    if (static_cast<int>(spec.outer.size()) != l) throw ConfigError("constellation: ring sizes differ");

    double max_inner = 0.0, min_outer = 1e300;
    for (auto p : spec.inner) max_inner = std::max(max_inner, std::norm(p));
    for (auto p : spec.outer) min_outer = std::min(min_outer, std::norm(p));
    if (!(min_outer > max_inner)) throw ConfigError("constellation: rings are not annular");

    std::set<std::uint32_t> seen(spec.labels.begin(), spec.labels.end());
    if (static_cast<int>(seen.size()) != l) throw ConfigError("constellation: labels not distinct");

    std::vector<bool> hit(l, false);
    for (int i = 0; i < l; ++i) {
        const int j = spec.ring_map[i];
        if (j < 0 || j >= l || hit[j]) throw ConfigError("constellation: ring_map is not a bijection");
        hit[j] = true;
        for (auto q : spec.inner) {
            if (std::abs(q - spec.outer[j]) < kMatchTol)
                throw ConfigError("constellation: rings overlap");
        }
    }
}

} // namespace

cplx ConstellationSpec::map_outer(cplx inner_point) const {
    const int i = inner_index_of(inner_point);
    if (i < 0) throw ConfigError("constellation: point not in the inner ring");
    return outer[ring_map[i]];
}

cplx ConstellationSpec::point(int idx) const {
    const int l = order();
    return idx < l ? inner[idx] : outer[idx - l];
}

std::uint32_t ConstellationSpec::label_of_point(int idx) const {
    const int l = order();
    if (idx < l) return labels[idx];
    // Outer point: label of the inner point it represents.
    for (int i = 0; i < l; ++i) {
        if (ring_map[i] == idx - l) return labels[i];
    }
    throw ConfigError("constellation: dangling outer index");
}

int ConstellationSpec::inner_index_of(cplx p) const {
    for (int i = 0; i < order(); ++i) {
        if (std::abs(inner[i] - p) < kMatchTol) return i;
    }
    return -1;
}

double ConstellationSpec::peak_power() const {
    double peak = 0.0;
    for (auto p : inner) peak = std::max(peak, std::norm(p));
    for (auto p : outer) peak = std::max(peak, std::norm(p));
    return peak;
}

ConstellationSpec build_augmented_qam(int order) {
    if (order != 4 && order != 16) throw ConfigError("constellation: unsupported order (use 4 or 16)");

    ConstellationSpec spec;
    spec.bits_per_symbol = order == 4 ? 2 : 4;
    const int bits_per_axis = spec.bits_per_symbol / 2;
    const std::vector<double> levels_desc =
        bits_per_axis == 1 ? std::vector<double>{1.0, -1.0} : std::vector<double>{3.0, 1.0, -1.0, -3.0};

    // Inner ring: full odd-integer grid, labeled by per-axis Gray codes
    // (real bits low, imaginary bits high).
    for (double re : levels_desc) {
        for (double im : levels_desc) {
            spec.inner.push_back({re, im});
            const std::uint32_t gr = axis_gray_bits(re, levels_desc);
            const std::uint32_t gi = axis_gray_bits(im, levels_desc);
            spec.labels.push_back(gr | (gi << bits_per_axis));
        }
    }

    const int l = spec.order();
    spec.outer.resize(l);
    spec.ring_map.resize(l);

    if (order == 4) {
        // f(a+bj) = (a - 4 sign(a)) + bj
        for (int i = 0; i < l; ++i) {
            const cplx p = spec.inner[i];
            spec.outer[i] = {p.real() - 4.0 * (p.real() > 0 ? 1.0 : -1.0), p.imag()};
            spec.ring_map[i] = i;
        }
    } else {
        // Outer ring: the 16 remainder points of the 32-point cross.
        std::vector<cplx> ring;
        for (double a : {1.0, 3.0}) {
            for (double sa : {1.0, -1.0}) {
                for (double sb : {1.0, -1.0}) {
                    ring.push_back({sa * a, sb * 5.0});
                    ring.push_back({sa * 5.0, sb * a});
                }
            }
        }
        // Pair inner and outer points quadrant by quadrant, matching in
        // angle order.
        for (int q = 0; q < 4; ++q) {
            std::vector<int> in_idx;
            std::vector<cplx> out_pts;
            for (int i = 0; i < l; ++i) {
                if (quadrant_of(spec.inner[i]) == q) in_idx.push_back(i);
            }
            for (auto p : ring) {
                if (quadrant_of(p) == q) out_pts.push_back(p);
            }
            std::sort(in_idx.begin(), in_idx.end(),
                      [&](int a, int b) { return angle_less(spec.inner[a], spec.inner[b]); });
            std::sort(out_pts.begin(), out_pts.end(), angle_less);
            for (std::size_t r = 0; r < in_idx.size(); ++r) {
                spec.outer[in_idx[r]] = out_pts[r];
                spec.ring_map[in_idx[r]] = in_idx[r];
            }
        }
    }

    spec.inner_power = mean_power(spec.inner);
    spec.outer_power = mean_power(spec.outer);
    validate(spec);
    return spec;
}

double average_power(const ConstellationSpec& spec, double pi_outer) {
    if (pi_outer < 0.0 || pi_outer > 1.0) throw ConfigError("average_power: pi_outer out of [0,1]");
    return (1.0 - pi_outer) * spec.inner_power + pi_outer * spec.outer_power;
}

double papr(const ConstellationSpec& spec, double pi_outer) {
    return spec.peak_power() / average_power(spec, pi_outer);
}

std::vector<double> point_priors(const ConstellationSpec& spec, double pi_outer) {
    if (pi_outer < 0.0 || pi_outer > 1.0) throw ConfigError("point_priors: pi_outer out of [0,1]");
    const int l = spec.order();
    std::vector<double> pri(2 * l);
    for (int i = 0; i < l; ++i) pri[i] = (1.0 - pi_outer) / l;
    for (int i = l; i < 2 * l; ++i) pri[i] = pi_outer / l;
    return pri;
}

cplx bits_to_inner_point(const std::vector<std::uint8_t>& bits, const ConstellationSpec& spec) {
    if (static_cast<int>(bits.size()) != spec.bits_per_symbol)
        throw ConfigError("bits_to_inner_point: bit count mismatch");
    std::uint32_t label = 0;
    for (std::size_t k = 0; k < bits.size(); ++k) label |= (bits[k] & 1u) << k;
    for (int i = 0; i < spec.order(); ++i) {
        if (spec.labels[i] == label) return spec.inner[i];
    }
    throw ConfigError("bits_to_inner_point: no point with that label");
}

std::vector<std::uint8_t> point_to_bits(cplx inner_point, const ConstellationSpec& spec) {
    const int i = spec.inner_index_of(inner_point);
    if (i < 0) throw ConfigError("point_to_bits: point not in the inner ring");
    std::vector<std::uint8_t> bits(spec.bits_per_symbol);
    for (int k = 0; k < spec.bits_per_symbol; ++k) bits[k] = (spec.labels[i] >> k) & 1u;
    return bits;
}

void dump_constellation(const ConstellationSpec& spec, std::ostream& os) {
    os << "# re im ring label\n";
    auto emit = [&](cplx p, const char* ring, std::uint32_t label) {
        os << p.real() << ' ' << p.imag() << ' ' << ring << ' ';
        for (int k = 0; k < spec.bits_per_symbol; ++k) os << ((label >> k) & 1u);
        os << '\n';
    };
    for (int i = 0; i < spec.order(); ++i) emit(spec.inner[i], "inner", spec.labels[i]);
    for (int i = 0; i < spec.order(); ++i)
        emit(spec.outer[spec.ring_map[i]], "outer", spec.labels[i]);
}

} // namespace ringshape
