#include "ringshape/ofdm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ringshape/errors.hpp"
#include "ringshape/rng.hpp"

namespace ringshape {

bool PilotPattern::is_pilot(int subcarrier, int symbol) const {
    if (std::find(symbol_indices.begin(), symbol_indices.end(), symbol) == symbol_indices.end())
        return false;
    return (subcarrier - comb_offset) % comb_stride == 0 && subcarrier >= comb_offset;
}

int PilotPattern::count(const OfdmParams& params) const {
    int c = 0;
    for (int m = 0; m < params.subcarriers; ++m) {
        for (int n = 0; n < params.symbols; ++n) c += is_pilot(m, n) ? 1 : 0;
    }
    return c;
}

DftMatrices DftMatrices::make(int m) {
    DftMatrices d;
    d.fwd.resize(m, m);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) {
            const double phi = -2.0 * std::numbers::pi * r * c / m;
            d.fwd(r, c) = scale * cplx(std::cos(phi), std::sin(phi));
        }
    }
    d.inv = d.fwd.adjoint();
    return d;
}

Eigen::VectorXcd ofdm_modulate(const Eigen::MatrixXcd& x, const OfdmParams& params) {
    if (x.rows() != params.subcarriers || x.cols() != params.symbols)
        throw ConfigError("ofdm_modulate: grid dimensions mismatch");
    const DftMatrices dft = DftMatrices::make(params.subcarriers);
    Eigen::MatrixXcd t = dft.inv * x;
    return Eigen::Map<Eigen::VectorXcd>(t.data(), t.size());
}

Eigen::VectorXcd ofdm_modulate(const FrameGrid& grid, const OfdmParams& params) {
    return ofdm_modulate(grid.x, params);
}

Eigen::MatrixXcd ofdm_demodulate(const Eigen::VectorXcd& time_signal, const OfdmParams& params) {
    if (time_signal.size() != params.grid_size())
        throw ConfigError("ofdm_demodulate: length mismatch");
    const DftMatrices dft = DftMatrices::make(params.subcarriers);
    Eigen::Map<const Eigen::MatrixXcd> t(time_signal.data(), params.subcarriers, params.symbols);
    return dft.fwd * t;
}

Eigen::MatrixXcd pilot_reference(const PilotPattern& pattern, const OfdmParams& params) {
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(params.subcarriers, params.symbols);
    Rng rng(derive_seed(pattern.seed, 0));
    const double a = pattern.amplitude / std::sqrt(2.0);
    // Fill order matches map_frame so both ends generate the same sequence.
    for (int m = 0; m < params.subcarriers; ++m) {
        for (int n = 0; n < params.symbols; ++n) {
            if (pattern.is_pilot(m, n)) {
                p(m, n) = cplx(rng.bit() ? a : -a, rng.bit() ? a : -a);
            }
        }
    }
    return p;
}

FrameGrid map_frame(const std::vector<cplx>& data_points, const PilotPattern& pattern,
                    const OfdmParams& params) {
    if (pattern.symbol_indices.empty()) throw ConfigError("map_frame: pattern has no pilot symbols");
    if (pattern.comb_stride < 1) throw ConfigError("map_frame: comb stride must be >= 1");

    FrameGrid grid;
    grid.x = pilot_reference(pattern, params);
    grid.pilot_mask.resize(params.subcarriers, params.symbols);

    std::size_t next = 0;
    for (int m = 0; m < params.subcarriers; ++m) {
        for (int n = 0; n < params.symbols; ++n) {
            const bool p = pattern.is_pilot(m, n);
            grid.pilot_mask(m, n) = p;
            if (!p) {
                if (next >= data_points.size()) throw ConfigError("map_frame: too few data points");
                grid.x(m, n) = data_points[next++];
            }
        }
    }
    if (next != data_points.size()) throw ConfigError("map_frame: too many data points");
    return grid;
}

std::vector<cplx> extract_data(const Eigen::MatrixXcd& grid, const PilotPattern& pattern,
                               const OfdmParams& params) {
    std::vector<cplx> out;
    out.reserve(params.grid_size());
    for (int m = 0; m < params.subcarriers; ++m) {
        for (int n = 0; n < params.symbols; ++n) {
            if (!pattern.is_pilot(m, n)) out.push_back(grid(m, n));
        }
    }
    return out;
}

} // namespace ringshape
