#include "ringshape/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ringshape/errors.hpp"

namespace ringshape {

ChannelProfile ChannelProfile::veh_a() {
    return {{0.0, 310.0, 710.0, 1090.0, 1730.0, 2510.0}, {0.0, -1.0, -9.0, -10.0, -15.0, -20.0}};
}

ChannelProfile ChannelProfile::single_path() {
    return {{0.0}, {0.0}};
}

double PathSet::total_power() const {
    double s = 0.0;
    for (const auto& p : paths) s += std::norm(p.gain);
    return s;
}

PathSet draw_paths(const ChannelProfile& profile, double nu_max_hz, const OfdmParams& params,
                   Rng& rng) {
    if (profile.delays_ns.size() != profile.powers_db.size() || profile.delays_ns.empty())
        throw ConfigError("channel: malformed profile");
    if (nu_max_hz < 0.0) throw ConfigError("channel: nu_max must be >= 0");

    std::vector<double> lin(profile.powers_db.size());
    double total = 0.0;
    for (std::size_t i = 0; i < lin.size(); ++i) {
        lin[i] = std::pow(10.0, profile.powers_db[i] / 10.0);
        total += lin[i];
    }

    PathSet ps;
    ps.paths.resize(lin.size());
    for (std::size_t i = 0; i < lin.size(); ++i) {
        Path& p = ps.paths[i];
        const double power = lin[i] / total;
        p.gain = rng.cnormal(power);
        p.jakes_angle = rng.uniform(-std::numbers::pi, std::numbers::pi);
        p.doppler_hz = nu_max_hz * std::cos(p.jakes_angle);
        p.delay_s = profile.delays_ns[i] * 1e-9;
        p.delay_index = p.delay_s * params.bandwidth();
        p.doppler_index = p.doppler_hz * params.frame_duration();
    }
    return ps;
}

PathSet draw_veh_a(Rng& rng, double nu_max_hz, const OfdmParams& params) {
    return draw_paths(ChannelProfile::veh_a(), nu_max_hz, params, rng);
}

double PulseModel::operator()(double x) const {
    const double u = x / span;
    if (u <= -1.0 || u >= 1.0) return 0.0;
    double s;
    if (x == 0.0) {
        s = 1.0;
    } else {
        const double px = std::numbers::pi * x;
        s = std::sin(px) / px;
    }
    const double w = 0.5 * (1.0 + std::cos(std::numbers::pi * u));
    return s * w;
}

EffectiveChannel build_effective_matrix(const PathSet& paths, const OfdmParams& params,
                                        const PulseModel& pulse, ChannelOperatorMode mode) {
    const int m_sub = params.subcarriers;
    const int n_sym = params.symbols;
    const int mn = m_sub * n_sym;

    double max_delay = 0.0;
    for (const auto& p : paths.paths) {
        if (p.delay_index < 0.0) throw ConfigError("channel: negative delay index");
        max_delay = std::max(max_delay, p.delay_index);
    }
    if (pulse.span < max_delay)
        throw ConfigError("channel: pulse span too small for the maximum path delay");

    // Per-path tap table: g sampled at the integer offsets t with
    // |t - frac(k_p)| <= span. Identical for every column.
    struct PathTaps {
        cplx gain;
        double phase_step; // 2*pi*l_p / (MN)
        int base;          // integer part of k_p
        int t_lo;
        std::vector<double> g;
    };
    std::vector<PathTaps> taps;
    taps.reserve(paths.paths.size());
    for (const auto& p : paths.paths) {
        PathTaps pt;
        pt.gain = p.gain;
        pt.phase_step = 2.0 * std::numbers::pi * p.doppler_index / mn;
        pt.base = static_cast<int>(std::floor(p.delay_index));
        const double frac = p.delay_index - pt.base;
        pt.t_lo = static_cast<int>(std::ceil(frac - pulse.span));
        const int t_hi = static_cast<int>(std::floor(frac + pulse.span));
        pt.g.resize(t_hi - pt.t_lo + 1);
        for (int t = pt.t_lo; t <= t_hi; ++t) pt.g[t - pt.t_lo] = pulse(t - frac);
        taps.push_back(std::move(pt));
    }

    EffectiveChannel h;
    h.subcarriers = m_sub;
    h.symbols = n_sym;
    h.mode = mode;
    h.col_ptr.assign(mn + 1, 0);

    std::vector<cplx> scratch(mn, cplx(0.0, 0.0));
    std::vector<int> touched;
    touched.reserve(256);

    for (int n = 0; n < mn; ++n) {
        const int block = n / m_sub;
        const int n_in = n % m_sub;
        for (const auto& pt : taps) {
            const double phi = pt.phase_step * n;
            const cplx coeff = pt.gain * cplx(std::cos(phi), std::sin(phi));
            for (std::size_t j = 0; j < pt.g.size(); ++j) {
                if (pt.g[j] == 0.0) continue;
                const int t = pt.t_lo + static_cast<int>(j);
                int row;
                if (mode == ChannelOperatorMode::per_symbol_circular) {
                    int r = (n_in + pt.base + t) % m_sub;
                    if (r < 0) r += m_sub;
                    row = block * m_sub + r;
                } else {
                    row = n + pt.base + t;
                    if (row < 0 || row >= mn) continue;
                }
                if (scratch[row] == cplx(0.0, 0.0)) touched.push_back(row);
                scratch[row] += coeff * pt.g[j];
            }
        }
        std::sort(touched.begin(), touched.end());
        for (int row : touched) {
            h.row_idx.push_back(row);
            h.values.push_back(scratch[row]);
            scratch[row] = cplx(0.0, 0.0);
        }
        h.col_ptr[n + 1] = static_cast<int>(h.row_idx.size());
        touched.clear();
    }
    return h;
}

Eigen::VectorXcd EffectiveChannel::apply(const Eigen::VectorXcd& x) const {
    if (x.size() != dim()) throw ConfigError("channel apply: dimension mismatch");
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(dim());
    for (int n = 0; n < dim(); ++n) {
        const cplx xn = x[n];
        for (int e = col_ptr[n]; e < col_ptr[n + 1]; ++e) y[row_idx[e]] += values[e] * xn;
    }
    return y;
}

Eigen::MatrixXcd EffectiveChannel::dense() const {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim(), dim());
    for (int n = 0; n < dim(); ++n) {
        for (int e = col_ptr[n]; e < col_ptr[n + 1]; ++e) h(row_idx[e], n) = values[e];
    }
    return h;
}

Eigen::MatrixXcd EffectiveChannel::freq_dense() const {
    const DftMatrices dft = DftMatrices::make(subcarriers);
    const Eigen::MatrixXcd h = dense();
    Eigen::MatrixXcd hf(dim(), dim());
    for (int br = 0; br < symbols; ++br) {
        for (int bc = 0; bc < symbols; ++bc) {
            hf.block(br * subcarriers, bc * subcarriers, subcarriers, subcarriers) =
                dft.fwd * h.block(br * subcarriers, bc * subcarriers, subcarriers, subcarriers) *
                dft.inv;
        }
    }
    return hf;
}

Eigen::MatrixXcd EffectiveChannel::freq_diag_grid() const {
    const DftMatrices dft = DftMatrices::make(subcarriers);
    Eigen::MatrixXcd grid(subcarriers, symbols);
    Eigen::MatrixXcd block(subcarriers, subcarriers);
    for (int b = 0; b < symbols; ++b) {
        block.setZero();
        const int base = b * subcarriers;
        for (int n = base; n < base + subcarriers; ++n) {
            for (int e = col_ptr[n]; e < col_ptr[n + 1]; ++e) {
                const int r = row_idx[e] - base;
                if (r >= 0 && r < subcarriers) block(r, n - base) = values[e];
            }
        }
        const Eigen::MatrixXcd g = dft.fwd * block;
        for (int m = 0; m < subcarriers; ++m) {
            grid(m, b) = g.row(m).cwiseProduct(dft.fwd.row(m).conjugate()).sum();
        }
    }
    return grid;
}

Eigen::VectorXcd apply_channel(const EffectiveChannel& channel, const Eigen::VectorXcd& x,
                               double n0, Rng& rng) {
    if (n0 < 0.0) throw ConfigError("channel apply: negative noise variance");
    Eigen::VectorXcd y = channel.apply(x);
    if (n0 > 0.0) {
        for (int i = 0; i < y.size(); ++i) y[i] += rng.cnormal(n0);
    }
    return y;
}

} // namespace ringshape
