#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ringshape/ofdm.hpp"
#include "ringshape/rng.hpp"

namespace ringshape {

struct ChannelProfile {
    std::vector<double> delays_ns;
    std::vector<double> powers_db; // relative; normalized to unit total power on draw

    static ChannelProfile veh_a(); // ITU Vehicular-A, 6 paths
    static ChannelProfile single_path();
};

struct Path {
    cplx gain;           // h_p
    double delay_s = 0;  // tau_p
    double doppler_hz = 0; // nu_p
    double delay_index = 0;   // k_p = tau_p * B (generally fractional)
    double doppler_index = 0; // l_p = nu_p * T
    double jakes_angle = 0;   // theta_p
};

struct PathSet {
    std::vector<Path> paths;
    double total_power() const;
};

// Gains are CN(0, normalized path power); Dopplers follow the Jakes
// spectrum nu_p = nu_max * cos(theta), theta ~ U[-pi, pi).
PathSet draw_paths(const ChannelProfile& profile, double nu_max_hz, const OfdmParams& params,
                   Rng& rng);
PathSet draw_veh_a(Rng& rng, double nu_max_hz, const OfdmParams& params);

// Bandlimited interpolation pulse: sinc windowed by a raised cosine.
// Nyquist by construction: g(0) = 1, g(x) = 0 at nonzero integers.
struct PulseModel {
    std::string family = "windowed_sinc";
    int span = 16; // samples; g(x) = 0 for |x| > span

    double operator()(double x) const;
    static PulseModel windowed_sinc(int span = 16) { return PulseModel{"windowed_sinc", span}; }
};

enum class ChannelOperatorMode {
    literal,             // delay offsets taken on the full frame time axis
    per_symbol_circular, // delay offsets wrapped modulo M per OFDM symbol (CP idealization)
};

// Sparse effective time-domain channel matrix (column-compressed). Columns
// hold at most P * (2*span + 1) entries each.
struct EffectiveChannel {
    int subcarriers = 0; // M
    int symbols = 0;     // N
    ChannelOperatorMode mode = ChannelOperatorMode::per_symbol_circular;

    std::vector<int> col_ptr;  // size M*N + 1
    std::vector<int> row_idx;
    std::vector<cplx> values;

    int dim() const { return subcarriers * symbols; }

    Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
    Eigen::MatrixXcd dense() const;

    // Full frequency-domain matrix H_F = (I (x) F) H (I (x) F^H).
    Eigen::MatrixXcd freq_dense() const;

    // diag(H_F) arranged subcarrier x symbol (needs only diagonal blocks).
    Eigen::MatrixXcd freq_diag_grid() const;
};

EffectiveChannel build_effective_matrix(const PathSet& paths, const OfdmParams& params,
                                        const PulseModel& pulse, ChannelOperatorMode mode);

// y = H x + w with w ~ CN(0, n0) i.i.d. per sample.
Eigen::VectorXcd apply_channel(const EffectiveChannel& channel, const Eigen::VectorXcd& x,
                               double n0, Rng& rng);

} // namespace ringshape
