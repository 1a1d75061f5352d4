#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "ringshape/constellation.hpp"

namespace ringshape {

struct OfdmParams {
    int subcarriers = 0;       // M
    int symbols = 0;           // N
    double subcarrier_spacing = 0.0; // delta_f, Hz

    double bandwidth() const { return subcarriers * subcarrier_spacing; }       // B
    double frame_duration() const { return symbols / subcarrier_spacing; }      // T
    double symbol_duration() const { return 1.0 / subcarrier_spacing; }         // T_s
    double sample_interval() const { return 1.0 / bandwidth(); }                // T_0
    int grid_size() const { return subcarriers * symbols; }
};

// Comb pilots on designated OFDM symbols. Pilot values are QPSK points at
// the configured amplitude, drawn from a seeded sequence known to both
// ends.
struct PilotPattern {
    std::vector<int> symbol_indices; // OFDM symbols carrying pilots
    int comb_stride = 2;
    int comb_offset = 0;
    double amplitude = 1.0;
    std::uint64_t seed = 0x9d107;

    bool is_pilot(int subcarrier, int symbol) const;
    int count(const OfdmParams& params) const;
};

struct FrameGrid {
    Eigen::MatrixXcd x;                           // M x N resource elements
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> pilot_mask;
};

// Unitary per-symbol M-point IDFT, column-wise vectorization.
Eigen::VectorXcd ofdm_modulate(const FrameGrid& grid, const OfdmParams& params);
Eigen::VectorXcd ofdm_modulate(const Eigen::MatrixXcd& x, const OfdmParams& params);

// Exact inverse of ofdm_modulate.
Eigen::MatrixXcd ofdm_demodulate(const Eigen::VectorXcd& time_signal, const OfdmParams& params);

// Precomputed unitary DFT pair for the hot path.
struct DftMatrices {
    Eigen::MatrixXcd fwd; // F_M
    Eigen::MatrixXcd inv; // F_M^H
    static DftMatrices make(int m);
};

// Fills data resource elements in row-major order (subcarrier index outer,
// symbol index inner) and pilots from the pattern's seeded sequence.
FrameGrid map_frame(const std::vector<cplx>& data_points, const PilotPattern& pattern,
                    const OfdmParams& params);

// Data REs in the same documented order used by map_frame.
std::vector<cplx> extract_data(const Eigen::MatrixXcd& grid, const PilotPattern& pattern,
                               const OfdmParams& params);

// The pilot values map_frame would place (receiver-side reference).
Eigen::MatrixXcd pilot_reference(const PilotPattern& pattern, const OfdmParams& params);

} // namespace ringshape
