#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ringshape/channel.hpp"
#include "ringshape/ofdm.hpp"

namespace ringshape {

enum class ExecMode { serial, parallel };

// Separable second-order statistics of the frequency-domain channel
// diagonal: c_f over subcarriers, c_t over OFDM symbols.
struct CovariancePair {
    Eigen::MatrixXcd c_f; // M x M
    Eigen::MatrixXcd c_t; // N x N
    std::uint64_t profile_hash = 0;
    int draws = 0;
};

// Monte-Carlo covariance estimation over independent channel draws.
// Accumulation is chunked in fixed draw-index order, so serial and
// parallel execution produce bit-identical matrices.
CovariancePair compute_covariances(const ChannelProfile& profile, double nu_max_hz,
                                   const OfdmParams& params, const PulseModel& pulse,
                                   ChannelOperatorMode mode, int draws, std::uint64_t seed,
                                   ExecMode exec = ExecMode::parallel);

std::uint64_t covariance_profile_hash(const ChannelProfile& profile, double nu_max_hz,
                                      const OfdmParams& params, const PulseModel& pulse,
                                      ChannelOperatorMode mode, std::uint64_t seed);

// Versioned binary cache (little-endian doubles).
void save_covariance(const CovariancePair& cov, const std::string& path);
CovariancePair load_covariance(const std::string& path);

// Pilot positions (subcarrier, symbol) in canonical order: symbol-major,
// subcarrier ascending within a pilot symbol.
std::vector<std::pair<int, int>> pilot_positions(const PilotPattern& pattern,
                                                 const OfdmParams& params);

// Least-squares estimates at pilot REs: y / x_pilot, in pilot_positions order.
Eigen::VectorXcd ls_pilot_estimates(const Eigen::MatrixXcd& received_grid,
                                    const Eigen::MatrixXcd& pilot_grid,
                                    const std::vector<std::pair<int, int>>& positions);

// 2D LMMSE interpolator under the Kronecker-separable covariance model.
// noise_var is the noise variance of the LS estimates themselves
// (channel N0 divided by the pilot power). The gain matrix is precomputed
// once per (pattern, covariance, noise) and reused across frames.
class LmmseInterpolator {
public:
    LmmseInterpolator(const PilotPattern& pattern, const OfdmParams& params,
                      const CovariancePair& cov, double noise_var);

    // ls in pilot_positions order; returns the M x N channel estimate.
    Eigen::MatrixXcd interpolate(const Eigen::VectorXcd& ls) const;

private:
    int subcarriers_;
    int symbols_;
    Eigen::MatrixXcd gain_; // (M*N) x n_pilots
};

// One-call convenience form.
Eigen::MatrixXcd lmmse_interpolate(const Eigen::VectorXcd& pilot_ls,
                                   const PilotPattern& pattern, const OfdmParams& params,
                                   const CovariancePair& cov, double noise_var);

// Per-RE MMSE one-tap equalizer: conj(h) y / (|h|^2 + n0).
Eigen::MatrixXcd equalize(const Eigen::MatrixXcd& received_grid,
                          const Eigen::MatrixXcd& estimate, double n0);

} // namespace ringshape
