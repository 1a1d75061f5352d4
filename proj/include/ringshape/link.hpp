#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "ringshape/chanest.hpp"
#include "ringshape/channel.hpp"
#include "ringshape/constellation.hpp"
#include "ringshape/demapper.hpp"
#include "ringshape/ldpc.hpp"
#include "ringshape/ofdm.hpp"
#include "ringshape/shaping.hpp"

namespace ringshape {

enum class ChannelKnowledge { genie, estimated };

// Full description of one transmit/receive chain at one operating point
// family (everything except the noise level).
struct LinkConfig {
    OfdmParams ofdm;
    PilotPattern pilots; // amplitude is derived: sqrt(P_avg) * pilot_boost
    double pilot_boost = 1.0;

    ChannelProfile profile = ChannelProfile::veh_a();
    double nu_max_hz = 0.0;
    PulseModel pulse = PulseModel::windowed_sinc();
    ChannelOperatorMode op_mode = ChannelOperatorMode::per_symbol_circular;
    ChannelKnowledge knowledge = ChannelKnowledge::genie;

    ConstellationSpec spec;
    std::optional<ShapingCode> shaping; // nullopt = unshaped
    std::shared_ptr<const LdpcCode> ldpc;

    std::uint64_t base_seed = 1;
    int max_ldpc_iters = 50;
    double llr_clamp = 60.0;

    double pi_outer() const { return shaping ? outer_probability(*shaping) : 0.0; }
    double p_avg() const { return average_power(spec, pi_outer()); }
    int data_res() const;
    void validate() const;
};

struct RatePair {
    double gross = 0.0; // information bits per 2D data symbol
    double net = 0.0;   // gross scaled by the data-RE fraction of the grid
};

// r_ldpc * log2(l) plus the shaping rate when shaping is active.
RatePair effective_rate(const LinkConfig& config);

// N0 for a target Es/N0 in dB, with Es the average data-symbol energy.
double snr_to_n0(double snr_db, const LinkConfig& config);
double ebn0_db_from_snr(double snr_db, const LinkConfig& config);

// The same operating point expressed as inner-grid power over N0. Shaped
// and unshaped schemes with equal values here see equal absolute noise on
// the shared base QAM grid, which is how the reference comparisons line up.
double snr_inner_db_from_snr(double snr_db, const LinkConfig& config);

struct FrameResult {
    std::int64_t ldpc_bits = 0;
    std::int64_t ldpc_errors = 0;
    std::int64_t shaping_bits = 0;
    std::int64_t shaping_errors = 0;
    bool frame_error = false;
    double tx_power_sum = 0.0; // sum |s|^2 over transmitted data symbols
    std::int64_t tx_symbols = 0;
};

// Per-noise-point runtime with everything reusable across frames
// precomputed (DFT pair, pilot reference, LMMSE gain, demapper priors).
// Frames are deterministic functions of (base_seed, frame_index) and carry
// no shared mutable state, so run_frame may be called concurrently.
class LinkPoint {
public:
    // cov is required when knowledge == estimated, ignored otherwise.
    LinkPoint(LinkConfig config, double n0, const CovariancePair* cov = nullptr);

    FrameResult run_frame(std::uint64_t frame_index) const;

    const LinkConfig& config() const { return cfg_; }
    double n0() const { return n0_; }

private:
    LinkConfig cfg_;
    double n0_;
    DftMatrices dft_;
    std::vector<std::pair<int, int>> pilot_pos_;
    Eigen::MatrixXcd pilot_ref_;
    std::optional<LmmseInterpolator> lmmse_;
    DemapConfig demap_;
    int data_res_ = 0;
    int codewords_per_frame_ = 0;
    int coded_symbols_ = 0;
    int shaping_blocks_ = 0;
};

// One-shot convenience form: builds the runtime, runs a single frame.
FrameResult run_frame(const LinkConfig& config, double n0, std::uint64_t frame_index,
                      const CovariancePair* cov = nullptr);

} // namespace ringshape
