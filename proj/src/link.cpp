#include "ringshape/link.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "ringshape/errors.hpp"
#include "ringshape/rng.hpp"

namespace ringshape {

namespace {

// Substream tags for per-frame seeding.
enum Stream : std::uint64_t {
    kInfoBits = 1,
    kShapingBits = 2,
    kPadding = 3,
    kChannel = 4,
    kNoise = 5,
};

} // namespace

int LinkConfig::data_res() const {
    return ofdm.grid_size() - pilots.count(ofdm);
}

void LinkConfig::validate() const {
    if (ofdm.subcarriers < 1 || ofdm.symbols < 1 || ofdm.subcarrier_spacing <= 0.0)
        throw ConfigError("link: bad OFDM parameters");
    if (!ldpc) throw ConfigError("link: missing LDPC code");
    if (spec.order() == 0) throw ConfigError("link: missing constellation");
    if (pilots.symbol_indices.empty()) throw ConfigError("link: pilot pattern has no symbols");
    for (int s : pilots.symbol_indices) {
        if (s < 0 || s >= ofdm.symbols) throw ConfigError("link: pilot symbol index out of range");
    }
    if (pilots.comb_stride < 1) throw ConfigError("link: pilot comb stride must be >= 1");
    if (ldpc->n % spec.bits_per_symbol != 0)
        throw ConfigError("link: codeword length must divide into whole symbols");
    if (data_res() * spec.bits_per_symbol < ldpc->n)
        throw ConfigError("link: frame data capacity below one LDPC codeword");
    if (shaping && shaping->z > data_res())
        throw ConfigError("link: shaping block longer than the frame data capacity");
}

RatePair effective_rate(const LinkConfig& config) {
    config.validate();
    RatePair r;
    r.gross = config.ldpc->rate() * config.spec.bits_per_symbol;
    if (config.shaping) r.gross += shaping_rate(*config.shaping);
    r.net = r.gross * static_cast<double>(config.data_res()) / config.ofdm.grid_size();
    return r;
}

double snr_to_n0(double snr_db, const LinkConfig& config) {
    return config.p_avg() / std::pow(10.0, snr_db / 10.0);
}

double ebn0_db_from_snr(double snr_db, const LinkConfig& config) {
    return snr_db - 10.0 * std::log10(effective_rate(config).gross);
}

double snr_inner_db_from_snr(double snr_db, const LinkConfig& config) {
    return snr_db - 10.0 * std::log10(config.p_avg() / config.spec.inner_power);
}

LinkPoint::LinkPoint(LinkConfig config, double n0, const CovariancePair* cov)
    : cfg_(std::move(config)), n0_(n0) {
    cfg_.validate();
    if (n0 < 0.0) throw ConfigError("link: negative noise variance");

    cfg_.pilots.amplitude = std::sqrt(cfg_.p_avg()) * cfg_.pilot_boost;
    dft_ = DftMatrices::make(cfg_.ofdm.subcarriers);
    pilot_pos_ = pilot_positions(cfg_.pilots, cfg_.ofdm);
    pilot_ref_ = pilot_reference(cfg_.pilots, cfg_.ofdm);

    if (cfg_.knowledge == ChannelKnowledge::estimated) {
        if (cov == nullptr) throw ConfigError("link: estimated mode needs covariances");
        const double pilot_power = cfg_.pilots.amplitude * cfg_.pilots.amplitude;
        const double ls_noise = pilot_power > 0.0 ? n0_ / pilot_power : 0.0;
        lmmse_.emplace(cfg_.pilots, cfg_.ofdm, *cov, ls_noise);
    }

    data_res_ = cfg_.data_res();
    codewords_per_frame_ = data_res_ * cfg_.spec.bits_per_symbol / cfg_.ldpc->n;
    coded_symbols_ = codewords_per_frame_ * cfg_.ldpc->n / cfg_.spec.bits_per_symbol;
    shaping_blocks_ = cfg_.shaping ? data_res_ / cfg_.shaping->z : 0;

    demap_.spec = &cfg_.spec;
    demap_.n0 = std::max(n0_, 1e-12); // demapper needs a strictly positive variance
    demap_.log_priors.clear();
    for (double p : point_priors(cfg_.spec, cfg_.pi_outer())) {
        demap_.log_priors.push_back(p > 0.0 ? std::log(p)
                                            : -std::numeric_limits<double>::infinity());
    }
}

FrameResult LinkPoint::run_frame(std::uint64_t frame_index) const {
    const auto& spec = cfg_.spec;
    const int nb = spec.bits_per_symbol;
    const LdpcCode& ldpc = *cfg_.ldpc;

    // Transmit side -------------------------------------------------------
    Rng rng_info(derive_seed(cfg_.base_seed, frame_index, kInfoBits));
    std::vector<std::uint8_t> info_bits(static_cast<std::size_t>(codewords_per_frame_) * ldpc.k);
    for (auto& b : info_bits) b = rng_info.bit() ? 1 : 0;

    std::vector<cplx> inner_seq(data_res_);
    {
        std::vector<std::uint8_t> sym_bits(nb);
        std::size_t pos = 0;
        for (int c = 0; c < codewords_per_frame_; ++c) {
            const auto cw = ldpc_encode(
                std::span<const std::uint8_t>(info_bits).subspan(
                    static_cast<std::size_t>(c) * ldpc.k, ldpc.k),
                ldpc);
            for (int j = 0; j + nb <= ldpc.n; j += nb) {
                for (int b = 0; b < nb; ++b) sym_bits[b] = cw[j + b];
                inner_seq[pos++] = bits_to_inner_point(sym_bits, spec);
            }
        }
        // Remainder REs carry random inner points excluded from accounting.
        Rng rng_pad(derive_seed(cfg_.base_seed, frame_index, kPadding));
        while (pos < inner_seq.size()) {
            inner_seq[pos++] = spec.inner[rng_pad.below(spec.order())];
        }
    }

    std::vector<cplx> tx_seq = inner_seq;
    std::vector<std::uint64_t> sent_indices(shaping_blocks_, 0);
    if (cfg_.shaping) {
        const ShapingCode& sc = *cfg_.shaping;
        Rng rng_shape(derive_seed(cfg_.base_seed, frame_index, kShapingBits));
        const std::uint64_t mask = (1ull << sc.bits_per_block) - 1;
        for (int b = 0; b < shaping_blocks_; ++b) {
            sent_indices[b] = rng_shape.next_u64() & mask;
            const auto blk = shaping_encode(
                std::span<const cplx>(inner_seq).subspan(static_cast<std::size_t>(b) * sc.z, sc.z),
                sent_indices[b], sc, spec);
            std::copy(blk.symbols.begin(), blk.symbols.end(),
                      tx_seq.begin() + static_cast<std::ptrdiff_t>(b) * sc.z);
        }
        // Trailing partial block is transmitted unshaped.
    }

    FrameResult res;
    res.tx_symbols = data_res_;
    for (const cplx s : tx_seq) res.tx_power_sum += std::norm(s);

    const FrameGrid grid = map_frame(tx_seq, cfg_.pilots, cfg_.ofdm);
    Eigen::MatrixXcd td = dft_.inv * grid.x;
    Eigen::VectorXcd x = Eigen::Map<Eigen::VectorXcd>(td.data(), td.size());

    // Channel ---------------------------------------------------------------
    Rng rng_ch(derive_seed(cfg_.base_seed, frame_index, kChannel));
    const PathSet paths = draw_paths(cfg_.profile, cfg_.nu_max_hz, cfg_.ofdm, rng_ch);
    const EffectiveChannel chan = build_effective_matrix(paths, cfg_.ofdm, cfg_.pulse, cfg_.op_mode);
    Rng rng_noise(derive_seed(cfg_.base_seed, frame_index, kNoise));
    const Eigen::VectorXcd y = apply_channel(chan, x, n0_, rng_noise);

    // Receive side ----------------------------------------------------------
    Eigen::Map<const Eigen::MatrixXcd> yt(y.data(), cfg_.ofdm.subcarriers, cfg_.ofdm.symbols);
    const Eigen::MatrixXcd y_grid = dft_.fwd * yt;

    Eigen::MatrixXcd estimate;
    if (cfg_.knowledge == ChannelKnowledge::genie) {
        estimate = chan.freq_diag_grid();
    } else {
        const Eigen::VectorXcd ls = ls_pilot_estimates(y_grid, pilot_ref_, pilot_pos_);
        estimate = lmmse_->interpolate(ls);
    }
    const Eigen::MatrixXcd eq_grid = equalize(y_grid, estimate, n0_);
    const std::vector<cplx> eq = extract_data(eq_grid, cfg_.pilots, cfg_.ofdm);
    // Per-RE effective noise after the one-tap equalizer: N0 / |h|^2.
    // Deeply faded REs get near-zero LLRs instead of confident garbage.
    std::vector<cplx> gains_c = extract_data(estimate, cfg_.pilots, cfg_.ofdm);

    // Shaping bits ----------------------------------------------------------
    if (cfg_.shaping) {
        const ShapingCode& sc = *cfg_.shaping;
        for (int b = 0; b < shaping_blocks_; ++b) {
            const auto dec = shaping_decode(
                std::span<const cplx>(eq).subspan(static_cast<std::size_t>(b) * sc.z, sc.z), sc,
                spec);
            res.shaping_bits += sc.bits_per_block;
            res.shaping_errors += std::popcount(dec.index ^ sent_indices[b]);
        }
    }

    // Coded bits ------------------------------------------------------------
    std::vector<double> llrs;
    llrs.reserve(static_cast<std::size_t>(coded_symbols_) * nb);
    DemapConfig dm = demap_;
    for (int i = 0; i < coded_symbols_; ++i) {
        const double g = std::norm(gains_c[static_cast<std::size_t>(i)]);
        dm.n0 = std::max(g > 0.0 ? n0_ / g : 1e30, 1e-12);
        const auto sym_llrs = compute_llrs(std::span<const cplx>(eq).subspan(i, 1), dm);
        llrs.insert(llrs.end(), sym_llrs.begin(), sym_llrs.end());
    }
    for (double& v : llrs) v = std::clamp(v, -cfg_.llr_clamp, cfg_.llr_clamp);

    for (int c = 0; c < codewords_per_frame_; ++c) {
        const auto dec = ldpc_decode(
            std::span<const double>(llrs).subspan(static_cast<std::size_t>(c) * ldpc.n, ldpc.n),
            ldpc, cfg_.max_ldpc_iters);
        const auto got = extract_info(dec.bits, ldpc);
        res.ldpc_bits += ldpc.k;
        for (int j = 0; j < ldpc.k; ++j) {
            res.ldpc_errors += got[j] != info_bits[static_cast<std::size_t>(c) * ldpc.k + j];
        }
    }

    res.frame_error = (res.ldpc_errors + res.shaping_errors) > 0;
    return res;
}

FrameResult run_frame(const LinkConfig& config, double n0, std::uint64_t frame_index,
                      const CovariancePair* cov) {
    return LinkPoint(config, n0, cov).run_frame(frame_index);
}

} // namespace ringshape
