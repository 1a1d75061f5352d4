#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ringshape/link.hpp"

namespace ringshape {

struct StoppingRule {
    std::int64_t min_bit_errors = 100; // LDPC info-bit errors (the plotted BER)
    std::int64_t max_frames = 1000;
    int batch_size = 32; // stopping is evaluated at batch boundaries only,
                         // which keeps serial and parallel runs identical
};

struct SchemeRun {
    std::string label;
    LinkConfig link;
    std::vector<double> snr_db;
};

struct SweepSpec {
    std::vector<SchemeRun> schemes;
    StoppingRule stopping;
    ExecMode exec = ExecMode::parallel;
    std::shared_ptr<const CovariancePair> cov; // required if any scheme is estimated
};

struct PointResult {
    std::string scheme;
    double snr_db = 0.0;       // Es/N0 (average data-symbol energy over N0)
    double snr_inner_db = 0.0; // same noise level referenced to the inner-grid power
    double ebn0_db = 0.0;
    std::int64_t frames = 0;
    std::int64_t ldpc_bits = 0;
    std::int64_t ldpc_errors = 0;
    std::int64_t shaping_bits = 0;
    std::int64_t shaping_errors = 0;
    std::int64_t frame_errors = 0;
    double tx_power_mean = 0.0;
    std::string stop; // "min_errors" or "max_frames"

    std::int64_t info_bits() const { return ldpc_bits + shaping_bits; }
    std::int64_t info_errors() const { return ldpc_errors + shaping_errors; }
    double ber_ldpc() const;
    double ber_shaping() const;
    double ber() const; // combined information BER
    double fer() const;
    double ci95_ber() const; // normal-approximation half width
};

struct SweepResult {
    std::vector<PointResult> points;
};

// Runs every (scheme, snr) point not already present in `known`. Frames are
// deterministic in (seed, frame index); aggregation is integer-only, so any
// execution mode yields identical results. `on_point` fires after each new
// point with the full ordered result so far (used for incremental output).
SweepResult run_sweep(const SweepSpec& spec, const std::vector<PointResult>& known = {},
                      const std::function<void(const SweepResult&)>& on_point = {});

// CSV round trip (stable formatting; used for resume and for the plots).
std::string to_csv(const SweepResult& result);
SweepResult parse_csv(std::istream& in);

struct PlotCurve {
    std::string label;
    std::vector<std::pair<double, double>> points; // (snr_db, ber)
};

// Log-scale BER vs SNR comparison plot as a standalone SVG.
void emit_plot(const std::vector<PlotCurve>& curves, const std::string& path);

} // namespace ringshape
