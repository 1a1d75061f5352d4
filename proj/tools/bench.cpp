// Throughput comparison between the serial reference path and the OpenMP
// path for the two Monte-Carlo kernels (frame simulation, covariance
// estimation), with an equality check on the aggregates.

#include <chrono>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <omp.h>

#include "ringshape/chanest.hpp"
#include "ringshape/harness.hpp"

using namespace ringshape;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

LinkConfig bench_link(const std::string& ldpc_path) {
    LinkConfig link;
    link.ofdm = {72, 14, 30e3};
    link.pilots.symbol_indices = {2, 11};
    link.pilots.comb_stride = 2;
    link.profile = ChannelProfile::veh_a();
    link.nu_max_hz = 815.0;
    link.knowledge = ChannelKnowledge::estimated;
    link.spec = build_augmented_qam(4);
    link.shaping = ShapingCode::make(23, 3);
    link.ldpc = std::make_shared<const LdpcCode>(load_parity_check(ldpc_path));
    link.base_seed = 42;
    return link;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs OpenMP benchmark"};
    std::string ldpc_path = std::string(RINGSHAPE_DATA_DIR) + "/ldpc_n1872_r12.alist";
    int frames = 192;
    int draws = 256;
    app.add_option("--ldpc", ldpc_path, "parity-check file");
    app.add_option("--frames", frames, "frames per run");
    app.add_option("--draws", draws, "covariance draws per run");
    CLI11_PARSE(app, argc, argv);

    std::cout << "threads available: " << omp_get_max_threads() << "\n\n";

    // Covariance kernel ----------------------------------------------------
    const OfdmParams ofdm{72, 14, 30e3};
    const auto pulse = PulseModel::windowed_sinc();
    double t_serial, t_parallel;
    {
        const auto t0 = Clock::now();
        const auto cov = compute_covariances(ChannelProfile::veh_a(), 815.0, ofdm, pulse,
                                             ChannelOperatorMode::per_symbol_circular, draws, 7,
                                             ExecMode::serial);
        t_serial = seconds_since(t0);
        const auto t1 = Clock::now();
        const auto cov_p = compute_covariances(ChannelProfile::veh_a(), 815.0, ofdm, pulse,
                                               ChannelOperatorMode::per_symbol_circular, draws, 7,
                                               ExecMode::parallel);
        t_parallel = seconds_since(t1);
        const bool same = (cov.c_f - cov_p.c_f).norm() == 0.0 && (cov.c_t - cov_p.c_t).norm() == 0.0;
        std::cout << "covariance (" << draws << " draws)\n"
                  << "  serial:   " << t_serial << " s (" << draws / t_serial << " draws/s)\n"
                  << "  parallel: " << t_parallel << " s (" << draws / t_parallel << " draws/s)\n"
                  << "  speedup:  " << t_serial / t_parallel << "x, bit-identical: "
                  << (same ? "yes" : "NO") << "\n\n";
        if (!same) return 1;
    }

    // Frame simulation kernel ------------------------------------------------
    SweepSpec spec;
    SchemeRun run;
    run.label = "bench";
    run.link = bench_link(ldpc_path);
    run.snr_db = {9.0};
    spec.schemes = {run};
    spec.stopping = {1'000'000'000, frames, 32};
    spec.cov = std::make_shared<const CovariancePair>(
        compute_covariances(ChannelProfile::veh_a(), 815.0, ofdm, pulse,
                            ChannelOperatorMode::per_symbol_circular, 512, 7, ExecMode::parallel));

    spec.exec = ExecMode::serial;
    auto t0 = Clock::now();
    const SweepResult serial = run_sweep(spec);
    t_serial = seconds_since(t0);

    spec.exec = ExecMode::parallel;
    t0 = Clock::now();
    const SweepResult parallel = run_sweep(spec);
    t_parallel = seconds_since(t0);

    const bool same = to_csv(serial) == to_csv(parallel);
    std::cout << "frame simulation (" << frames << " frames, estimated channel)\n"
              << "  serial:   " << t_serial << " s (" << frames / t_serial << " frames/s)\n"
              << "  parallel: " << t_parallel << " s (" << frames / t_parallel << " frames/s)\n"
              << "  speedup:  " << t_serial / t_parallel << "x, bit-identical: "
              << (same ? "yes" : "NO") << "\n";
    return same ? 0 : 1;
}
