#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "ringshape/chanest.hpp"
#include "ringshape/errors.hpp"

using namespace ringshape;

namespace {

const OfdmParams kParams{72, 14, 30e3};
const auto kPulse = PulseModel::windowed_sinc();

PilotPattern default_pilots(double amplitude = 1.0) {
    PilotPattern pat;
    pat.symbol_indices = {2, 11};
    pat.comb_stride = 2;
    pat.amplitude = amplitude;
    return pat;
}

// NMSE of an estimate against the genie channel grid, averaged over frames.
double estimation_nmse(double n0, int frames, const CovariancePair& cov, double nu_max) {
    const auto pat = default_pilots();
    Rng rng(42);
    double num = 0.0, den = 0.0;
    const auto pos = pilot_positions(pat, kParams);
    const Eigen::MatrixXcd pilot_grid = pilot_reference(pat, kParams);
    const LmmseInterpolator interp(pat, kParams, cov, n0 / (pat.amplitude * pat.amplitude));
    for (int f = 0; f < frames; ++f) {
        const PathSet ps = draw_veh_a(rng, nu_max, kParams);
        const auto chan = build_effective_matrix(ps, kParams, kPulse,
                                                 ChannelOperatorMode::per_symbol_circular);
        const Eigen::MatrixXcd truth = chan.freq_diag_grid();
        // received pilots: per-RE one-tap channel + noise (diagonal model)
        Eigen::MatrixXcd rx = Eigen::MatrixXcd::Zero(72, 14);
        for (auto [m, n] : pos) rx(m, n) = truth(m, n) * pilot_grid(m, n) + rng.cnormal(n0);
        const auto ls = ls_pilot_estimates(rx, pilot_grid, pos);
        const Eigen::MatrixXcd est = interp.interpolate(ls);
        num += (est - truth).squaredNorm();
        den += truth.squaredNorm();
    }
    return num / den;
}

} // namespace

TEST_CASE("ls estimates divide out the pilots") {
    const auto pat = default_pilots(2.0);
    const auto pos = pilot_positions(pat, kParams);
    CHECK(pos.size() == 72);
    const Eigen::MatrixXcd pilots = pilot_reference(pat, kParams);

    SUBCASE("flat channel recovered exactly") {
        const cplx h(0.3, -1.1);
        const Eigen::MatrixXcd rx = h * pilots;
        const auto ls = ls_pilot_estimates(rx, pilots, pos);
        for (int i = 0; i < ls.size(); ++i) CHECK(std::abs(ls[i] - h) < 1e-12);
    }

    SUBCASE("single division example") {
        Eigen::MatrixXcd rx = Eigen::MatrixXcd::Zero(72, 14);
        Eigen::MatrixXcd tx = Eigen::MatrixXcd::Zero(72, 14);
        tx(0, 2) = cplx(1.0, 1.0);
        rx(0, 2) = cplx(2.0, 2.0);
        const auto ls = ls_pilot_estimates(rx, tx, {{0, 2}});
        CHECK(std::abs(ls[0] - cplx(2.0, 0.0)) < 1e-12);
    }

    SUBCASE("zero pilot rejected") {
        Eigen::MatrixXcd tx = Eigen::MatrixXcd::Zero(72, 14);
        CHECK_THROWS_AS(ls_pilot_estimates(tx, tx, {{0, 2}}), ConfigError);
    }

    SUBCASE("ls noise variance is n0 over pilot power") {
        Rng rng(7);
        const double n0 = 0.25;
        double acc = 0.0;
        int count = 0;
        for (int t = 0; t < 400; ++t) {
            Eigen::MatrixXcd rx = pilots; // h = 1
            for (auto [m, n] : pos) rx(m, n) += rng.cnormal(n0);
            const auto ls = ls_pilot_estimates(rx, pilots, pos);
            for (int i = 0; i < ls.size(); ++i) {
                acc += std::norm(ls[i] - cplx(1.0, 0.0));
                ++count;
            }
        }
        CHECK(acc / count == doctest::Approx(n0 / 4.0).epsilon(0.05));
    }
}

TEST_CASE("static single-path covariances are rank-1 all-ones") {
    const auto cov = compute_covariances(ChannelProfile::single_path(), 0.0, kParams, kPulse,
                                         ChannelOperatorMode::per_symbol_circular, 400, 3,
                                         ExecMode::serial);
    // the grid is constant per draw, so the normalized shape is exactly
    // all-ones; the overall scale is a Monte-Carlo mean of |h0|^2
    const Eigen::MatrixXcd f_shape = cov.c_f / cov.c_f(0, 0);
    const Eigen::MatrixXcd t_shape = cov.c_t / cov.c_t(0, 0);
    CHECK((f_shape - Eigen::MatrixXcd::Ones(72, 72)).norm() / f_shape.norm() < 1e-12);
    CHECK((t_shape - Eigen::MatrixXcd::Ones(14, 14)).norm() / t_shape.norm() < 1e-12);
    CHECK(cov.c_f(0, 0).real() == doctest::Approx(1.0).epsilon(0.2));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cov.c_f);
    int positive = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) positive += es.eigenvalues()[i] > 1e-9;
    CHECK(positive == 1); // rank 1
}

TEST_CASE("zero-doppler veh-a covariance structure") {
    const auto cov = compute_covariances(ChannelProfile::veh_a(), 0.0, kParams, kPulse,
                                         ChannelOperatorMode::per_symbol_circular, 10000, 3,
                                         ExecMode::parallel);
    // time covariance about 1 everywhere (static channel); measured max
    // entry deviation at 1e4 draws is 0.030
    CHECK((cov.c_t.array() - 1.0).abs().maxCoeff() < 0.05);
    // diagonal of c_f averages to total channel power about 1
    CHECK(cov.c_f.diagonal().real().mean() == doctest::Approx(1.0).epsilon(0.05));
    // frequency correlation decays away from the diagonal
    const double near = std::abs(cov.c_f(0, 1));
    const double far = std::abs(cov.c_f(0, 36));
    CHECK(near > far);

    // Hermitian PSD (eigenvalue floor)
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cov.c_f);
    CHECK(es.eigenvalues().minCoeff() > -1e-9);
    CHECK((cov.c_f - cov.c_f.adjoint()).norm() < 1e-14);
}

TEST_CASE("covariance computation is execution-mode invariant and cacheable") {
    const auto serial = compute_covariances(ChannelProfile::veh_a(), 815.0, kParams, kPulse,
                                            ChannelOperatorMode::per_symbol_circular, 150, 5,
                                            ExecMode::serial);
    const auto parallel = compute_covariances(ChannelProfile::veh_a(), 815.0, kParams, kPulse,
                                              ChannelOperatorMode::per_symbol_circular, 150, 5,
                                              ExecMode::parallel);
    CHECK((serial.c_f - parallel.c_f).norm() == 0.0);
    CHECK((serial.c_t - parallel.c_t).norm() == 0.0);

    std::filesystem::create_directories(RINGSHAPE_TEST_OUT_DIR);
    const std::string path = std::string(RINGSHAPE_TEST_OUT_DIR) + "/cov_test.bin";
    save_covariance(serial, path);
    const auto loaded = load_covariance(path);
    CHECK((loaded.c_f - serial.c_f).norm() == 0.0);
    CHECK((loaded.c_t - serial.c_t).norm() == 0.0);
    CHECK(loaded.draws == serial.draws);
    CHECK(loaded.profile_hash == serial.profile_hash);
}

TEST_CASE("lmmse interpolates a flat channel exactly as noise vanishes") {
    // rank-1 all-ones covariances describe a constant grid
    CovariancePair cov;
    cov.c_f = Eigen::MatrixXcd::Ones(72, 72);
    cov.c_t = Eigen::MatrixXcd::Ones(14, 14);
    const auto pat = default_pilots();
    const auto pos = pilot_positions(pat, kParams);
    const Eigen::MatrixXcd pilots = pilot_reference(pat, kParams);
    const cplx h(0.8, 0.6);
    const Eigen::MatrixXcd rx = h * pilots;
    const auto ls = ls_pilot_estimates(rx, pilots, pos);
    const auto est = lmmse_interpolate(ls, pat, kParams, cov, 0.0);
    CHECK((est.array() - h).abs().maxCoeff() < 1e-6);
}

TEST_CASE("lmmse reduces to ls at pilot positions when noise is zero") {
    const auto cov = compute_covariances(ChannelProfile::veh_a(), 0.0, kParams, kPulse,
                                         ChannelOperatorMode::per_symbol_circular, 3000, 3,
                                         ExecMode::parallel);
    const auto pat = default_pilots();
    const auto pos = pilot_positions(pat, kParams);
    const Eigen::MatrixXcd pilots = pilot_reference(pat, kParams);
    Rng rng(19);
    const PathSet ps = draw_veh_a(rng, 0.0, kParams);
    const auto chan = build_effective_matrix(ps, kParams, kPulse,
                                             ChannelOperatorMode::per_symbol_circular);
    const Eigen::MatrixXcd truth = chan.freq_diag_grid();
    Eigen::MatrixXcd rx = Eigen::MatrixXcd::Zero(72, 14);
    for (auto [m, n] : pos) rx(m, n) = truth(m, n) * pilots(m, n);
    const auto ls = ls_pilot_estimates(rx, pilots, pos);
    const auto est = lmmse_interpolate(ls, pat, kParams, cov, 0.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < pos.size(); ++i) {
        worst = std::max(worst,
                         std::abs(est(pos[i].first, pos[i].second) - ls[static_cast<int>(i)]));
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("estimation quality: 20 dB pilots, zero doppler") {
    const auto cov = compute_covariances(ChannelProfile::veh_a(), 0.0, kParams, kPulse,
                                         ChannelOperatorMode::per_symbol_circular, 5000, 3,
                                         ExecMode::parallel);
    const double n0 = 1.0 / 100.0; // pilot power 1, 20 dB
    const double nmse = estimation_nmse(n0, 200, cov, 0.0);
    MESSAGE("NMSE = ", 10.0 * std::log10(nmse), " dB");
    CHECK(10.0 * std::log10(nmse) < -15.0);

    // monotone in noise
    const double nmse_mid = estimation_nmse(0.1, 120, cov, 0.0);
    const double nmse_high = estimation_nmse(1.0, 120, cov, 0.0);
    CHECK(nmse < nmse_mid);
    CHECK(nmse_mid < nmse_high);
}

TEST_CASE("estimator improves with pilot density") {
    const auto cov = compute_covariances(ChannelProfile::veh_a(), 0.0, kParams, kPulse,
                                         ChannelOperatorMode::per_symbol_circular, 4000, 3,
                                         ExecMode::parallel);
    const double n0 = 0.05;
    double prev = 1e9;
    for (int stride : {8, 4, 2}) {
        PilotPattern pat;
        pat.symbol_indices = {2, 11};
        pat.comb_stride = stride;
        Rng rng(55);
        const auto pos = pilot_positions(pat, kParams);
        const Eigen::MatrixXcd pilots = pilot_reference(pat, kParams);
        const LmmseInterpolator interp(pat, kParams, cov, n0);
        double num = 0.0, den = 0.0;
        for (int f = 0; f < 120; ++f) {
            const PathSet ps = draw_veh_a(rng, 0.0, kParams);
            const auto chan = build_effective_matrix(ps, kParams, kPulse,
                                                     ChannelOperatorMode::per_symbol_circular);
            const Eigen::MatrixXcd truth = chan.freq_diag_grid();
            Eigen::MatrixXcd rx = Eigen::MatrixXcd::Zero(72, 14);
            for (auto [m, n] : pos) rx(m, n) = truth(m, n) * pilots(m, n) + rng.cnormal(n0);
            const auto est = interp.interpolate(ls_pilot_estimates(rx, pilots, pos));
            num += (est - truth).squaredNorm();
            den += truth.squaredNorm();
        }
        const double nmse = num / den;
        CHECK(nmse < prev);
        prev = nmse;
    }
}

TEST_CASE("mmse one-tap equalizer") {
    SUBCASE("genie flat channel, zero noise, exact recovery") {
        Eigen::MatrixXcd x(2, 2), h(2, 2);
        x << cplx(1, 1), cplx(-1, 1), cplx(3, -1), cplx(-3, -1);
        h.setConstant(cplx(0.5, -0.25));
        const Eigen::MatrixXcd y = h.cwiseProduct(x);
        const auto eq = equalize(y, h, 0.0);
        CHECK((eq - x).norm() < 1e-12);
    }

    SUBCASE("one-tap inversion is unbiased at any noise level") {
        Eigen::MatrixXcd x(1, 1), h(1, 1);
        x(0, 0) = cplx(2.0, 0.0);
        h(0, 0) = cplx(0.5, -0.5);
        const Eigen::MatrixXcd y = h.cwiseProduct(x);
        for (double n0 : {0.0, 0.1, 0.5, 2.0}) {
            const auto eq = equalize(y, h, n0);
            CHECK(std::abs(eq(0, 0) - x(0, 0)) < 1e-5);
        }
    }

    SUBCASE("vanishing channel gain does not blow up") {
        Eigen::MatrixXcd y(1, 1), h(1, 1);
        y(0, 0) = cplx(1.0, 0.0);
        h(0, 0) = cplx(0.0, 0.0);
        const auto eq = equalize(y, h, 0.3);
        CHECK(std::isfinite(eq(0, 0).real()));
    }
}
