#include "ringshape/chanest.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "ringshape/errors.hpp"
#include "ringshape/util.hpp"

namespace ringshape {

namespace {

constexpr int kChunk = 32; // draws per accumulation chunk (fixed for determinism)

struct CovAccum {
    Eigen::MatrixXcd c_f;
    Eigen::MatrixXcd c_t;
    CovAccum(int m, int n)
        : c_f(Eigen::MatrixXcd::Zero(m, m)), c_t(Eigen::MatrixXcd::Zero(n, n)) {}
};

} // namespace

std::uint64_t covariance_profile_hash(const ChannelProfile& profile, double nu_max_hz,
                                      const OfdmParams& params, const PulseModel& pulse,
                                      ChannelOperatorMode mode, std::uint64_t seed) {
    Fnv64 h;
    h.add(params.subcarriers).add(params.symbols).add(params.subcarrier_spacing);
    for (std::size_t i = 0; i < profile.delays_ns.size(); ++i) {
        h.add(profile.delays_ns[i]).add(profile.powers_db[i]);
    }
    h.add(nu_max_hz).add(pulse.span).add(static_cast<int>(mode)).add(seed);
    return h.value();
}

CovariancePair compute_covariances(const ChannelProfile& profile, double nu_max_hz,
                                   const OfdmParams& params, const PulseModel& pulse,
                                   ChannelOperatorMode mode, int draws, std::uint64_t seed,
                                   ExecMode exec) {
    if (draws < 1) throw ConfigError("covariance: draws must be >= 1");
    const int m = params.subcarriers;
    const int n = params.symbols;
    const int chunks = (draws + kChunk - 1) / kChunk;

    std::vector<CovAccum> partial(chunks, CovAccum(m, n));

    auto run_chunk = [&](int ci) {
        CovAccum& acc = partial[ci];
        const int lo = ci * kChunk;
        const int hi = std::min(draws, lo + kChunk);
        for (int d = lo; d < hi; ++d) {
            Rng rng(derive_seed(seed, static_cast<std::uint64_t>(d), 11));
            const PathSet ps = draw_paths(profile, nu_max_hz, params, rng);
            const EffectiveChannel h = build_effective_matrix(ps, params, pulse, mode);
            const Eigen::MatrixXcd g = h.freq_diag_grid();
            acc.c_f.noalias() += g * g.adjoint() / static_cast<double>(n);
            acc.c_t.noalias() += g.transpose() * g.conjugate() / static_cast<double>(m);
        }
    };

    if (exec == ExecMode::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int ci = 0; ci < chunks; ++ci) run_chunk(ci);
    } else {
        for (int ci = 0; ci < chunks; ++ci) run_chunk(ci);
    }

    CovariancePair cov;
    cov.c_f = Eigen::MatrixXcd::Zero(m, m);
    cov.c_t = Eigen::MatrixXcd::Zero(n, n);
    for (int ci = 0; ci < chunks; ++ci) { // fixed combine order
        cov.c_f += partial[ci].c_f;
        cov.c_t += partial[ci].c_t;
    }
    cov.c_f /= static_cast<double>(draws);
    cov.c_t /= static_cast<double>(draws);
    cov.c_f = ((cov.c_f + cov.c_f.adjoint()) / 2.0).eval();
    cov.c_t = ((cov.c_t + cov.c_t.adjoint()) / 2.0).eval();
    cov.profile_hash = covariance_profile_hash(profile, nu_max_hz, params, pulse, mode, seed);
    cov.draws = draws;
    return cov;
}

namespace {

constexpr char kCovMagic[8] = {'R', 'S', 'C', 'O', 'V', '0', '1', '\0'};

void write_matrix(std::ofstream& out, const Eigen::MatrixXcd& a) {
    for (int c = 0; c < a.cols(); ++c) {
        for (int r = 0; r < a.rows(); ++r) {
            const double re = a(r, c).real(), im = a(r, c).imag();
            out.write(reinterpret_cast<const char*>(&re), sizeof(double));
            out.write(reinterpret_cast<const char*>(&im), sizeof(double));
        }
    }
}

Eigen::MatrixXcd read_matrix(std::ifstream& in, int rows, int cols) {
    Eigen::MatrixXcd a(rows, cols);
    for (int c = 0; c < cols; ++c) {
        for (int r = 0; r < rows; ++r) {
            double re = 0, im = 0;
            in.read(reinterpret_cast<char*>(&re), sizeof(double));
            in.read(reinterpret_cast<char*>(&im), sizeof(double));
            a(r, c) = {re, im};
        }
    }
    return a;
}

} // namespace

void save_covariance(const CovariancePair& cov, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("covariance: cannot write " + path);
    out.write(kCovMagic, sizeof(kCovMagic));
    const std::int32_t m = static_cast<std::int32_t>(cov.c_f.rows());
    const std::int32_t n = static_cast<std::int32_t>(cov.c_t.rows());
    const std::int32_t draws = cov.draws;
    out.write(reinterpret_cast<const char*>(&m), sizeof(m));
    out.write(reinterpret_cast<const char*>(&n), sizeof(n));
    out.write(reinterpret_cast<const char*>(&draws), sizeof(draws));
    out.write(reinterpret_cast<const char*>(&cov.profile_hash), sizeof(cov.profile_hash));
    write_matrix(out, cov.c_f);
    write_matrix(out, cov.c_t);
    if (!out) throw IoError("covariance: write failed for " + path);
}

CovariancePair load_covariance(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("covariance: cannot open " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kCovMagic, sizeof(magic)) != 0)
        throw IoError("covariance: bad magic in " + path);
    std::int32_t m = 0, n = 0, draws = 0;
    std::uint64_t hash = 0;
    in.read(reinterpret_cast<char*>(&m), sizeof(m));
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    in.read(reinterpret_cast<char*>(&draws), sizeof(draws));
    in.read(reinterpret_cast<char*>(&hash), sizeof(hash));
    if (!in || m < 1 || n < 1) throw IoError("covariance: corrupt header in " + path);
    CovariancePair cov;
    cov.c_f = read_matrix(in, m, m);
    cov.c_t = read_matrix(in, n, n);
    cov.draws = draws;
    cov.profile_hash = hash;
    if (!in) throw IoError("covariance: truncated file " + path);
    return cov;
}

std::vector<std::pair<int, int>> pilot_positions(const PilotPattern& pattern,
                                                 const OfdmParams& params) {
    std::vector<std::pair<int, int>> pos;
    for (int n = 0; n < params.symbols; ++n) {
        for (int m = 0; m < params.subcarriers; ++m) {
            if (pattern.is_pilot(m, n)) pos.emplace_back(m, n);
        }
    }
    return pos;
}

Eigen::VectorXcd ls_pilot_estimates(const Eigen::MatrixXcd& received_grid,
                                    const Eigen::MatrixXcd& pilot_grid,
                                    const std::vector<std::pair<int, int>>& positions) {
    Eigen::VectorXcd ls(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const auto [m, n] = positions[i];
        const cplx x = pilot_grid(m, n);
        if (x == cplx(0.0, 0.0)) throw ConfigError("ls_pilot_estimates: zero pilot value");
        ls[static_cast<int>(i)] = received_grid(m, n) / x;
    }
    return ls;
}

LmmseInterpolator::LmmseInterpolator(const PilotPattern& pattern, const OfdmParams& params,
                                     const CovariancePair& cov, double noise_var)
    : subcarriers_(params.subcarriers), symbols_(params.symbols) {
    if (cov.c_f.rows() != subcarriers_ || cov.c_t.rows() != symbols_)
        throw ConfigError("lmmse: covariance dimensions do not match the grid");
    if (noise_var < 0.0) throw ConfigError("lmmse: negative noise variance");

    const auto pos = pilot_positions(pattern, params);
    const int np = static_cast<int>(pos.size());
    if (np == 0) throw ConfigError("lmmse: pattern has no pilots");

    // Separable covariance: R[(m,n),(m',n')] = c_f(m,m') * c_t(n,n').
    Eigen::MatrixXcd r_pp(np, np);
    for (int i = 0; i < np; ++i) {
        for (int j = 0; j < np; ++j) {
            r_pp(i, j) = cov.c_f(pos[i].first, pos[j].first) * cov.c_t(pos[i].second, pos[j].second);
        }
    }
    const double tr = r_pp.real().trace() / np;
    r_pp.diagonal().array() += noise_var + 1e-8 * tr;

    const int total = subcarriers_ * symbols_;
    Eigen::MatrixXcd r_ap(total, np);
    for (int n = 0; n < symbols_; ++n) {
        for (int m = 0; m < subcarriers_; ++m) {
            const int row = n * subcarriers_ + m;
            for (int j = 0; j < np; ++j) {
                r_ap(row, j) = cov.c_f(m, pos[j].first) * cov.c_t(n, pos[j].second);
            }
        }
    }

    Eigen::LDLT<Eigen::MatrixXcd> ldlt(r_pp);
    if (ldlt.info() != Eigen::Success)
        throw ConfigError("lmmse: pilot covariance system is singular");
    gain_ = ldlt.solve(r_ap.adjoint()).adjoint();
    if (!gain_.allFinite()) throw ConfigError("lmmse: non-finite interpolator gain");
}

Eigen::MatrixXcd LmmseInterpolator::interpolate(const Eigen::VectorXcd& ls) const {
    if (ls.size() != gain_.cols()) throw ConfigError("lmmse: LS vector length mismatch");
    const Eigen::VectorXcd est = gain_ * ls;
    Eigen::MatrixXcd grid(subcarriers_, symbols_);
    for (int n = 0; n < symbols_; ++n) {
        grid.col(n) = est.segment(n * subcarriers_, subcarriers_);
    }
    return grid;
}

Eigen::MatrixXcd lmmse_interpolate(const Eigen::VectorXcd& pilot_ls,
                                   const PilotPattern& pattern, const OfdmParams& params,
                                   const CovariancePair& cov, double noise_var) {
    return LmmseInterpolator(pattern, params, cov, noise_var).interpolate(pilot_ls);
}

Eigen::MatrixXcd equalize(const Eigen::MatrixXcd& received_grid,
                          const Eigen::MatrixXcd& estimate, double n0) {
    if (received_grid.rows() != estimate.rows() || received_grid.cols() != estimate.cols())
        throw ConfigError("equalize: dimension mismatch");
    Eigen::MatrixXcd x(received_grid.rows(), received_grid.cols());
    for (int c = 0; c < x.cols(); ++c) {
        for (int r = 0; r < x.rows(); ++r) {
            const cplx h = estimate(r, c);
            const double denom = std::norm(h) + 1e-6 * n0;
            x(r, c) = denom > 0.0 ? std::conj(h) * received_grid(r, c) / denom : cplx(0.0, 0.0);
        }
    }
    return x;
}

} // namespace ringshape
