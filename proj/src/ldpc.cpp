#include "ringshape/ldpc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ringshape/errors.hpp"

namespace ringshape {

namespace {

struct BitRow {
    std::vector<std::uint64_t> w;
    explicit BitRow(int nbits) : w((nbits + 63) / 64, 0) {}
    void set(int i) { w[i >> 6] |= 1ull << (i & 63); }
    bool get(int i) const { return (w[i >> 6] >> (i & 63)) & 1u; }
    void operator^=(const BitRow& o) {
        for (std::size_t j = 0; j < w.size(); ++j) w[j] ^= o.w[j];
    }
};

} // namespace

LdpcCode build_ldpc(int n, std::vector<std::vector<int>> check_rows) {
    const int m = static_cast<int>(check_rows.size());
    if (n < 2 || m < 1 || m >= n) throw ConfigError("ldpc: bad dimensions");

    LdpcCode code;
    code.n = n;
    code.k = n - m;
    code.check_neighbors = std::move(check_rows);
    code.var_neighbors.assign(n, {});
    for (int c = 0; c < m; ++c) {
        auto& row = code.check_neighbors[c];
        std::sort(row.begin(), row.end());
        if (std::adjacent_find(row.begin(), row.end()) != row.end())
            throw ConfigError("ldpc: duplicate entry in check row");
        for (int v : row) {
            if (v < 0 || v >= n) throw ConfigError("ldpc: variable index out of range");
            code.var_neighbors[v].push_back(c);
        }
    }

    // Gauss-Jordan over GF(2). Pivots are chosen right-to-left so the
    // information positions cluster at the low column indices.
    std::vector<BitRow> rows(m, BitRow(n));
    for (int c = 0; c < m; ++c) {
        for (int v : code.check_neighbors[c]) rows[c].set(v);
    }
    std::vector<int> pivot_cols;
    int rank = 0;
    for (int col = n - 1; col >= 0 && rank < m; --col) {
        int pr = -1;
        for (int r = rank; r < m; ++r) {
            if (rows[r].get(col)) {
                pr = r;
                break;
            }
        }
        if (pr < 0) continue;
        std::swap(rows[rank], rows[pr]);
        for (int r = 0; r < m; ++r) {
            if (r != rank && rows[r].get(col)) rows[r] ^= rows[rank];
        }
        pivot_cols.push_back(col);
        ++rank;
    }
    if (rank < m) throw ConfigError("ldpc: parity-check matrix is rank-deficient");

    std::vector<char> is_pivot(n, 0);
    for (int c : pivot_cols) is_pivot[c] = 1;
    for (int c = 0; c < n; ++c) {
        if (!is_pivot[c]) code.info_cols.push_back(c);
    }
    code.pivot_cols = pivot_cols;

    // parity bit r = sum over info bits present in reduced row r.
    const int kw = (code.k + 63) / 64;
    code.parity_gen.assign(m, std::vector<std::uint64_t>(kw, 0));
    std::vector<int> info_rank(n, -1);
    for (int j = 0; j < code.k; ++j) info_rank[code.info_cols[j]] = j;
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < n; ++c) {
            if (rows[r].get(c) && info_rank[c] >= 0) {
                const int j = info_rank[c];
                code.parity_gen[r][j >> 6] ^= 1ull << (j & 63);
            }
        }
    }
    return code;
}

LdpcCode load_parity_check(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("ldpc: cannot open " + path);
    std::vector<long long> tok;
    long long v;
    while (in >> v) tok.push_back(v);

    std::size_t p = 0;
    auto next = [&]() -> long long {
        if (p >= tok.size()) throw ConfigError("ldpc: truncated alist file " + path);
        return tok[p++];
    };

    const int n = static_cast<int>(next());
    const int m = static_cast<int>(next());
    if (n <= 0 || m <= 0) throw ConfigError("ldpc: bad alist header");
    const int dvmax = static_cast<int>(next());
    const int dcmax = static_cast<int>(next());
    std::vector<int> dv(n), dc(m);
    for (auto& d : dv) d = static_cast<int>(next());
    for (auto& d : dc) d = static_cast<int>(next());

    auto read_list = [&](int degree, int pad_to, int max_index) {
        std::vector<int> out;
        out.reserve(degree);
        int got = 0;
        for (int j = 0; j < pad_to; ++j) {
            // Padded files carry trailing zeros per node; unpadded files
            // stop at the node degree.
            if (got == degree && (p >= tok.size() || tok[p] != 0)) break;
            const long long e = next();
            if (e == 0) continue;
            if (e < 1 || e > max_index) throw ConfigError("ldpc: alist index out of range");
            out.push_back(static_cast<int>(e - 1));
            ++got;
        }
        if (got != degree) throw ConfigError("ldpc: alist degree mismatch");
        return out;
    };

    std::vector<std::vector<int>> var_lists(n), check_rows(m);
    for (int i = 0; i < n; ++i) {
        if (dv[i] < 0 || dv[i] > dvmax) throw ConfigError("ldpc: bad column degree");
        var_lists[i] = read_list(dv[i], dvmax, m);
    }
    for (int c = 0; c < m; ++c) {
        if (dc[c] < 0 || dc[c] > dcmax) throw ConfigError("ldpc: bad row degree");
        check_rows[c] = read_list(dc[c], dcmax, n);
    }

    // Column and row adjacency must describe the same edge set.
    std::vector<std::vector<int>> from_cols(m);
    for (int i = 0; i < n; ++i) {
        for (int c : var_lists[i]) from_cols[c].push_back(i);
    }
    for (int c = 0; c < m; ++c) {
        auto a = from_cols[c];
        auto b = check_rows[c];
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        if (a != b) throw ConfigError("ldpc: alist row/column lists inconsistent");
    }

    return build_ldpc(n, std::move(check_rows));
}

void write_alist(int n, const std::vector<std::vector<int>>& check_rows, const std::string& path) {
    const int m = static_cast<int>(check_rows.size());
    std::vector<std::vector<int>> var_lists(n);
    for (int c = 0; c < m; ++c) {
        for (int v : check_rows[c]) var_lists[v].push_back(c);
    }
    int dvmax = 0, dcmax = 0;
    for (auto& l : var_lists) dvmax = std::max(dvmax, static_cast<int>(l.size()));
    for (auto& r : check_rows) dcmax = std::max(dcmax, static_cast<int>(r.size()));

    std::ofstream out(path);
    if (!out) throw IoError("ldpc: cannot write " + path);
    out << n << ' ' << m << '\n' << dvmax << ' ' << dcmax << '\n';
    for (int i = 0; i < n; ++i) out << var_lists[i].size() << (i + 1 < n ? ' ' : '\n');
    for (int c = 0; c < m; ++c) out << check_rows[c].size() << (c + 1 < m ? ' ' : '\n');
    auto emit = [&](const std::vector<int>& l, int pad) {
        for (int j = 0; j < pad; ++j) {
            out << (j < static_cast<int>(l.size()) ? l[j] + 1 : 0) << (j + 1 < pad ? ' ' : '\n');
        }
    };
    for (int i = 0; i < n; ++i) emit(var_lists[i], dvmax);
    for (int c = 0; c < m; ++c) emit(check_rows[c], dcmax);
    if (!out) throw IoError("ldpc: write failed for " + path);
}

std::vector<std::uint8_t> ldpc_encode(std::span<const std::uint8_t> info, const LdpcCode& code) {
    if (static_cast<int>(info.size()) != code.k) throw ConfigError("ldpc_encode: info length mismatch");
    const int kw = (code.k + 63) / 64;
    std::vector<std::uint64_t> iw(kw, 0);
    for (int j = 0; j < code.k; ++j) {
        if (info[j] & 1) iw[j >> 6] |= 1ull << (j & 63);
    }
    std::vector<std::uint8_t> cw(code.n, 0);
    for (int j = 0; j < code.k; ++j) cw[code.info_cols[j]] = info[j] & 1;
    for (int r = 0; r < code.num_checks(); ++r) {
        std::uint64_t acc = 0;
        const auto& g = code.parity_gen[r];
        for (int j = 0; j < kw; ++j) acc ^= g[j] & iw[j];
        cw[code.pivot_cols[r]] = static_cast<std::uint8_t>(std::popcount(acc) & 1);
    }
    return cw;
}

std::vector<std::uint8_t> extract_info(std::span<const std::uint8_t> codeword, const LdpcCode& code) {
    std::vector<std::uint8_t> info(code.k);
    for (int j = 0; j < code.k; ++j) info[j] = codeword[code.info_cols[j]] & 1;
    return info;
}

bool syndrome_ok(std::span<const std::uint8_t> hard, const LdpcCode& code) {
    for (const auto& row : code.check_neighbors) {
        int s = 0;
        for (int v : row) s ^= hard[v] & 1;
        if (s) return false;
    }
    return true;
}

LdpcDecodeResult ldpc_decode(std::span<const double> llrs, const LdpcCode& code, int max_iters) {
    if (static_cast<int>(llrs.size()) != code.n) throw ConfigError("ldpc_decode: LLR length mismatch");
    if (max_iters < 1) throw ConfigError("ldpc_decode: max_iters must be >= 1");
    constexpr double alpha = 0.75; // min-sum normalization

    const int m = code.num_checks();
    std::vector<double> post(llrs.begin(), llrs.end());
    std::vector<std::vector<double>> msg(m); // check -> variable messages
    for (int c = 0; c < m; ++c) msg[c].assign(code.check_neighbors[c].size(), 0.0);

    LdpcDecodeResult res;
    res.bits.assign(code.n, 0);

    std::vector<double> q; // extrinsic inputs of one check, reused
    for (int iter = 0; iter < max_iters; ++iter) {
        for (int c = 0; c < m; ++c) {
            const auto& nb = code.check_neighbors[c];
            const int deg = static_cast<int>(nb.size());
            q.resize(deg);
            double min1 = 1e300, min2 = 1e300;
            int arg1 = 0;
            int sign = 0;
            for (int j = 0; j < deg; ++j) {
                q[j] = post[nb[j]] - msg[c][j];
                const double a = std::abs(q[j]);
                if (a < min1) {
                    min2 = min1;
                    min1 = a;
                    arg1 = j;
                } else if (a < min2) {
                    min2 = a;
                }
                if (q[j] < 0.0) sign ^= 1;
            }
            for (int j = 0; j < deg; ++j) {
                const double mag = alpha * (j == arg1 ? min2 : min1);
                const int s = sign ^ (q[j] < 0.0 ? 1 : 0);
                const double r = s ? -mag : mag;
                msg[c][j] = r;
                post[nb[j]] = q[j] + r;
            }
        }

        res.iterations = iter + 1;
        bool decided = true;
        for (int v = 0; v < code.n; ++v) {
            res.bits[v] = post[v] < 0.0 ? 1 : 0;
            if (post[v] == 0.0) decided = false;
        }
        if (decided && syndrome_ok(res.bits, code)) {
            res.converged = true;
            return res;
        }
    }
    return res;
}

} // namespace ringshape
