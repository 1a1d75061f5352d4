// Progressive-edge-growth LDPC construction. Emits parity-check matrices in
// alist format; the shipped code files under data/ were produced by this
// tool (see README).

#include <algorithm>
#include <iostream>
#include <queue>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ringshape/errors.hpp"
#include "ringshape/ldpc.hpp"
#include "ringshape/rng.hpp"

using namespace ringshape;

namespace {

struct Graph {
    int n, m;
    std::vector<std::vector<int>> var_checks;  // per variable
    std::vector<std::vector<int>> check_vars;  // per check
};

// Checks as far as possible from variable v in the current graph: the
// complement of the BFS-covered set, or the deepest BFS layer once
// everything is covered.
std::vector<int> farthest_checks(const Graph& g, int v) {
    std::vector<char> check_seen(g.m, 0), var_seen(g.n, 0);
    var_seen[v] = 1;
    std::vector<int> frontier_vars{v};
    std::vector<int> last_layer;
    int covered = 0;

    while (!frontier_vars.empty()) {
        std::vector<int> new_checks;
        for (int fv : frontier_vars) {
            for (int c : g.var_checks[fv]) {
                if (!check_seen[c]) {
                    check_seen[c] = 1;
                    new_checks.push_back(c);
                }
            }
        }
        if (new_checks.empty()) break;
        covered += static_cast<int>(new_checks.size());
        last_layer = new_checks;
        frontier_vars.clear();
        for (int c : new_checks) {
            for (int nv : g.check_vars[c]) {
                if (!var_seen[nv]) {
                    var_seen[nv] = 1;
                    frontier_vars.push_back(nv);
                }
            }
        }
    }

    if (covered < g.m) {
        std::vector<int> out;
        for (int c = 0; c < g.m; ++c) {
            if (!check_seen[c]) out.push_back(c);
        }
        return out;
    }
    return last_layer;
}

std::vector<std::vector<int>> peg_construct(int n, int m, int col_weight, Rng& rng) {
    Graph g{n, m, std::vector<std::vector<int>>(n), std::vector<std::vector<int>>(m)};
    for (int v = 0; v < n; ++v) {
        for (int e = 0; e < col_weight; ++e) {
            std::vector<int> cand;
            if (e == 0) {
                cand.resize(m);
                for (int c = 0; c < m; ++c) cand[c] = c;
            } else {
                cand = farthest_checks(g, v);
            }
            // lowest current degree, random tie-break
            std::size_t best_deg = SIZE_MAX;
            std::vector<int> mins;
            for (int c : cand) {
                if (std::find(g.var_checks[v].begin(), g.var_checks[v].end(), c) !=
                    g.var_checks[v].end())
                    continue;
                const std::size_t d = g.check_vars[c].size();
                if (d < best_deg) {
                    best_deg = d;
                    mins.clear();
                }
                if (d == best_deg) mins.push_back(c);
            }
            if (mins.empty()) throw ConfigError("peg: no candidate check available");
            const int pick = mins[rng.below(mins.size())];
            g.var_checks[v].push_back(pick);
            g.check_vars[pick].push_back(v);
        }
    }
    return g.check_vars;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"PEG LDPC parity-check generator"};
    int n = 1872, k = 936, col_weight = 3;
    std::uint64_t seed = 1;
    std::string out;
    app.add_option("--n", n, "codeword length");
    app.add_option("--k", k, "information length");
    app.add_option("--col-weight", col_weight, "variable node degree");
    app.add_option("--seed", seed, "construction seed");
    app.add_option("--out", out, "output alist path")->required();
    CLI11_PARSE(app, argc, argv);

    try {
        const int m = n - k;
        if (m < 1 || k < 1) throw ConfigError("peg: need 0 < k < n");
        for (std::uint64_t attempt = 0; attempt < 32; ++attempt) {
            Rng rng(derive_seed(seed, attempt, 5));
            auto rows = peg_construct(n, m, col_weight, rng);
            try {
                const LdpcCode code = build_ldpc(n, rows); // full-rank check
                write_alist(n, rows, out);
                std::cerr << "wrote " << out << " (n=" << code.n << ", k=" << code.k
                          << ", rate=" << code.rate() << ", attempt=" << attempt << ")\n";
                return 0;
            } catch (const ConfigError&) {
                std::cerr << "attempt " << attempt << " rank-deficient; retrying\n";
            }
        }
        std::cerr << "failed to build a full-rank matrix\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    }
}
