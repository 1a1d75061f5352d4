#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ringshape {

// Binary LDPC code held as a sparse parity-check matrix plus a systematic
// encoder precomputed by GF(2) elimination at load time. Immutable after
// construction; decoding allocates per-call state, so concurrent decodes
// over one LdpcCode are safe.
struct LdpcCode {
    int n = 0; // codeword length
    int k = 0; // information length (n - rank(H); H must have full row rank)

    std::vector<std::vector<int>> check_neighbors; // per check: variable indices
    std::vector<std::vector<int>> var_neighbors;   // per variable: check indices

    // Systematic encoding: info bit j sits at column info_cols[j], parity
    // bit r at pivot_cols[r] with value parity_gen[r] . info (GF(2)).
    std::vector<int> info_cols;
    std::vector<int> pivot_cols;
    std::vector<std::vector<std::uint64_t>> parity_gen; // m rows of ceil(k/64) words

    int num_checks() const { return n - k; }
    double rate() const { return static_cast<double>(k) / n; }
};

// Builds a code from explicit check rows; throws ConfigError if H is
// rank-deficient or malformed. Shared by the alist loader and tests.
LdpcCode build_ldpc(int n, std::vector<std::vector<int>> check_rows);

// MacKay alist text format (1-based indices, zero padding tolerated).
LdpcCode load_parity_check(const std::string& path);
void write_alist(int n, const std::vector<std::vector<int>>& check_rows, const std::string& path);

std::vector<std::uint8_t> ldpc_encode(std::span<const std::uint8_t> info, const LdpcCode& code);

// Hard bits at info positions of a full codeword.
std::vector<std::uint8_t> extract_info(std::span<const std::uint8_t> codeword, const LdpcCode& code);

bool syndrome_ok(std::span<const std::uint8_t> hard, const LdpcCode& code);

struct LdpcDecodeResult {
    std::vector<std::uint8_t> bits; // hard decisions, all n positions
    bool converged = false;
    int iterations = 0;
};

// Layered normalized min-sum (factor 0.75), early exit on zero syndrome.
// Positive LLR means bit 0 is more likely.
LdpcDecodeResult ldpc_decode(std::span<const double> llrs, const LdpcCode& code, int max_iters = 50);

} // namespace ringshape
