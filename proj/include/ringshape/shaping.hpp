#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ringshape/constellation.hpp"

namespace ringshape {

// Sparse shaping code: all binary vectors of length z with Hamming weight
// at most `sparsity`. Codewords are never materialized; the enumerative
// index <-> codeword maps below rank them on the fly.
struct ShapingCode {
    int z = 0;
    int sparsity = 0;
    std::uint64_t codebook_size = 0; // sum_{w<=s} C(z, w)
    int bits_per_block = 0;          // floor(log2(codebook_size))

    static ShapingCode make(int z, int sparsity);
    bool is_valid_codeword(std::span<const std::uint8_t> cw) const;
};

// Enumeration order: weight ascending, then supports in lexicographic order
// within each weight class. Index 0 is the all-zero word.
std::vector<std::uint8_t> index_to_codeword(std::uint64_t index, const ShapingCode& code);
std::uint64_t codeword_to_index(std::span<const std::uint8_t> codeword, const ShapingCode& code);

// bits_per_block / z.
double shaping_rate(const ShapingCode& code);

// Probability that a symbol position carries an outer-ring point, i.e. the
// mean codeword weight over the 2^bits_per_block indexed codewords, per
// position.
double outer_probability(const ShapingCode& code);

struct ShapedBlock {
    std::vector<cplx> symbols;        // transmitted points; outer iff codeword bit set
    std::vector<std::uint8_t> codeword;
};

// Ring-selects each inner symbol by the codeword the shaping index picks:
// bit 0 keeps the inner point, bit 1 substitutes its outer representative.
ShapedBlock shaping_encode(std::span<const cplx> inner_symbols, std::uint64_t shaping_index,
                           const ShapingCode& code, const ConstellationSpec& spec);

struct ShapingDecodeResult {
    std::vector<std::uint8_t> codeword; // repaired to validity
    std::uint64_t index = 0;            // decoded shaping bits as an integer
    std::vector<cplx> hard_symbols;     // ring-consistent hard decisions
    std::vector<double> distances;      // per-position minimum distance metric
};

// Nearest-point detection over the augmented set, ring-indicator readout,
// and dirtiest-symbol repair until the codeword is valid. Positions flipped
// during repair are re-detected within the forced ring.
ShapingDecodeResult shaping_decode(std::span<const cplx> equalized, const ShapingCode& code,
                                   const ConstellationSpec& spec);

// Shaping bit strings use the MSB-first convention: bits[0] is the most
// significant bit of the block index.
std::vector<std::uint8_t> index_to_bits(std::uint64_t index, int nbits);
std::uint64_t bits_to_index(std::span<const std::uint8_t> bits);

} // namespace ringshape
