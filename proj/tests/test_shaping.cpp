#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles/ml_shaping.hpp"
#include "ringshape/errors.hpp"
#include "ringshape/rng.hpp"
#include "ringshape/shaping.hpp"

using namespace ringshape;

TEST_CASE("codebook sizes and bits per block") {
    const auto c15 = ShapingCode::make(15, 1);
    CHECK(c15.codebook_size == 16);
    CHECK(c15.bits_per_block == 4);

    const auto c23 = ShapingCode::make(23, 3);
    CHECK(c23.codebook_size == 2048);
    CHECK(c23.bits_per_block == 11);

    const auto c30 = ShapingCode::make(3, 0);
    CHECK(c30.codebook_size == 1);
    CHECK(c30.bits_per_block == 0);
    CHECK(shaping_rate(c30) == 0.0);
}

TEST_CASE("enumeration order matches brute force") {
    // weight ascending, then lexicographic supports; index 0 = all-zero
    for (auto [z, s] : std::vector<std::pair<int, int>>{{3, 1}, {6, 2}, {9, 3}, {12, 4}}) {
        const auto code = ShapingCode::make(z, s);
        const auto book = oracle::enumerate_codebook(z, s);
        REQUIRE(book.size() == code.codebook_size);
        for (std::uint64_t i = 0; i < (1ull << code.bits_per_block); ++i) {
            CHECK(index_to_codeword(i, code) == book[i]);
            CHECK(codeword_to_index(book[i], code) == i);
        }
    }

    const auto c31 = ShapingCode::make(3, 1);
    CHECK(index_to_codeword(0, c31) == std::vector<std::uint8_t>{0, 0, 0});
    CHECK(index_to_codeword(3, c31) == std::vector<std::uint8_t>{0, 0, 1});
    CHECK(codeword_to_index(std::vector<std::uint8_t>{1, 0, 0}, c31) == 1);
}

TEST_CASE("rank/unrank round trip is exhaustive at z=23") {
    const auto code = ShapingCode::make(23, 3);
    for (std::uint64_t i = 0; i < 2048; ++i) {
        CHECK(codeword_to_index(index_to_codeword(i, code), code) == i);
    }
}

TEST_CASE("invalid inputs are rejected") {
    const auto code = ShapingCode::make(15, 1);
    CHECK_THROWS_AS(index_to_codeword(16, code), ConfigError);
    std::vector<std::uint8_t> heavy(15, 0);
    heavy[0] = heavy[3] = heavy[7] = heavy[9] = 1;
    CHECK_THROWS_AS(codeword_to_index(heavy, ShapingCode::make(15, 3)), ConfigError);
    CHECK_THROWS_AS(codeword_to_index(std::vector<std::uint8_t>(14, 0), code), ConfigError);
}

TEST_CASE("shaping rate values") {
    CHECK(shaping_rate(ShapingCode::make(15, 1)) == doctest::Approx(4.0 / 15.0));
    CHECK(shaping_rate(ShapingCode::make(23, 3)) == doctest::Approx(11.0 / 23.0));
}

TEST_CASE("outer probability equals the brute-force mean weight") {
    CHECK(outer_probability(ShapingCode::make(3, 1)) == doctest::Approx(0.25));
    CHECK(outer_probability(ShapingCode::make(15, 1)) == doctest::Approx(1.0 / 16.0));

    const auto code = ShapingCode::make(23, 3);
    const auto book = oracle::enumerate_codebook(23, 3, 2048);
    double w = 0.0;
    for (const auto& cw : book) {
        for (auto b : cw) w += b;
    }
    const double expect = w / (2048.0 * 23.0);
    CHECK(outer_probability(code) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(outer_probability(code) == doctest::Approx(254.0 / 2048.0).epsilon(1e-12));
}

TEST_CASE("encoder reproduces the worked example") {
    const auto spec = build_augmented_qam(4);
    const auto code = ShapingCode::make(3, 1);
    const std::vector<cplx> inner{{1, 1}, {1, -1}, {-1, 1}};
    // codeword [1 0 0] has index 1 in the enumeration
    const auto blk = shaping_encode(inner, 1, code, spec);
    CHECK(blk.codeword == std::vector<std::uint8_t>{1, 0, 0});
    CHECK(blk.symbols[0] == cplx(-3, 1));
    CHECK(blk.symbols[1] == cplx(1, -1));
    CHECK(blk.symbols[2] == cplx(-1, 1));

    const auto zero = shaping_encode(inner, 0, code, spec);
    CHECK(zero.symbols == inner);
}

TEST_CASE("encoded blocks satisfy the ring/codeword invariant") {
    const auto spec = build_augmented_qam(4);
    const auto code = ShapingCode::make(15, 1);
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<cplx> inner(code.z);
        for (auto& s : inner) s = spec.inner[rng.below(4)];
        const std::uint64_t idx = rng.next_u64() & 15u;
        const auto blk = shaping_encode(inner, idx, code, spec);
        for (int i = 0; i < code.z; ++i) {
            const bool outer = spec.inner_index_of(blk.symbols[i]) < 0;
            CHECK(outer == (blk.codeword[i] == 1));
        }
    }
}

TEST_CASE("noiseless round trip over every codeword") {
    const auto spec = build_augmented_qam(4);
    const auto code = ShapingCode::make(15, 1);
    Rng rng(99);
    for (std::uint64_t idx = 0; idx < 16; ++idx) {
        std::vector<cplx> inner(code.z);
        for (auto& s : inner) s = spec.inner[rng.below(4)];
        const auto blk = shaping_encode(inner, idx, code, spec);
        const auto dec = shaping_decode(blk.symbols, code, spec);
        CHECK(dec.index == idx);
        CHECK(dec.codeword == blk.codeword);
        CHECK(dec.hard_symbols == blk.symbols);
        for (double d : dec.distances) CHECK(d == doctest::Approx(0.0));
    }
}

TEST_CASE("all-inner noiseless block decodes to index 0") {
    const auto spec = build_augmented_qam(4);
    const auto code = ShapingCode::make(15, 1);
    std::vector<cplx> block(code.z, {1, 1});
    const auto dec = shaping_decode(block, code, spec);
    CHECK(dec.index == 0);
    CHECK(std::count(dec.codeword.begin(), dec.codeword.end(), 1) == 0);
}

TEST_CASE("repair flips the dirtiest raw one and matches the ML choice") {
    const auto spec = build_augmented_qam(4);
    const auto code = ShapingCode::make(4, 1);

    // Construct a received block whose raw detection has ones at positions
    // 0 and 2, with position 0 clearly dirtier.
    std::vector<cplx> rx(4);
    rx[0] = cplx(-3, 1) + cplx(0.8, 0.3);  // outer, large residual
    rx[1] = cplx(1, -1) + cplx(0.05, 0.0); // inner, clean
    rx[2] = cplx(3, -1) + cplx(-0.05, 0.1); // outer, clean
    rx[3] = cplx(-1, -1);

    const auto dec = shaping_decode(rx, code, spec);
    CHECK(dec.codeword == std::vector<std::uint8_t>{0, 0, 1, 0});
    // flipped position must be re-detected on the inner ring
    CHECK(spec.inner_index_of(dec.hard_symbols[0]) >= 0);

    const auto ml = oracle::ml_shaping_decode(rx, code, spec);
    CHECK(dec.codeword == ml.codeword);
}

TEST_CASE("decoded codeword weight never exceeds sparsity") {
    const auto spec = build_augmented_qam(4);
    const auto code = ShapingCode::make(23, 3);
    Rng rng(2024);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<cplx> rx(code.z);
        for (auto& y : rx) {
            y = spec.inner[rng.below(4)] + cplx(rng.normal() * 1.2, rng.normal() * 1.2);
        }
        const auto dec = shaping_decode(rx, code, spec);
        CHECK(std::count(dec.codeword.begin(), dec.codeword.end(), 1) <= code.sparsity);
        CHECK(dec.index < 2048);
    }
}

TEST_CASE("high-SNR shaping bit recovery") {
    // 30 dB per-symbol SNR: the decode error rate over 1e5 blocks stays
    // below 1e-4.
    const auto spec = build_augmented_qam(4);
    const auto code = ShapingCode::make(15, 1);
    const double n0 = average_power(spec, outer_probability(code)) / 1000.0;
    Rng rng(5150);
    std::int64_t block_errors = 0;
    const int blocks = 100000;
    for (int b = 0; b < blocks; ++b) {
        std::vector<cplx> inner(code.z);
        for (auto& s : inner) s = spec.inner[rng.below(4)];
        const std::uint64_t idx = rng.next_u64() & 15u;
        auto blk = shaping_encode(inner, idx, code, spec);
        for (auto& s : blk.symbols) s += rng.cnormal(n0);
        const auto dec = shaping_decode(blk.symbols, code, spec);
        block_errors += dec.index != idx ? 1 : 0;
    }
    CHECK(static_cast<double>(block_errors) / blocks < 1e-4);
}

TEST_CASE("heuristic decoder stays close to the exhaustive ML baseline") {
    const auto spec = build_augmented_qam(4);
    const auto code = ShapingCode::make(15, 1);
    const double snr = std::pow(10.0, 10.0 / 10.0);
    const double n0 = average_power(spec, outer_probability(code)) / snr;
    Rng rng(31337);
    int heuristic_errors = 0, ml_errors = 0, disagreements = 0;
    const int blocks = 10000;
    for (int b = 0; b < blocks; ++b) {
        std::vector<cplx> inner(code.z);
        for (auto& s : inner) s = spec.inner[rng.below(4)];
        const std::uint64_t idx = rng.next_u64() & 15u;
        auto blk = shaping_encode(inner, idx, code, spec);
        for (auto& s : blk.symbols) s += rng.cnormal(n0);
        const auto dec = shaping_decode(blk.symbols, code, spec);
        const auto ml = oracle::ml_shaping_decode(blk.symbols, code, spec);
        heuristic_errors += dec.index != idx ? 1 : 0;
        ml_errors += codeword_to_index(ml.codeword, code) != idx ? 1 : 0;
        disagreements += dec.codeword != ml.codeword ? 1 : 0;
    }
    MESSAGE("heuristic block errors: ", heuristic_errors, ", ml: ", ml_errors,
            ", codeword disagreements: ", disagreements);
    CHECK(ml_errors > 0); // the oracle defines the baseline at this SNR
    CHECK(heuristic_errors <= static_cast<int>(1.5 * ml_errors) + 1);
}
