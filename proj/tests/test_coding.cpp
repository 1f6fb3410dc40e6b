#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "xmdl/coding.hpp"
#include "xmdl/errors.hpp"
#include "xmdl/jeffreys.hpp"

using namespace xmdl;

TEST_CASE("kraft sums") {
    CHECK(kraft_sum({{"a", "b"}, {1.0, 1.0}, 2}) == doctest::Approx(1.0));
    CHECK(kraft_sum({{"a", "b"}, {-std::log2(0.7), -std::log2(0.3)}, 2}) == doctest::Approx(1.0));
    CHECK(kraft_sum({{"a", "b", "c"}, {1.0, 2.0, 3.0}, 2}) == doctest::Approx(0.875));
}

TEST_CASE("complete binary code at block length 1") {
    PrefixCode code = build_block_code({{"a", "b"}, {1.0, 1.0}, 2}, 1);
    REQUIRE(code.codebook.size() == 2);
    CHECK(code.codebook[0].second == "0");
    CHECK(code.codebook[1].second == "1");
    CHECK(check_prefix_free(code));
}

TEST_CASE("fractional lengths round up at the block level") {
    PrefixCode code = build_block_code({{"a", "b"}, {1.5, 1.5}, 2}, 2);
    REQUIRE(code.codebook.size() == 4);
    for (const auto& [block, word] : code.codebook) CHECK(word.size() == 3);
    CHECK(check_prefix_free(code));
}

TEST_CASE("infeasible lengths are rejected") {
    CHECK_THROWS_AS(build_block_code({{"a", "b", "c"}, {1.0, 1.0, 1.0}, 2}, 1), KraftViolation);
}

TEST_CASE("prefix-freeness checks") {
    PrefixCode good{1, 2, {{"a", "0"}, {"b", "10"}, {"c", "11"}}};
    CHECK(check_prefix_free(good));
    PrefixCode bad{1, 2, {{"a", "0"}, {"b", "01"}}};
    CHECK_FALSE(check_prefix_free(bad));
}

TEST_CASE("random feasible length functions always realize") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> ud(0.3, 4.0);
    for (int trial = 0; trial < 40; ++trial) {
        int a = 2 + static_cast<int>(gen() % 3);
        int n = 1 + static_cast<int>(gen() % 5);
        LengthFunction lf;
        lf.output_base = 2 + static_cast<int>(gen() % 2);
        for (int i = 0; i < a; ++i) {
            lf.alphabet.push_back(std::string(1, static_cast<char>('a' + i)));
            lf.lengths.push_back(ud(gen));
        }
        double ks = kraft_sum(lf);
        if (ks > 1.0)
            for (double& l : lf.lengths)
                l += std::log(ks) / std::log(static_cast<double>(lf.output_base)) + 1e-9;
        PrefixCode code = build_block_code(lf, n);
        CHECK(check_prefix_free(code));
        for (const auto& [block, word] : code.codebook) {
            double target = 0.0;
            for (char ch : block) target += lf.lengths[static_cast<std::size_t>(ch - 'a')];
            CHECK(std::abs(static_cast<double>(word.size()) - target) <= 1.0 + 1e-9);
        }
        // Converse sanity: realized integer lengths satisfy the inequality.
        double block_kraft = 0.0;
        for (const auto& [block, word] : code.codebook)
            block_kraft += std::pow(static_cast<double>(lf.output_base),
                                    -static_cast<double>(word.size()));
        CHECK(block_kraft <= 1.0 + 1e-9);
    }
}

TEST_CASE("bit stream basics") {
    BitStream s;
    for (int b : {1, 0, 1, 1, 0, 0, 0, 1, 1}) s.push(b);
    CHECK(s.bit_count() == 9);
    for (int want : {1, 0, 1, 1, 0, 0, 0, 1, 1}) CHECK(s.read() == want);
    for (int i = 0; i < 32; ++i) CHECK(s.read() == 0);  // register grace
    CHECK_THROWS_AS(s.read(), StreamUnderflow);
}

TEST_CASE("codec round trip under the jeffreys predictor") {
    ExpFamily1D f = make_family("bernoulli");
    BayesMixture sys(f, jeffreys_prior(f));
    std::mt19937_64 gen(99);
    for (int trial = 0; trial < 25; ++trial) {
        std::int64_t n = 1 + static_cast<std::int64_t>(gen() % 400);
        std::vector<double> xs;
        for (std::int64_t i = 0; i < n; ++i) xs.push_back(static_cast<double>(gen() & 1));
        BitStream bits;
        EncodeStats st = arithmetic_encode(sys, xs, 0, bits);
        CHECK(static_cast<double>(st.bits) <= st.ideal_bits_quant + coder_slack_bits(n));
        CHECK(st.ideal_bits_quant == doctest::Approx(st.ideal_bits_exact).epsilon(0.01));
        CHECK(arithmetic_decode(sys, bits, n, {}) == xs);
    }
}

TEST_CASE("round trip with a conditioning prefix") {
    ExpFamily1D f = make_family("bernoulli");
    BayesMixture sys(f, jeffreys_prior(f));
    std::vector<double> xs = {1, 1, 0, 1, 0, 0, 1, 1, 1, 0, 1, 0};
    BitStream bits;
    arithmetic_encode(sys, xs, 3, bits);
    std::vector<double> prefix(xs.begin(), xs.begin() + 3);
    CHECK(arithmetic_decode(sys, bits, 12, prefix) == xs);
}

TEST_CASE("empty payload costs only termination bits") {
    ExpFamily1D f = make_family("bernoulli");
    BayesMixture sys(f, jeffreys_prior(f));
    BitStream bits;
    EncodeStats st = arithmetic_encode(sys, {}, 0, bits);
    CHECK(st.bits <= 2);
    CHECK(arithmetic_decode(sys, bits, 0, {}).empty());
}

TEST_CASE("single fair symbol fits in a few bits") {
    ExpFamily1D f = make_family("bernoulli");
    BayesMixture sys(f, jeffreys_prior(f));
    for (double x : {0.0, 1.0}) {
        BitStream bits;
        std::vector<double> xs = {x};
        EncodeStats st = arithmetic_encode(sys, xs, 0, bits);
        CHECK(st.bits >= 1);
        CHECK(st.bits <= 3);
        CHECK(arithmetic_decode(sys, bits, 1, {}) == xs);
    }
}

TEST_CASE("truncated streams fail loudly") {
    ExpFamily1D f = make_family("bernoulli");
    BayesMixture sys(f, jeffreys_prior(f));
    std::mt19937_64 gen(123);
    std::vector<double> xs;
    for (int i = 0; i < 4096; ++i) xs.push_back(static_cast<double>(gen() & 1));
    BitStream bits;
    arithmetic_encode(sys, xs, 0, bits);
    bits.truncate(bits.bit_count() / 2);
    CHECK_THROWS_AS(arithmetic_decode(sys, bits, 4096, {}), StreamUnderflow);
}

TEST_CASE("escape path codes unbounded integer symbols") {
    ExpFamily1D f = make_family("poisson");
    PluginSystem sys(f);  // mixture normalizers are not needed for this check
    std::vector<double> xs = {0, 3, 1, 300, 2, 1000, 5};
    BitStream bits;
    arithmetic_encode(sys, xs, 0, bits);
    CHECK(arithmetic_decode(sys, bits, static_cast<std::int64_t>(xs.size()), {}) == xs);
}

TEST_CASE("container serialization round trip and corruption detection") {
    CodecBlob blob;
    blob.family_hash = family_hash("bernoulli");
    blob.m = 2;
    blob.n = 5;
    blob.prefix = {1.0, 0.0};
    for (int b : {1, 0, 1, 1, 0, 1, 0}) blob.payload.push(b);
    std::vector<std::uint8_t> bytes = serialize_blob(blob);
    CodecBlob back = deserialize_blob(bytes);
    CHECK(back.family_hash == blob.family_hash);
    CHECK(back.m == 2);
    CHECK(back.n == 5);
    CHECK(back.prefix == blob.prefix);
    CHECK(back.payload.bit_count() == 7);
    bytes[20] ^= 0x40;
    CHECK_THROWS_AS(deserialize_blob(bytes), StreamUnderflow);
    std::vector<std::uint8_t> cut(bytes.begin(), bytes.begin() + 10);
    CHECK_THROWS_AS(deserialize_blob(cut), StreamUnderflow);
}
