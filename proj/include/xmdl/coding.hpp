#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "xmdl/predict.hpp"

namespace xmdl {

// Real-valued codeword lengths over an ordered finite alphabet, for an output
// alphabet of `output_base` digits.
struct LengthFunction {
    std::vector<std::string> alphabet;
    std::vector<double> lengths;
    int output_base = 2;
};

// sum over symbols of base^(-length).
double kraft_sum(const LengthFunction& lf);

// Fixed-to-variable block code: every length-n input block maps to a digit
// string over the output alphabet.
struct PrefixCode {
    int block_length = 1;
    int output_base = 2;
    // block (concatenated source symbols) -> codeword digits '0'..'9'.
    std::vector<std::pair<std::string, std::string>> codebook;
};

// Constructive realization of real-valued lengths satisfying the Kraft
// inequality: block codeword lengths are ceil(sum of symbol lengths), with
// canonical assignment (sorted by length, lexicographically increasing).
// Per-symbol length deviates from the target average by at most 1/n.
// Throws KraftViolation when kraft_sum(lf) > 1 + 1e-12.
PrefixCode build_block_code(const LengthFunction& lf, int n);

// True iff no codeword is a prefix of another.
bool check_prefix_free(const PrefixCode& code);

// --- Bit-level plumbing ------------------------------------------------------

class BitStream {
public:
    void push(int bit);
    // Next bit; after the end, up to `grace` zero bits are supplied (the
    // decoder's register lookahead), then StreamUnderflow.
    int read();

    std::size_t bit_count() const { return nbits_; }
    std::size_t cursor() const { return cursor_; }
    void rewind() { cursor_ = 0; grace_used_ = 0; }
    void truncate(std::size_t nbits);

    const std::vector<std::uint8_t>& bytes() const { return data_; }
    static BitStream from_bytes(std::vector<std::uint8_t> data, std::size_t nbits);

private:
    static constexpr std::size_t kGrace = 32;
    std::vector<std::uint8_t> data_;
    std::size_t nbits_ = 0;
    std::size_t cursor_ = 0;
    std::size_t grace_used_ = 0;
};

// --- Arithmetic codec ----------------------------------------------------------
//
// 32-bit Witten-Neal-Cleary coder. Step probabilities come from a discrete
// prediction system and are quantized to 16-bit frequency counts with a floor
// of 1 count per supported symbol, so no symbol ever receives probability
// below 2^-16. Families with unbounded integer support use an escape symbol
// at cap 256; the excess is carried by a uniform-bit binary expansion routed
// through the coder.

struct EncodeStats {
    std::size_t bits = 0;          // physical payload bits
    double ideal_bits_exact = 0;   // -log2 Q(x^n|x^m) under the exact model
    double ideal_bits_quant = 0;   // same under the quantized step models
};

EncodeStats arithmetic_encode(const PredictionSystem& system, std::span<const double> xs,
                              std::int64_t m, BitStream& out);

// Inverse of arithmetic_encode given the same system, prefix and total count
// n. Returns the full sequence including the conditioning prefix. Throws
// StreamUnderflow on truncated input.
std::vector<double> arithmetic_decode(const PredictionSystem& system, BitStream& in,
                                      std::int64_t n, std::span<const double> prefix);

// Guaranteed codelength slack of the coder beyond the quantized ideal, in
// bits, for a payload of n_symbols steps.
double coder_slack_bits(std::int64_t n_symbols);

// --- Container ------------------------------------------------------------------
//
// 16-byte header (magic "XMDL", version, coder bits, family-id hash, m, n),
// the m conditioning symbols as 32-bit integers, the payload bit count and
// bytes, and a trailing CRC-32 over everything before it.

struct CodecBlob {
    std::uint16_t family_hash = 0;
    std::int64_t m = 0;
    std::int64_t n = 0;
    std::vector<double> prefix;
    BitStream payload;
};

std::vector<std::uint8_t> serialize_blob(const CodecBlob& blob);
CodecBlob deserialize_blob(std::span<const std::uint8_t> bytes);

void write_blob_file(const std::string& path, const CodecBlob& blob);
CodecBlob read_blob_file(const std::string& path);

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

}  // namespace xmdl
