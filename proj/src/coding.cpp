#include "xmdl/coding.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <numeric>
#include <fstream>

#include "xmdl/errors.hpp"

namespace xmdl {

// --- Kraft / block codes -------------------------------------------------------

double kraft_sum(const LengthFunction& lf) {
    if (lf.output_base < 2) throw ConfigError("output base must be at least 2");
    if (lf.alphabet.size() != lf.lengths.size())
        throw ConfigError("alphabet/lengths size mismatch");
    double s = 0.0;
    for (double l : lf.lengths) {
        if (!(l >= 0.0) || !std::isfinite(l)) throw ConfigError("lengths must be finite and >= 0");
        s += std::pow(static_cast<double>(lf.output_base), -l);
    }
    return s;
}

PrefixCode build_block_code(const LengthFunction& lf, int n) {
    if (n < 1) throw ConfigError("block length must be at least 1");
    if (kraft_sum(lf) > 1.0 + 1e-12) throw KraftViolation("kraft_sum exceeds 1");
    const int a = static_cast<int>(lf.alphabet.size());
    const int base = lf.output_base;

    struct Block {
        std::string text;
        int len;
    };
    std::vector<Block> blocks;
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    for (;;) {
        std::string text;
        double total = 0.0;
        for (int i : idx) {
            text += lf.alphabet[static_cast<std::size_t>(i)];
            total += lf.lengths[static_cast<std::size_t>(i)];
        }
        blocks.push_back({std::move(text), static_cast<int>(std::ceil(total - 1e-9))});
        int pos = n - 1;
        while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] == a)
            idx[static_cast<std::size_t>(pos--)] = 0;
        if (pos < 0) break;
    }

    std::stable_sort(blocks.begin(), blocks.end(),
                     [](const Block& l, const Block& r) { return l.len < r.len; });

    PrefixCode code;
    code.block_length = n;
    code.output_base = base;
    code.codebook.reserve(blocks.size());
    std::vector<int> word;
    bool first = true;
    for (const Block& b : blocks) {
        if (first) {
            word.assign(static_cast<std::size_t>(b.len), 0);
            first = false;
        } else {
            int i = static_cast<int>(word.size()) - 1;
            for (;;) {
                if (i < 0) throw KraftViolation("canonical codeword space exhausted");
                if (++word[static_cast<std::size_t>(i)] < base) break;
                word[static_cast<std::size_t>(i--)] = 0;
            }
            word.resize(static_cast<std::size_t>(b.len), 0);
        }
        std::string digits;
        for (int d : word) digits += static_cast<char>('0' + d);
        code.codebook.emplace_back(b.text, std::move(digits));
    }
    return code;
}

bool check_prefix_free(const PrefixCode& code) {
    std::vector<std::string> words;
    words.reserve(code.codebook.size());
    for (const auto& [block, word] : code.codebook) words.push_back(word);
    std::sort(words.begin(), words.end());
    // After lexicographic sort a prefix relation must appear between neighbors.
    for (std::size_t i = 0; i + 1 < words.size(); ++i)
        if (words[i + 1].compare(0, words[i].size(), words[i]) == 0) return false;
    return true;
}

// --- BitStream -------------------------------------------------------------------

void BitStream::push(int bit) {
    if (nbits_ % 8 == 0) data_.push_back(0);
    if (bit) data_.back() |= static_cast<std::uint8_t>(1u << (7 - nbits_ % 8));
    ++nbits_;
}

int BitStream::read() {
    if (cursor_ < nbits_) {
        int bit = (data_[cursor_ / 8] >> (7 - cursor_ % 8)) & 1;
        ++cursor_;
        return bit;
    }
    if (grace_used_ < kGrace) {
        ++grace_used_;
        return 0;
    }
    throw StreamUnderflow("bit stream exhausted");
}

void BitStream::truncate(std::size_t nbits) {
    if (nbits > nbits_) throw DomainError("truncate beyond stream length");
    nbits_ = nbits;
    data_.resize((nbits + 7) / 8);
    cursor_ = std::min(cursor_, nbits_);
}

BitStream BitStream::from_bytes(std::vector<std::uint8_t> data, std::size_t nbits) {
    if (nbits > data.size() * 8) throw StreamUnderflow("declared bit count exceeds payload");
    BitStream s;
    s.data_ = std::move(data);
    s.nbits_ = nbits;
    return s;
}

// --- Arithmetic codec ---------------------------------------------------------------

namespace {

constexpr std::uint64_t kTop = 0xFFFFFFFFull;
constexpr std::uint64_t kHalf = 0x80000000ull;
constexpr std::uint64_t kQtr = 0x40000000ull;
constexpr std::uint64_t k3Qtr = 0xC0000000ull;
constexpr std::uint32_t kTotal = 1u << 16;
constexpr std::int64_t kEscapeCap = 256;  // visible integer symbols before escape

class WncEncoder {
public:
    explicit WncEncoder(BitStream& out) : out_(out) {}

    void encode(std::uint32_t lo, std::uint32_t hi, std::uint32_t total) {
        std::uint64_t range = high_ - low_ + 1;
        high_ = low_ + range * hi / total - 1;
        low_ = low_ + range * lo / total;
        for (;;) {
            if (high_ < kHalf) {
                emit(0);
            } else if (low_ >= kHalf) {
                emit(1);
                low_ -= kHalf;
                high_ -= kHalf;
            } else if (low_ >= kQtr && high_ < k3Qtr) {
                ++pending_;
                low_ -= kQtr;
                high_ -= kQtr;
            } else {
                break;
            }
            low_ <<= 1;
            high_ = (high_ << 1) | 1;
        }
    }

    void finish() {
        ++pending_;
        emit(low_ < kQtr ? 0 : 1);
    }

private:
    void emit(int b) {
        out_.push(b);
        for (; pending_ > 0; --pending_) out_.push(!b);
    }

    BitStream& out_;
    std::uint64_t low_ = 0, high_ = kTop;
    std::int64_t pending_ = 0;
};

class WncDecoder {
public:
    explicit WncDecoder(BitStream& in) : in_(in) {
        for (int i = 0; i < 32; ++i) value_ = (value_ << 1) | static_cast<std::uint64_t>(in_.read());
    }

    std::uint32_t target(std::uint32_t total) const {
        std::uint64_t range = high_ - low_ + 1;
        return static_cast<std::uint32_t>(((value_ - low_ + 1) * total - 1) / range);
    }

    void consume(std::uint32_t lo, std::uint32_t hi, std::uint32_t total) {
        std::uint64_t range = high_ - low_ + 1;
        high_ = low_ + range * hi / total - 1;
        low_ = low_ + range * lo / total;
        for (;;) {
            if (high_ < kHalf) {
            } else if (low_ >= kHalf) {
                low_ -= kHalf;
                high_ -= kHalf;
                value_ -= kHalf;
            } else if (low_ >= kQtr && high_ < k3Qtr) {
                low_ -= kQtr;
                high_ -= kQtr;
                value_ -= kQtr;
            } else {
                break;
            }
            low_ <<= 1;
            high_ = (high_ << 1) | 1;
            value_ = (value_ << 1) | static_cast<std::uint64_t>(in_.read());
        }
    }

private:
    BitStream& in_;
    std::uint64_t low_ = 0, high_ = kTop, value_ = 0;
};

// Per-step quantized model: cumulative 16-bit counts over the visible slots
// (binary symbols, or 0..cap-1 plus a trailing escape slot).
struct StepModel {
    std::vector<std::uint32_t> cum;  // size slots+1, back() == kTotal
    bool has_escape = false;

    std::uint32_t count(std::size_t slot) const { return cum[slot + 1] - cum[slot]; }
};

std::vector<std::uint32_t> quantize_counts(const std::vector<double>& p) {
    const std::size_t k = p.size();
    std::vector<std::uint32_t> c(k);
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < k; ++i) {
        c[i] = std::max<std::uint32_t>(
            1, static_cast<std::uint32_t>(std::llround(p[i] * static_cast<double>(kTotal))));
        sum += c[i];
    }
    std::int64_t diff = static_cast<std::int64_t>(kTotal) - sum;
    while (diff != 0) {
        std::size_t hi = static_cast<std::size_t>(
            std::max_element(c.begin(), c.end()) - c.begin());
        std::int64_t step = diff > 0 ? diff : std::max<std::int64_t>(diff, 1 - static_cast<std::int64_t>(c[hi]));
        c[hi] = static_cast<std::uint32_t>(static_cast<std::int64_t>(c[hi]) + step);
        diff -= step;
    }
    return c;
}

StepModel build_step_model(const PredictionSystem& system, std::int64_t m, double xbar) {
    const ExpFamily1D& f = system.family();
    StepModel model;
    std::vector<double> p;
    if (f.binary_support) {
        p = {std::exp(system.predict_log(m, xbar, 0.0)), std::exp(system.predict_log(m, xbar, 1.0))};
    } else if (f.nonneg_int_support) {
        model.has_escape = true;
        double mass = 0.0;
        p.reserve(static_cast<std::size_t>(kEscapeCap) + 1);
        for (std::int64_t x = 0; x < kEscapeCap; ++x) {
            double q = std::exp(system.predict_log(m, xbar, static_cast<double>(x)));
            p.push_back(q);
            mass += q;
        }
        p.push_back(std::max(1.0 - mass, 1e-12));
    } else {
        throw ConfigError("arithmetic codec requires a discrete family");
    }
    std::vector<std::uint32_t> c = quantize_counts(p);
    model.cum.assign(c.size() + 1, 0);
    for (std::size_t i = 0; i < c.size(); ++i) model.cum[i + 1] = model.cum[i] + c[i];
    return model;
}

// Elias-gamma of v+1, routed through the coder as uniform bits.
template <typename EmitBit>
void gamma_encode(std::int64_t v, EmitBit&& emit) {
    std::uint64_t n = static_cast<std::uint64_t>(v) + 1;
    int width = 0;
    while ((n >> (width + 1)) != 0) ++width;
    for (int i = 0; i < width; ++i) emit(0);
    for (int i = width; i >= 0; --i) emit(static_cast<int>((n >> i) & 1));
}

template <typename ReadBit>
std::int64_t gamma_decode(ReadBit&& read) {
    int width = 0;
    while (read() == 0) ++width;
    std::uint64_t n = 1;
    for (int i = 0; i < width; ++i) n = (n << 1) | static_cast<std::uint64_t>(read());
    return static_cast<std::int64_t>(n) - 1;
}

}  // namespace

EncodeStats arithmetic_encode(const PredictionSystem& system, std::span<const double> xs,
                              std::int64_t m, BitStream& out) {
    const std::int64_t n = static_cast<std::int64_t>(xs.size());
    if (m < 0 || m > n) throw DomainError("arithmetic_encode: m out of range");
    EncodeStats stats;
    WncEncoder enc(out);
    const double ln2 = std::log(2.0);
    double sum = 0.0;
    for (std::int64_t i = 0; i < m; ++i) sum += xs[i];
    for (std::int64_t i = m; i < n; ++i) {
        double xbar = i > 0 ? sum / static_cast<double>(i) : 0.0;
        StepModel model = build_step_model(system, i, xbar);
        double x = xs[static_cast<std::size_t>(i)];
        std::int64_t xi = std::llround(x);
        if (xi < 0) throw DomainError("codec symbols must be nonnegative integers");
        std::size_t slot = static_cast<std::size_t>(xi);
        bool escaped = model.has_escape && xi >= kEscapeCap;
        if (escaped) slot = static_cast<std::size_t>(kEscapeCap);
        enc.encode(model.cum[slot], model.cum[slot + 1], kTotal);
        stats.ideal_bits_quant +=
            std::log2(static_cast<double>(kTotal) / static_cast<double>(model.count(slot)));
        stats.ideal_bits_exact += -system.predict_log(i, xbar, x) / ln2;
        if (escaped) {
            gamma_encode(xi - kEscapeCap, [&](int b) {
                enc.encode(b ? kTotal / 2 : 0, b ? kTotal : kTotal / 2, kTotal);
                stats.ideal_bits_quant += 1.0;
            });
        }
        sum += x;
    }
    enc.finish();
    stats.bits = out.bit_count();
    return stats;
}

std::vector<double> arithmetic_decode(const PredictionSystem& system, BitStream& in,
                                      std::int64_t n, std::span<const double> prefix) {
    const std::int64_t m = static_cast<std::int64_t>(prefix.size());
    if (m > n) throw DomainError("arithmetic_decode: prefix longer than n");
    std::vector<double> xs(prefix.begin(), prefix.end());
    xs.reserve(static_cast<std::size_t>(n));
    WncDecoder dec(in);
    double sum = std::accumulate(prefix.begin(), prefix.end(), 0.0);
    for (std::int64_t i = m; i < n; ++i) {
        double xbar = i > 0 ? sum / static_cast<double>(i) : 0.0;
        StepModel model = build_step_model(system, i, xbar);
        std::uint32_t t = dec.target(kTotal);
        std::size_t slot = static_cast<std::size_t>(
            std::upper_bound(model.cum.begin(), model.cum.end(), t) - model.cum.begin() - 1);
        dec.consume(model.cum[slot], model.cum[slot + 1], kTotal);
        std::int64_t xi = static_cast<std::int64_t>(slot);
        if (model.has_escape && xi == kEscapeCap) {
            xi = kEscapeCap + gamma_decode([&]() {
                     std::uint32_t tb = dec.target(kTotal);
                     int b = tb >= kTotal / 2 ? 1 : 0;
                     dec.consume(b ? kTotal / 2 : 0, b ? kTotal : kTotal / 2, kTotal);
                     return b;
                 });
        }
        xs.push_back(static_cast<double>(xi));
        sum += static_cast<double>(xi);
    }
    return xs;
}

double coder_slack_bits(std::int64_t n_symbols) {
    // Two termination bits plus interval-truncation loss; the per-symbol term
    // assumes step probabilities well above the 2^-16 quantization floor.
    return 2.0 + static_cast<double>(n_symbols) * std::pow(2.0, -28);
}

// --- Container ------------------------------------------------------------------------

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
    static const std::array<std::uint32_t, 256> table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t c = 0xFFFFFFFFu;
    for (std::uint8_t b : bytes) c = table[(c ^ b) & 0xFFu] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

namespace {

void put_u16(std::vector<std::uint8_t>& v, std::uint16_t x) {
    v.push_back(static_cast<std::uint8_t>(x & 0xFF));
    v.push_back(static_cast<std::uint8_t>(x >> 8));
}

void put_u32(std::vector<std::uint8_t>& v, std::uint32_t x) {
    for (int i = 0; i < 4; ++i) v.push_back(static_cast<std::uint8_t>((x >> (8 * i)) & 0xFF));
}

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t at) {
    return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
    std::uint32_t x = 0;
    for (int i = 0; i < 4; ++i) x |= static_cast<std::uint32_t>(b[at + static_cast<std::size_t>(i)]) << (8 * i);
    return x;
}

}  // namespace

std::vector<std::uint8_t> serialize_blob(const CodecBlob& blob) {
    std::vector<std::uint8_t> out;
    out.insert(out.end(), {'X', 'M', 'D', 'L'});
    out.push_back(1);   // version
    out.push_back(32);  // coder register width
    put_u16(out, blob.family_hash);
    put_u32(out, static_cast<std::uint32_t>(blob.m));
    put_u32(out, static_cast<std::uint32_t>(blob.n));
    for (double x : blob.prefix) put_u32(out, static_cast<std::uint32_t>(std::llround(x)));
    put_u32(out, static_cast<std::uint32_t>(blob.payload.bit_count()));
    const auto& bytes = blob.payload.bytes();
    out.insert(out.end(), bytes.begin(), bytes.end());
    put_u32(out, crc32(out));
    return out;
}

CodecBlob deserialize_blob(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 24) throw StreamUnderflow("container shorter than its fixed fields");
    if (std::memcmp(bytes.data(), "XMDL", 4) != 0) throw ConfigError("bad container magic");
    if (bytes[4] != 1) throw ConfigError("unsupported container version");
    if (bytes[5] != 32) throw ConfigError("unsupported coder register width");
    std::uint32_t stored = get_u32(bytes, bytes.size() - 4);
    if (crc32(bytes.first(bytes.size() - 4)) != stored)
        throw StreamUnderflow("container checksum mismatch");
    CodecBlob blob;
    blob.family_hash = get_u16(bytes, 6);
    blob.m = get_u32(bytes, 8);
    blob.n = get_u32(bytes, 12);
    std::size_t at = 16;
    if (bytes.size() < at + 4 * static_cast<std::size_t>(blob.m) + 8)
        throw StreamUnderflow("container shorter than its declared prefix");
    for (std::int64_t i = 0; i < blob.m; ++i, at += 4)
        blob.prefix.push_back(static_cast<double>(get_u32(bytes, at)));
    std::uint32_t nbits = get_u32(bytes, at);
    at += 4;
    std::size_t payload_bytes = (static_cast<std::size_t>(nbits) + 7) / 8;
    if (bytes.size() < at + payload_bytes + 4)
        throw StreamUnderflow("container shorter than its declared payload");
    blob.payload = BitStream::from_bytes(
        std::vector<std::uint8_t>(bytes.begin() + static_cast<std::ptrdiff_t>(at),
                                  bytes.begin() + static_cast<std::ptrdiff_t>(at + payload_bytes)),
        nbits);
    return blob;
}

void write_blob_file(const std::string& path, const CodecBlob& blob) {
    std::vector<std::uint8_t> bytes = serialize_blob(blob);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open '" + path + "' for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

CodecBlob read_blob_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open '" + path + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    return deserialize_blob(bytes);
}

}  // namespace xmdl
