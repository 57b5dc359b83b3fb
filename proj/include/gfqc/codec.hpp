#ifndef GFQC_CODEC_HPP
#define GFQC_CODEC_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gfqc/code.hpp"
#include "gfqc/msgpass.hpp"
#include "gfqc/peeling.hpp"

namespace gfqc {

/// A source realization: one bit per entry, values 0/1.
struct SourceBlock {
    std::vector<std::uint8_t> bits;
};

struct ReconstructedBlock {
    std::vector<std::uint8_t> bits;
    std::optional<double> distortion_vs;
};

/// Self-describing compressed stream. Fixed 29-byte header, big-endian:
///   magic "GFQC" | u8 version | u8 p | u32 n_sym | u32 m_sym | u16 b |
///   u64 seed | u16 poly | u16 pad_bits | u8 flags
/// flags bit0 = fallback (payload is the raw source), bit1 = embedded
/// matrix (u32 length + code file text precede the payload). Payload bits
/// are packed MSB-first.
struct CompressedBlock {
    static constexpr std::uint8_t kFlagFallback = 0x01;
    static constexpr std::uint8_t kFlagEmbeddedCode = 0x02;
    static constexpr std::size_t kHeaderBytes = 29;

    std::uint8_t version = 1;
    std::uint8_t p = 0;
    std::uint32_t n_sym = 0;
    std::uint32_t m_sym = 0;
    std::uint16_t b = 0;
    std::uint64_t seed = 0;
    std::uint16_t poly = 0;
    std::uint16_t pad_bits = 0;
    std::uint8_t flags = 0;
    std::string embedded_code;           ///< code file text when bit1 set
    std::vector<std::uint8_t> payload;   ///< packed bits

    bool fallback() const { return flags & kFlagFallback; }
    bool has_embedded_code() const { return flags & kFlagEmbeddedCode; }
    std::size_t source_bits() const {
        return static_cast<std::size_t>(n_sym) * p - pad_bits;
    }
    std::size_t info_symbols() const { return n_sym - m_sym; }
    std::size_t payload_bits() const {
        return fallback() ? source_bits() : info_symbols() * p;
    }
    /// Stream rate in payload bits per source bit (header excluded).
    double rate() const {
        return static_cast<double>(payload_bits()) / static_cast<double>(source_bits());
    }

    std::vector<std::uint8_t> serialize() const;
    static CompressedBlock deserialize(std::span<const std::uint8_t> bytes);
};

/// Groups consecutive p bits big-endian into one symbol, zero-padding the
/// tail; returns the symbols and the pad length.
std::pair<std::vector<Symbol>, int> bits_to_symbols(std::span<const std::uint8_t> bits, int p);
std::vector<std::uint8_t> symbols_to_bits(std::span<const Symbol> symbols, int p);

/// Bit packing for stream payloads and file I/O, MSB-first.
std::vector<std::uint8_t> pack_bits(std::span<const std::uint8_t> bits);
std::vector<std::uint8_t> unpack_bits(std::span<const std::uint8_t> bytes, std::size_t n_bits);

/// mu1_v(a) = exp(-L * popcount(a XOR y_v)), normalized per variable.
Prior build_prior(std::span<const Symbol> source, double L, const FieldTables& tables);

/// Normalized Hamming distortion between equal-length bit vectors.
double distortion(std::span<const std::uint8_t> y, std::span<const std::uint8_t> y_hat);

struct EncodeParams {
    double L = 1.5;
    RbpParams rbp;
    bool embed_code = false;
};

struct EncodeOutcome {
    CompressedBlock block;
    ReconstructedBlock reconstructed;
    double achieved_distortion = 0.0;
    int iterations = 0;
    int trials = 0;
    bool fallback = false;
};

/// Compresses one block: RBP search for a nearby codeword, then the
/// information symbols in peel order become the payload. On search failure
/// the block degrades to a raw passthrough (fallback flag), so encoding is
/// total. Requires an empty core.
EncodeOutcome encode(const SourceBlock& source, const SparseCode& code, const PeelOrder& order,
                     const FieldTables& tables, const EncodeParams& params);

/// Rebuilds the codeword by replaying the peel order backwards: each step
/// solves its pivot from the one check it closed, O(n) total. Fallback
/// blocks pass through verbatim.
ReconstructedBlock decode(const CompressedBlock& block, const SparseCode& code,
                          const PeelOrder& order, const FieldTables& tables);

/// The code a block refers to: embedded text if present, else regenerated
/// from the header tuple.
SparseCode code_for_block(const CompressedBlock& block);

}  // namespace gfqc

#endif
