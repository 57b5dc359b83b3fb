#include "gfqc/codec.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gfqc {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}
void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int s = 56; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
    std::uint8_t u8() { return take(1)[0]; }
    std::uint16_t u16() {
        auto b = take(2);
        return static_cast<std::uint16_t>((b[0] << 8) | b[1]);
    }
    std::uint32_t u32() {
        auto b = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = (v << 8) | b[static_cast<std::size_t>(i)];
        return v;
    }
    std::uint64_t u64() {
        auto b = take(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = (v << 8) | b[static_cast<std::size_t>(i)];
        return v;
    }
    std::span<const std::uint8_t> take(std::size_t n) {
        if (pos_ + n > bytes_.size()) throw std::runtime_error("compressed stream truncated");
        auto s = bytes_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> CompressedBlock::serialize() const {
    std::vector<std::uint8_t> out;
    out.reserve(kHeaderBytes + payload.size() + embedded_code.size());
    out.push_back('G');
    out.push_back('F');
    out.push_back('Q');
    out.push_back('C');
    out.push_back(version);
    out.push_back(p);
    put_u32(out, n_sym);
    put_u32(out, m_sym);
    put_u16(out, b);
    put_u64(out, seed);
    put_u16(out, poly);
    put_u16(out, pad_bits);
    out.push_back(flags);
    if (has_embedded_code()) {
        put_u32(out, static_cast<std::uint32_t>(embedded_code.size()));
        out.insert(out.end(), embedded_code.begin(), embedded_code.end());
    }
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

CompressedBlock CompressedBlock::deserialize(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    const auto magic = r.take(4);
    if (magic[0] != 'G' || magic[1] != 'F' || magic[2] != 'Q' || magic[3] != 'C')
        throw std::runtime_error("not a GFQC stream (bad magic)");
    CompressedBlock blk;
    blk.version = r.u8();
    if (blk.version != 1) throw std::runtime_error("unsupported stream version");
    blk.p = r.u8();
    if (blk.p < 1 || blk.p > 8) throw std::runtime_error("stream header: p out of range");
    blk.n_sym = r.u32();
    blk.m_sym = r.u32();
    blk.b = r.u16();
    blk.seed = r.u64();
    blk.poly = r.u16();
    blk.pad_bits = r.u16();
    blk.flags = r.u8();
    if (blk.poly != primitive_polynomial(blk.p))
        throw std::runtime_error("stream header: unknown primitive polynomial");
    if (blk.pad_bits >= blk.p) throw std::runtime_error("stream header: pad_bits out of range");
    if (blk.m_sym > blk.n_sym) throw std::runtime_error("stream header: m_sym exceeds n_sym");
    if (blk.has_embedded_code()) {
        const std::uint32_t len = r.u32();
        const auto text = r.take(len);
        blk.embedded_code.assign(text.begin(), text.end());
    }
    const std::size_t want_bytes = (blk.payload_bits() + 7) / 8;
    if (r.remaining() != want_bytes)
        throw std::runtime_error("corrupted payload length");
    const auto body = r.take(want_bytes);
    blk.payload.assign(body.begin(), body.end());
    // trailing bits of the last byte must be zero
    const std::size_t used = blk.payload_bits() % 8;
    if (used != 0 && !blk.payload.empty()) {
        const std::uint8_t mask = static_cast<std::uint8_t>(0xFF >> used);
        if (blk.payload.back() & mask)
            throw std::runtime_error("corrupted payload: nonzero padding bits");
    }
    return blk;
}

std::pair<std::vector<Symbol>, int> bits_to_symbols(std::span<const std::uint8_t> bits, int p) {
    if (p < 1 || p > 8) throw std::invalid_argument("p must be in [1,8]");
    const std::size_t n_sym = (bits.size() + static_cast<std::size_t>(p) - 1) / p;
    const int pad = static_cast<int>(n_sym * static_cast<std::size_t>(p) - bits.size());
    std::vector<Symbol> out(n_sym, 0);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        const std::size_t v = i / static_cast<std::size_t>(p);
        const int k = static_cast<int>(i % static_cast<std::size_t>(p));
        out[v] = static_cast<Symbol>(out[v] | ((bits[i] & 1u) << (p - 1 - k)));
    }
    return {std::move(out), pad};
}

std::vector<std::uint8_t> symbols_to_bits(std::span<const Symbol> symbols, int p) {
    std::vector<std::uint8_t> bits(symbols.size() * static_cast<std::size_t>(p));
    for (std::size_t v = 0; v < symbols.size(); ++v)
        for (int k = 0; k < p; ++k)
            bits[v * static_cast<std::size_t>(p) + static_cast<std::size_t>(k)] =
                static_cast<std::uint8_t>((symbols[v] >> (p - 1 - k)) & 1u);
    return bits;
}

std::vector<std::uint8_t> pack_bits(std::span<const std::uint8_t> bits) {
    std::vector<std::uint8_t> bytes((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i] & 1u) bytes[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
    return bytes;
}

std::vector<std::uint8_t> unpack_bits(std::span<const std::uint8_t> bytes, std::size_t n_bits) {
    if (bytes.size() * 8 < n_bits) throw std::runtime_error("bit buffer shorter than requested");
    std::vector<std::uint8_t> bits(n_bits);
    for (std::size_t i = 0; i < n_bits; ++i)
        bits[i] = (bytes[i / 8] >> (7 - i % 8)) & 1u;
    return bits;
}

Prior build_prior(std::span<const Symbol> source, double L, const FieldTables& tables) {
    if (L < 0.0) throw std::invalid_argument("prior strength L must be >= 0");
    Prior prior;
    prior.q = tables.q;
    prior.strength = L;
    const std::size_t qz = static_cast<std::size_t>(tables.q);
    prior.table.resize(source.size() * qz);
    for (std::size_t v = 0; v < source.size(); ++v) {
        auto row = prior.at(static_cast<std::uint32_t>(v));
        for (std::size_t a = 0; a < qz; ++a) {
            const int d = std::popcount(static_cast<unsigned>(a ^ source[v]));
            row[a] = std::exp(-L * d);
        }
        normalize(row);
    }
    return prior;
}

double distortion(std::span<const std::uint8_t> y, std::span<const std::uint8_t> y_hat) {
    if (y.size() != y_hat.size())
        throw std::invalid_argument("distortion requires equal-length vectors");
    if (y.empty()) return 0.0;
    std::size_t diff = 0;
    for (std::size_t i = 0; i < y.size(); ++i)
        if ((y[i] ^ y_hat[i]) & 1u) ++diff;
    return static_cast<double>(diff) / static_cast<double>(y.size());
}

EncodeOutcome encode(const SourceBlock& source, const SparseCode& code, const PeelOrder& order,
                     const FieldTables& tables, const EncodeParams& params) {
    if (!order.core_empty())
        throw std::invalid_argument(
            "encoding requires an empty core: reduce the code before use");
    auto [symbols, pad] = bits_to_symbols(source.bits, code.p);
    if (symbols.size() != code.n_sym)
        throw std::invalid_argument("source length does not match the code");

    EncodeOutcome out;
    out.block.p = static_cast<std::uint8_t>(code.p);
    out.block.n_sym = code.n_sym;
    out.block.m_sym = code.m_sym;
    out.block.b = code.b;
    out.block.seed = code.seed;
    out.block.poly = primitive_polynomial(code.p);
    out.block.pad_bits = static_cast<std::uint16_t>(pad);
    if (params.embed_code) {
        out.block.flags |= CompressedBlock::kFlagEmbeddedCode;
        std::ostringstream ss;
        write_code_file(code, ss);
        out.block.embedded_code = ss.str();
    }

    const Prior prior = build_prior(symbols, params.L, tables);
    Propagator prop(code, tables);
    const RbpResult rbp = prop.run_rbp(prior, params.rbp);
    out.iterations = rbp.iterations;
    out.trials = rbp.trials;

    if (rbp.status == RunStatus::Converged) {
        std::vector<std::uint8_t> info_bits;
        info_bits.reserve(order.payload_order.size() * static_cast<std::size_t>(code.p));
        for (std::uint32_t v : order.payload_order) {
            for (int k = 0; k < code.p; ++k)
                info_bits.push_back(
                    static_cast<std::uint8_t>((rbp.codeword[v] >> (code.p - 1 - k)) & 1u));
        }
        out.block.payload = pack_bits(info_bits);
        auto bits = symbols_to_bits(rbp.codeword, code.p);
        bits.resize(source.bits.size());
        out.achieved_distortion = distortion(source.bits, bits);
        out.reconstructed.bits = std::move(bits);
        out.reconstructed.distortion_vs = out.achieved_distortion;
    } else {
        out.fallback = true;
        out.block.flags |= CompressedBlock::kFlagFallback;
        out.block.payload = pack_bits(source.bits);
        out.achieved_distortion = 0.0;
        out.reconstructed.bits = source.bits;
        out.reconstructed.distortion_vs = 0.0;
    }
    return out;
}

ReconstructedBlock decode(const CompressedBlock& block, const SparseCode& code,
                          const PeelOrder& order, const FieldTables& tables) {
    if (block.p != code.p || block.n_sym != code.n_sym || block.m_sym != code.m_sym ||
        block.b != code.b || block.seed != code.seed ||
        block.poly != primitive_polynomial(code.p))
        throw std::runtime_error("stream header does not match the given code");

    ReconstructedBlock rec;
    if (block.fallback()) {
        rec.bits = unpack_bits(block.payload, block.source_bits());
        return rec;
    }
    if (!order.core_empty())
        throw std::runtime_error("cannot decode against a code with a nonempty core");
    if (order.info_set.size() != block.info_symbols())
        throw std::runtime_error("corrupted payload length");

    const auto info_bits = unpack_bits(block.payload, block.payload_bits());
    std::vector<Symbol> work(code.n_sym, 0);  // indexed by replay label
    for (std::size_t i = 0; i < order.payload_order.size(); ++i) {
        Symbol s = 0;
        for (int k = 0; k < code.p; ++k)
            s = static_cast<Symbol>((s << 1) |
                                    info_bits[i * static_cast<std::size_t>(code.p) +
                                              static_cast<std::size_t>(k)]);
        work[order.local_of_var[order.payload_order[i]]] = s;
    }

    // reverse peel replay: each step's pivot is the single unknown on its check
    for (std::size_t s = 0; s < order.replay_pivot.size(); ++s) {
        Symbol acc = 0;
        for (std::uint32_t i = order.replay_offset[s]; i < order.replay_offset[s + 1]; ++i)
            acc = FieldTables::add(acc, tables.mul(order.replay_coef[i], work[order.replay_var[i]]));
        // -acc == acc in characteristic 2
        work[order.replay_pivot[s]] = tables.mul(tables.inv(order.replay_pivot_coef[s]), acc);
    }

    std::vector<Symbol> word(code.n_sym);
    for (std::uint32_t v = 0; v < code.n_sym; ++v) word[v] = work[order.local_of_var[v]];
    auto bits = symbols_to_bits(word, code.p);
    bits.resize(block.source_bits());
    rec.bits = std::move(bits);
    return rec;
}

SparseCode code_for_block(const CompressedBlock& block) {
    if (block.has_embedded_code()) {
        std::istringstream ss(block.embedded_code);
        SparseCode code = read_code_file(ss);
        if (code.p != block.p || code.n_sym != block.n_sym || code.m_sym != block.m_sym)
            throw std::runtime_error("embedded code does not match the stream header");
        return code;
    }
    return make_code(block.p, block.n_sym, block.m_sym + block.b, block.b, block.seed);
}

}  // namespace gfqc
