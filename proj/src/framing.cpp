#include "nharq/framing.hpp"

#include <array>

namespace nharq {

namespace {

std::array<std::uint32_t, 256> make_crc_table() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t n = 0; n < 256; ++n) {
        std::uint32_t c = n;
        for (int k = 0; k < 8; ++k) {
            c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
        }
        table[n] = c;
    }
    return table;
}

void push_bits(BitVec& out, std::uint32_t value, std::size_t nbits) {
    for (std::size_t i = 0; i < nbits; ++i) {
        out.push_back(static_cast<std::uint8_t>((value >> (nbits - 1 - i)) & 1));
    }
}

std::uint32_t read_bits(const BitVec& bits, std::size_t pos, std::size_t nbits) {
    std::uint32_t value = 0;
    for (std::size_t i = 0; i < nbits; ++i) {
        value = (value << 1) | bits[pos + i];
    }
    return value;
}

ByteVec bits_to_bytes(const BitVec& bits, std::size_t pos, std::size_t nbytes) {
    ByteVec out(nbytes, 0);
    for (std::size_t i = 0; i < nbytes; ++i) {
        out[i] = static_cast<std::uint8_t>(read_bits(bits, pos + 8 * i, 8));
    }
    return out;
}

}  // namespace

std::uint32_t crc32(const ByteVec& data) {
    static const auto table = make_crc_table();
    std::uint32_t c = 0xFFFFFFFFu;
    for (std::uint8_t b : data) {
        c = table[(c ^ b) & 0xFF] ^ (c >> 8);
    }
    return c ^ 0xFFFFFFFFu;
}

BitVec whiten(const BitVec& bits) {
    BitVec out;
    out.reserve(bits.size());
    std::uint16_t state = 0x1FF;
    for (std::uint8_t b : bits) {
        const std::uint8_t pn = state & 1;
        const std::uint8_t fb = (state & 1) ^ ((state >> 5) & 1);
        state = static_cast<std::uint16_t>((state >> 1) | (fb << 8));
        out.push_back(b ^ pn);
    }
    return out;
}

BitVec fec_encode(const BitVec& bits, FecScheme scheme) {
    if (scheme == FecScheme::Identity) {
        return bits;
    }
    BitVec out;
    out.reserve(bits.size() * 3);
    for (std::uint8_t b : bits) {
        out.push_back(b);
        out.push_back(b);
        out.push_back(b);
    }
    return out;
}

BitVec fec_decode(const BitVec& bits, FecScheme scheme) {
    if (scheme == FecScheme::Identity) {
        return bits;
    }
    if (bits.size() % 3 != 0) {
        throw std::invalid_argument("fec_decode: length not divisible by 3");
    }
    BitVec out;
    out.reserve(bits.size() / 3);
    for (std::size_t i = 0; i < bits.size(); i += 3) {
        out.push_back((bits[i] + bits[i + 1] + bits[i + 2]) >= 2 ? 1 : 0);
    }
    return out;
}

double fec_rate(FecScheme scheme) {
    return scheme == FecScheme::Repetition3 ? 1.0 / 3.0 : 1.0;
}

void FrameConfig::validate() const {
    if (payload_bits == 0 || payload_bits % 8 != 0) {
        throw std::invalid_argument("FrameConfig: payload_bits must be a positive multiple of 8");
    }
    if (encoded_bits() % 2 != 0) {
        throw std::invalid_argument("FrameConfig: encoded frame length must be even for QPSK");
    }
}

Frame build_frame(const ByteVec& payload, const FrameConfig& cfg,
                  std::uint16_t seq, std::uint8_t round_index) {
    cfg.validate();
    if (payload.size() != cfg.payload_bytes()) {
        throw std::invalid_argument("build_frame: payload length mismatch");
    }

    // CRC covers seq || round_index || payload.
    ByteVec crc_input;
    crc_input.reserve(3 + payload.size());
    crc_input.push_back(static_cast<std::uint8_t>(seq >> 8));
    crc_input.push_back(static_cast<std::uint8_t>(seq & 0xFF));
    crc_input.push_back(round_index);
    crc_input.insert(crc_input.end(), payload.begin(), payload.end());
    const std::uint32_t crc = crc32(crc_input);

    BitVec bits;
    bits.reserve(cfg.frame_bits());
    push_bits(bits, FrameConfig::kSyncWord, FrameConfig::kSyncBits);
    push_bits(bits, seq, FrameConfig::kSeqBits);
    push_bits(bits, round_index, FrameConfig::kRoundBits);
    for (std::uint8_t byte : payload) {
        push_bits(bits, byte, 8);
    }
    push_bits(bits, crc, FrameConfig::kCrcBits);
    push_bits(bits, 0x00, FrameConfig::kTailBits);

    Frame frame;
    frame.seq = seq;
    frame.payload = payload;
    frame.encoded_bits = fec_encode(whiten(bits), cfg.fec);
    return frame;
}

ParseResult parse_frame(const BitVec& bits, const FrameConfig& cfg) {
    cfg.validate();
    if (bits.size() != cfg.encoded_bits()) {
        throw std::invalid_argument("parse_frame: input length mismatch");
    }
    const BitVec frame = whiten(fec_decode(bits, cfg.fec));

    ParseResult result;
    std::size_t pos = 0;
    const std::uint32_t sync = read_bits(frame, pos, FrameConfig::kSyncBits);
    pos += FrameConfig::kSyncBits;
    if (sync != FrameConfig::kSyncWord) {
        result.status = ParseStatus::BadHeader;
        return result;
    }
    result.seq = static_cast<std::uint16_t>(read_bits(frame, pos, FrameConfig::kSeqBits));
    pos += FrameConfig::kSeqBits;
    result.round_index = static_cast<std::uint8_t>(read_bits(frame, pos, FrameConfig::kRoundBits));
    pos += FrameConfig::kRoundBits;
    result.payload = bits_to_bytes(frame, pos, cfg.payload_bytes());
    pos += cfg.payload_bits;
    const std::uint32_t crc = read_bits(frame, pos, FrameConfig::kCrcBits);
    pos += FrameConfig::kCrcBits;
    // The tail is part of the fixed format; a malformed tail rejects the
    // packet the same way a bad sync word does.
    if (read_bits(frame, pos, FrameConfig::kTailBits) != 0x00) {
        result.status = ParseStatus::BadHeader;
        return result;
    }

    ByteVec crc_input;
    crc_input.reserve(3 + result.payload.size());
    crc_input.push_back(static_cast<std::uint8_t>(result.seq >> 8));
    crc_input.push_back(static_cast<std::uint8_t>(result.seq & 0xFF));
    crc_input.push_back(result.round_index);
    crc_input.insert(crc_input.end(), result.payload.begin(), result.payload.end());

    result.status = (crc == crc32(crc_input)) ? ParseStatus::Ok : ParseStatus::BadCrc;
    return result;
}

}  // namespace nharq
