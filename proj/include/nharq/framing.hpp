#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace nharq {

// One bit per element, values 0 or 1.
using BitVec = std::vector<std::uint8_t>;
using ByteVec = std::vector<std::uint8_t>;

// Standard CRC-32 (polynomial 0x04C11DB7 reflected, init all-ones,
// final XOR all-ones). Check value: crc32("123456789") == 0xCBF43926.
std::uint32_t crc32(const ByteVec& data);

// XOR with the PN9 sequence (LFSR x^9 + x^5 + 1, seed all-ones),
// restarted at every call. Involution: whiten(whiten(b)) == b.
BitVec whiten(const BitVec& bits);

enum class FecScheme {
    Identity,
    Repetition3,
};

BitVec fec_encode(const BitVec& bits, FecScheme scheme);
// Identity passthrough or per-triple majority vote. Throws
// std::invalid_argument when the input length does not divide by the
// repetition factor.
BitVec fec_decode(const BitVec& bits, FecScheme scheme);

// Code rate of the FEC scheme as a double (1 or 1/3).
double fec_rate(FecScheme scheme);

// Fixed frame bit layout (before whitening and FEC):
//   sync word   16 bits  0x2DD4
//   seq         16 bits  unsigned big-endian
//   round_index  8 bits
//   payload     payload_bits (default 200)
//   crc32       32 bits  big-endian, over (seq || round_index || payload)
//   tail         8 bits  0x00
struct FrameConfig {
    std::size_t payload_bits = 200;  // must be > 0 and a multiple of 8
    FecScheme fec = FecScheme::Identity;

    static constexpr std::uint16_t kSyncWord = 0x2DD4;
    static constexpr std::size_t kSyncBits = 16;
    static constexpr std::size_t kSeqBits = 16;
    static constexpr std::size_t kRoundBits = 8;
    static constexpr std::size_t kCrcBits = 32;
    static constexpr std::size_t kTailBits = 8;

    std::size_t payload_bytes() const { return payload_bits / 8; }
    std::size_t frame_bits() const {
        return kSyncBits + kSeqBits + kRoundBits + payload_bits + kCrcBits + kTailBits;
    }
    std::size_t encoded_bits() const {
        return fec == FecScheme::Repetition3 ? frame_bits() * 3 : frame_bits();
    }
    std::size_t symbols_per_frame() const { return encoded_bits() / 2; }

    void validate() const;
};

struct Frame {
    std::uint16_t seq = 0;
    ByteVec payload;
    BitVec encoded_bits;  // after CRC + whitening + FEC
};

// Builds the full encoded frame. Every frame under one config has the
// same encoded length (fixed-length frames, so retransmitted symbol
// blocks align for chase combining). Throws on payload length mismatch.
Frame build_frame(const ByteVec& payload, const FrameConfig& cfg,
                  std::uint16_t seq, std::uint8_t round_index = 0);

enum class ParseStatus {
    Ok,
    BadHeader,  // sync word mismatch: packet discarded
    BadCrc,
};

struct ParseResult {
    ParseStatus status = ParseStatus::BadHeader;
    std::uint16_t seq = 0;
    std::uint8_t round_index = 0;
    ByteVec payload;

    bool ok() const { return status == ParseStatus::Ok; }
};

// Inverse of build_frame: FEC decode, dewhiten, header check, CRC check.
// Input length must equal cfg.encoded_bits().
ParseResult parse_frame(const BitVec& bits, const FrameConfig& cfg);

}  // namespace nharq
