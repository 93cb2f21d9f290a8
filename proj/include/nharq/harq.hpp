#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nharq/channel.hpp"
#include "nharq/framing.hpp"
#include "nharq/phy.hpp"

namespace nharq {

enum class Mode { ITM, RM };
enum class Ack : std::uint8_t { ACK, NACK };
enum class MessageStatus { Pending, Delivered, Abandoned };

// Per-round feedback. old_ack is present iff the round was RM; in ITM the
// sole message's result travels in new_ack. Feedback is error-free and
// arrives before the next round.
struct Feedback {
    std::optional<Ack> old_ack;
    Ack new_ack = Ack::NACK;
};

struct DecoderModel {
    enum class Kind { Threshold, BitLevel };
    Kind kind = Kind::Threshold;
    // Threshold only. 0 means: derive payload_bits / symbols_per_frame
    // from the frame config.
    double rate_bits_per_symbol = 0.0;
};

// Outage rule: success iff log2(1 + gamma) >= rate (boundary inclusive).
bool threshold_decode(const SinrResult& gamma, double rate);

struct EngineConfig {
    double power = 1.0;           // linear transmit power P (noise variance is 1)
    double alpha2 = 0.2;          // power fraction of the old packet, in (0, 0.5)
    int max_rounds = 3;           // M
    std::size_t total_messages = 1;
    DecoderModel decoder;
    ChannelModel channel;
    FrameConfig frame;
    bool eq7_constant_amplitude = false;
    std::uint64_t payload_seed = 0;

    double alpha() const { return std::sqrt(alpha2); }
    double amplitude_full() const { return std::sqrt(power); }
    double amplitude_old() const { return alpha() * std::sqrt(power); }
    double amplitude_new() const { return std::sqrt((1.0 - alpha2) * power); }
    double rate() const;
    void validate() const;
};

struct MessageContext {
    std::uint32_t id = 0;
    MessageStatus status = MessageStatus::Pending;
    int rounds_used = 0;
    std::vector<std::size_t> round_indices;  // windows into the engine round log

    // Bit-level bookkeeping.
    ByteVec payload;          // transmitted truth
    SymbolBlock tx_symbols;   // modulated frame, unit average power
    ByteVec decoded_payload;  // receiver's accepted payload
    std::uint64_t bit_errors = 0;  // decoded-vs-truth payload errors on delivery
};

struct TxPlan {
    Mode mode = Mode::ITM;
    std::optional<std::uint32_t> old_id;  // RM only
    std::uint32_t new_id = 0;             // RM new message, or the sole ITM message
};

struct EngineOutcome {
    std::size_t messages = 0;
    std::size_t delivered = 0;
    std::size_t abandoned = 0;
    std::uint64_t total_rounds = 0;    // channel rounds transmitted
    std::uint64_t sum_rounds_used = 0; // per-message occupancy, for avg_rounds
    std::uint64_t payload_bit_errors = 0;
};

// The N-HARQ-CC protocol engine. One instance per trial; drives the
// two-mode state machine, keeps per-message copy windows, performs MRC +
// SIC decoding (threshold or bit-level) and failed-SIC interference
// bookkeeping.
class NHarqEngine {
public:
    explicit NHarqEngine(EngineConfig cfg);

    bool done() const;
    TxPlan plan_round() const;

    // Full round: transmit over the channel, decode, schedule the next
    // round. Returns the feedback of this round.
    Feedback step(RngStream& rng);

    // Protocol-only round with forced decode outcomes; no channel, no
    // decoder. Used to exercise the scheduling state machine directly.
    void step_forced(const Feedback& fb);

    const std::vector<RoundRecord>& rounds() const { return rounds_; }
    const std::vector<MessageContext>& messages() const { return messages_; }
    const EngineConfig& config() const { return cfg_; }

    EngineOutcome outcome() const;

private:
    std::optional<std::uint32_t> spawn_message();
    std::size_t transmit(const TxPlan& plan, RngStream* rng);
    Feedback decode_round(const TxPlan& plan);
    Ack decode_message(std::uint32_t id, bool as_old);
    ParseResult qpsk_parse(const SymbolBlock& combined) const;
    void mark_decoded(std::uint32_t id);
    void apply_feedback(const TxPlan& plan, const Feedback& fb);
    void finish(std::uint32_t id, Ack ack);
    void check_pollution_invariant(const MessageContext& ctx) const;

    EngineConfig cfg_;
    Mode mode_ = Mode::ITM;
    std::optional<std::uint32_t> old_id_;
    std::uint32_t cur_id_ = 0;  // RM new slot, or the sole ITM message
    bool started_ = false;
    std::uint32_t next_seq_ = 0;
    std::vector<MessageContext> messages_;
    std::vector<RoundRecord> rounds_;
};

// Baseline engines: one message at a time at full power, up to M rounds.
// Type-I decodes each round from the latest copy only; HARQ-CC combines
// all copies via MRC before decoding.
EngineOutcome run_type1_engine(const EngineConfig& cfg, std::uint64_t seed,
                               std::uint64_t stream_base);
EngineOutcome run_harqcc_engine(const EngineConfig& cfg, std::uint64_t seed,
                                std::uint64_t stream_base);
EngineOutcome run_nharq_engine(const EngineConfig& cfg, std::uint64_t seed,
                               std::uint64_t stream_base);

// Deterministic pseudo-random payload for message `id`.
ByteVec make_payload(const FrameConfig& frame, std::uint64_t payload_seed, std::uint32_t id);

}  // namespace nharq
