#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "nharq/harq.hpp"

using namespace nharq;

namespace {

EngineConfig threshold_config(double power, double alpha2 = 0.2, int max_rounds = 3,
                              std::size_t total = 1) {
    EngineConfig cfg;
    cfg.power = power;
    cfg.alpha2 = alpha2;
    cfg.max_rounds = max_rounds;
    cfg.total_messages = total;
    cfg.decoder.kind = DecoderModel::Kind::Threshold;
    cfg.channel.kind = ChannelKind::AwgnFixed;
    return cfg;
}

// Independent transcription of the two-mode scheduler, used as the oracle
// for the engine's transition behaviour. Tracks per-message round budgets
// and statuses with plain arrays and the rules spelled out longhand.
struct RefScheduler {
    int max_rounds;
    std::size_t total;
    Mode mode = Mode::ITM;
    std::optional<std::uint32_t> old_id;
    std::uint32_t cur = 0;
    std::uint32_t next_seq = 1;
    std::vector<int> rounds;
    std::vector<MessageStatus> status;

    RefScheduler(int m, std::size_t t) : max_rounds(m), total(t) {
        rounds.assign(t, 0);
        status.assign(t, MessageStatus::Pending);
    }

    bool done() const {
        if (next_seq < total) {
            return false;
        }
        for (auto s : status) {
            if (s == MessageStatus::Pending) {
                return false;
            }
        }
        return true;
    }

    std::optional<std::uint32_t> take_next() {
        if (next_seq < total) {
            return next_seq++;
        }
        return std::nullopt;
    }

    void step(Ack a_old, Ack a_new) {
        if (mode == Mode::ITM) {
            rounds[cur] += 1;
            if (a_new == Ack::ACK) {
                status[cur] = MessageStatus::Delivered;
            } else if (rounds[cur] >= max_rounds) {
                status[cur] = MessageStatus::Abandoned;
            } else {
                if (auto n = take_next()) {
                    mode = Mode::RM;
                    old_id = cur;
                    cur = *n;
                }
                return;  // solo retransmission when supply is exhausted
            }
            mode = Mode::ITM;
            old_id.reset();
            if (auto n = take_next()) {
                cur = *n;
            }
            return;
        }

        const std::uint32_t o = *old_id;
        const std::uint32_t n = cur;
        rounds[o] += 1;
        rounds[n] += 1;
        if (a_old == Ack::ACK) {
            status[o] = MessageStatus::Delivered;
        } else if (rounds[o] >= max_rounds) {
            status[o] = MessageStatus::Abandoned;
        }
        if (a_new == Ack::ACK) {
            status[n] = MessageStatus::Delivered;
        } else if (rounds[n] >= max_rounds) {
            status[n] = MessageStatus::Abandoned;
        }

        const bool o_pending = status[o] == MessageStatus::Pending;
        const bool n_pending = status[n] == MessageStatus::Pending;
        if (o_pending && n_pending) {
            return;  // retransmit the same superimposed pair
        }
        if (o_pending || n_pending) {
            const std::uint32_t survivor = o_pending ? o : n;
            if (auto nx = take_next()) {
                mode = Mode::RM;
                old_id = survivor;
                cur = *nx;
            } else {
                mode = Mode::ITM;
                old_id.reset();
                cur = survivor;
            }
            return;
        }
        mode = Mode::ITM;
        old_id.reset();
        if (auto nx = take_next()) {
            cur = *nx;
        }
    }
};

}  // namespace

TEST_CASE("threshold decode rule is boundary-inclusive") {
    SinrResult g;
    g.gamma = 3.0;  // log2(1 + 3) == 2 exactly
    CHECK(threshold_decode(g, 2.0));
    g.gamma = 2.999;
    CHECK_FALSE(threshold_decode(g, 2.0));
    g.gamma = std::numeric_limits<double>::infinity();
    CHECK(threshold_decode(g, 1000.0));
}

TEST_CASE("default rate derives from the frame layout") {
    EngineConfig cfg = threshold_config(1.0);
    CHECK(cfg.rate() == doctest::Approx(200.0 / 140.0));
    cfg.decoder.rate_bits_per_symbol = 1.2;
    CHECK(cfg.rate() == 1.2);
}

TEST_CASE("engine configuration is validated") {
    CHECK_THROWS_AS(NHarqEngine(threshold_config(1.0, 0.5)), std::invalid_argument);
    CHECK_THROWS_AS(NHarqEngine(threshold_config(1.0, 0.0)), std::invalid_argument);
    CHECK_THROWS_AS(NHarqEngine(threshold_config(0.0)), std::invalid_argument);
    CHECK_THROWS_AS(NHarqEngine(threshold_config(1.0, 0.2, 0)), std::invalid_argument);
}

TEST_CASE("amplitude split follows the power fractions") {
    EngineConfig cfg = threshold_config(10.0, 0.2);
    CHECK(cfg.amplitude_full() == doctest::Approx(std::sqrt(10.0)));
    CHECK(cfg.amplitude_old() == doctest::Approx(std::sqrt(2.0)));
    CHECK(cfg.amplitude_new() == doctest::Approx(std::sqrt(8.0)));
    const double total = cfg.amplitude_old() * cfg.amplitude_old() +
                         cfg.amplitude_new() * cfg.amplitude_new();
    CHECK(total == doctest::Approx(10.0));
}

TEST_CASE("ITM failure superimposes the next message on the retransmission") {
    NHarqEngine engine(threshold_config(1.0, 0.2, 3, 10));
    engine.step_forced({std::nullopt, Ack::NACK});
    TxPlan plan = engine.plan_round();
    CHECK(plan.mode == Mode::RM);
    REQUIRE(plan.old_id.has_value());
    CHECK(*plan.old_id == 0);
    CHECK(plan.new_id == 1);
}

TEST_CASE("double NACK repeats the same superimposed pair") {
    NHarqEngine engine(threshold_config(1.0, 0.2, 3, 10));
    engine.step_forced({std::nullopt, Ack::NACK});
    engine.step_forced({Ack::NACK, Ack::NACK});
    TxPlan plan = engine.plan_round();
    CHECK(plan.mode == Mode::RM);
    CHECK(*plan.old_id == 0);
    CHECK(plan.new_id == 1);
}

TEST_CASE("old delivered, new pending rolls the window forward") {
    NHarqEngine engine(threshold_config(1.0, 0.2, 3, 10));
    engine.step_forced({std::nullopt, Ack::NACK});
    engine.step_forced({Ack::ACK, Ack::NACK});
    TxPlan plan = engine.plan_round();
    CHECK(plan.mode == Mode::RM);
    CHECK(*plan.old_id == 1);
    CHECK(plan.new_id == 2);
    CHECK(engine.messages()[0].status == MessageStatus::Delivered);
}

TEST_CASE("new delivered, old pending keeps the old and brings a fresh message") {
    NHarqEngine engine(threshold_config(1.0, 0.2, 3, 10));
    engine.step_forced({std::nullopt, Ack::NACK});
    engine.step_forced({Ack::NACK, Ack::ACK});
    TxPlan plan = engine.plan_round();
    CHECK(plan.mode == Mode::RM);
    CHECK(*plan.old_id == 0);
    CHECK(plan.new_id == 2);
    CHECK(engine.messages()[1].status == MessageStatus::Delivered);
}

TEST_CASE("both delivered returns to single-message mode") {
    NHarqEngine engine(threshold_config(1.0, 0.2, 3, 10));
    engine.step_forced({std::nullopt, Ack::NACK});
    engine.step_forced({Ack::ACK, Ack::ACK});
    TxPlan plan = engine.plan_round();
    CHECK(plan.mode == Mode::ITM);
    CHECK_FALSE(plan.old_id.has_value());
    CHECK(plan.new_id == 2);
}

TEST_CASE("a message is abandoned after the round cap") {
    NHarqEngine engine(threshold_config(1.0, 0.2, 3, 10));
    engine.step_forced({std::nullopt, Ack::NACK});   // msg 0: round 1
    engine.step_forced({Ack::NACK, Ack::NACK});      // msg 0: round 2
    engine.step_forced({Ack::NACK, Ack::NACK});      // msg 0: round 3 -> out
    CHECK(engine.messages()[0].status == MessageStatus::Abandoned);
    CHECK(engine.messages()[0].rounds_used == 3);
    TxPlan plan = engine.plan_round();
    // The surviving partner carries on with the next fresh message.
    CHECK(plan.mode == Mode::RM);
    CHECK(*plan.old_id == 1);
    CHECK(plan.new_id == 2);
}

TEST_CASE("survivor is flushed solo when the message supply runs out") {
    NHarqEngine engine(threshold_config(1.0, 0.2, 3, 2));
    engine.step_forced({std::nullopt, Ack::NACK});  // RM(0, 1)
    engine.step_forced({Ack::ACK, Ack::NACK});      // msg 0 done, no supply left
    TxPlan plan = engine.plan_round();
    CHECK(plan.mode == Mode::ITM);
    CHECK_FALSE(plan.old_id.has_value());
    CHECK(plan.new_id == 1);
    // The earlier superimposed copy stays in the combining window.
    CHECK(engine.messages()[1].round_indices.size() == 1);
    engine.step_forced({std::nullopt, Ack::ACK});
    CHECK(engine.done());
    CHECK(engine.messages()[1].round_indices.size() == 2);
    CHECK(engine.messages()[1].status == MessageStatus::Delivered);
}

TEST_CASE("scheduler conforms to the reference over all feedback sequences up to length 8") {
    const int kLen = 8;
    const int kMaxRounds = 3;
    const std::size_t kTotal = 32;  // never exhausted within 8 rounds
    std::uint64_t checked = 0;
    for (int len = 1; len <= kLen; ++len) {
        const std::uint64_t combos = 1ULL << (2 * len);
        for (std::uint64_t word = 0; word < combos; ++word) {
            NHarqEngine engine(threshold_config(1.0, 0.2, kMaxRounds, kTotal));
            RefScheduler ref(kMaxRounds, kTotal);
            for (int r = 0; r < len; ++r) {
                const Ack a_old = ((word >> (2 * r)) & 1) ? Ack::ACK : Ack::NACK;
                const Ack a_new = ((word >> (2 * r + 1)) & 1) ? Ack::ACK : Ack::NACK;
                const TxPlan plan = engine.plan_round();

                // Cross-check the plan against the reference before stepping.
                REQUIRE(plan.mode == ref.mode);
                REQUIRE(plan.new_id == ref.cur);
                if (plan.mode == Mode::RM) {
                    REQUIRE(plan.old_id.has_value());
                    REQUIRE(*plan.old_id == *ref.old_id);
                    REQUIRE(*plan.old_id < plan.new_id);
                    engine.step_forced({a_old, a_new});
                } else {
                    REQUIRE_FALSE(plan.old_id.has_value());
                    engine.step_forced({std::nullopt, a_new});
                }
                ref.step(a_old, a_new);

                // Invariants on the engine's round log and messages.
                REQUIRE(engine.rounds().back().constituents.size() <= 2);
                for (const MessageContext& m : engine.messages()) {
                    REQUIRE(m.rounds_used <= kMaxRounds);
                    REQUIRE(m.rounds_used == ref.rounds[m.id]);
                    REQUIRE(m.status == ref.status[m.id]);
                }
                ++checked;
            }
            REQUIRE(engine.done() == ref.done());
        }
    }
    CHECK(checked > 100000);
}

TEST_CASE("forced replay is deterministic") {
    auto drive = [] {
        NHarqEngine engine(threshold_config(2.0, 0.2, 3, 6));
        const Feedback seq[] = {
            {std::nullopt, Ack::NACK}, {Ack::NACK, Ack::NACK}, {Ack::NACK, Ack::ACK},
            {std::nullopt, Ack::NACK}, {Ack::ACK, Ack::ACK},
        };
        for (const Feedback& fb : seq) {
            engine.step_forced(fb);
        }
        return engine;
    };
    const NHarqEngine a = drive();
    const NHarqEngine b = drive();
    REQUIRE(a.rounds().size() == b.rounds().size());
    for (std::size_t i = 0; i < a.rounds().size(); ++i) {
        const auto& ra = a.rounds()[i].constituents;
        const auto& rb = b.rounds()[i].constituents;
        REQUIRE(ra.size() == rb.size());
        for (std::size_t j = 0; j < ra.size(); ++j) {
            CHECK(ra[j].message_id == rb[j].message_id);
            CHECK(ra[j].amplitude == rb[j].amplitude);
            CHECK(ra[j].cancelled == rb[j].cancelled);
        }
    }
}

TEST_CASE("threshold run at high power delivers every message in one round") {
    EngineConfig cfg = threshold_config(1e6, 0.2, 3, 20);
    const EngineOutcome out = run_nharq_engine(cfg, 7, 0);
    CHECK(out.messages == 20);
    CHECK(out.delivered == 20);
    CHECK(out.abandoned == 0);
    CHECK(out.total_rounds == 20);
    CHECK(out.sum_rounds_used == 20);
}

TEST_CASE("threshold run at negligible power abandons every message") {
    EngineConfig cfg = threshold_config(1e-9, 0.2, 3, 10);
    const EngineOutcome out = run_nharq_engine(cfg, 7, 0);
    CHECK(out.delivered == 0);
    CHECK(out.abandoned == 10);
    // Every message burns its full round budget.
    CHECK(out.sum_rounds_used == 30);
}

TEST_CASE("chase combining accumulates SNR where single-shot decoding cannot") {
    // Fixed unit channel, P = 1, rate 1.2 bits/symbol: one copy gives
    // log2(1 + 1) = 1 < 1.2, two combined copies give log2(1 + 2) > 1.2.
    EngineConfig cfg = threshold_config(1.0, 0.2, 3, 5);
    cfg.decoder.rate_bits_per_symbol = 1.2;

    const EngineOutcome cc = run_harqcc_engine(cfg, 1, 0);
    CHECK(cc.delivered == 5);
    CHECK(cc.abandoned == 0);
    CHECK(cc.total_rounds == 10);  // exactly two rounds per message

    const EngineOutcome t1 = run_type1_engine(cfg, 1, 0);
    CHECK(t1.delivered == 0);
    CHECK(t1.abandoned == 5);
    CHECK(t1.total_rounds == 15);  // full budget, never succeeds
}

TEST_CASE("bit-level run at high power is error-free") {
    EngineConfig cfg = threshold_config(1e6, 0.2, 3, 5);
    cfg.decoder.kind = DecoderModel::Kind::BitLevel;
    const EngineOutcome out = run_nharq_engine(cfg, 13, 0);
    CHECK(out.delivered == 5);
    CHECK(out.abandoned == 0);
    CHECK(out.payload_bit_errors == 0);

    const EngineOutcome cc = run_harqcc_engine(cfg, 13, 100);
    CHECK(cc.delivered == 5);
    CHECK(cc.payload_bit_errors == 0);
}

TEST_CASE("bit-level decoding accepts only the intended sequence number") {
    EngineConfig cfg = threshold_config(1e6, 0.2, 3, 3);
    cfg.decoder.kind = DecoderModel::Kind::BitLevel;
    NHarqEngine engine(cfg);
    RngStream rng(21, 0);
    while (!engine.done()) {
        engine.step(rng);
    }
    for (const MessageContext& m : engine.messages()) {
        CHECK(m.status == MessageStatus::Delivered);
        CHECK(m.decoded_payload == m.payload);
    }
}

TEST_CASE("delivered messages are cancelled from every round they touched") {
    NHarqEngine engine(threshold_config(1.0, 0.2, 3, 10));
    engine.step_forced({std::nullopt, Ack::NACK});
    engine.step_forced({Ack::NACK, Ack::NACK});
    engine.step_forced({Ack::ACK, Ack::ACK});
    for (const MessageContext& m : engine.messages()) {
        if (m.status != MessageStatus::Delivered) {
            continue;
        }
        for (std::size_t idx : m.round_indices) {
            const Constituent* c = engine.rounds()[idx].find(m.id);
            REQUIRE(c != nullptr);
            CHECK(c->cancelled);
        }
    }
}

TEST_CASE("payload generation is deterministic and id-sensitive") {
    FrameConfig frame;
    const ByteVec a = make_payload(frame, 42, 7);
    const ByteVec b = make_payload(frame, 42, 7);
    const ByteVec c = make_payload(frame, 42, 8);
    const ByteVec d = make_payload(frame, 43, 7);
    CHECK(a == b);
    CHECK(a != c);
    CHECK(a != d);
    CHECK(a.size() == frame.payload_bytes());
}

TEST_CASE("outcome bookkeeping is consistent") {
    EngineConfig cfg = threshold_config(5.0, 0.2, 3, 50);
    cfg.channel.kind = ChannelKind::RayleighBlock;
    const EngineOutcome out = run_nharq_engine(cfg, 99, 0);
    CHECK(out.messages == 50);
    CHECK(out.delivered + out.abandoned == 50);
    CHECK(out.total_rounds >= out.messages * 0 + out.delivered);
    CHECK(out.sum_rounds_used >= out.messages);
    CHECK(out.sum_rounds_used <= 50ull * 3ull);
}
