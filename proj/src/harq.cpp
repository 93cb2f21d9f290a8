#include "nharq/harq.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace nharq {

bool threshold_decode(const SinrResult& gamma, double rate) {
    if (gamma.infinite()) {
        return true;
    }
    return std::log2(1.0 + gamma.gamma) >= rate;
}

double EngineConfig::rate() const {
    if (decoder.rate_bits_per_symbol > 0.0) {
        return decoder.rate_bits_per_symbol;
    }
    return static_cast<double>(frame.payload_bits) /
           static_cast<double>(frame.symbols_per_frame());
}

void EngineConfig::validate() const {
    if (!(alpha2 > 0.0) || !(alpha2 < 0.5)) {
        throw std::invalid_argument("EngineConfig: alpha2 must lie in (0, 0.5)");
    }
    if (max_rounds < 1) {
        throw std::invalid_argument("EngineConfig: max_rounds must be >= 1");
    }
    if (!(power > 0.0)) {
        throw std::invalid_argument("EngineConfig: power must be positive");
    }
    frame.validate();
}

ByteVec make_payload(const FrameConfig& frame, std::uint64_t payload_seed, std::uint32_t id) {
    RngStream rng(payload_seed ^ 0x5061796C6F616421ULL, id);
    ByteVec payload(frame.payload_bytes());
    for (auto& b : payload) {
        b = static_cast<std::uint8_t>(rng.seed_word() & 0xFF);
    }
    return payload;
}

NHarqEngine::NHarqEngine(EngineConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
}

std::optional<std::uint32_t> NHarqEngine::spawn_message() {
    if (next_seq_ >= cfg_.total_messages) {
        return std::nullopt;
    }
    MessageContext ctx;
    ctx.id = next_seq_++;
    if (cfg_.decoder.kind == DecoderModel::Kind::BitLevel) {
        ctx.payload = make_payload(cfg_.frame, cfg_.payload_seed, ctx.id);
        const Frame frame = build_frame(ctx.payload, cfg_.frame,
                                        static_cast<std::uint16_t>(ctx.id & 0xFFFF));
        ctx.tx_symbols = qpsk_modulate(frame.encoded_bits);
    }
    messages_.push_back(std::move(ctx));
    return messages_.back().id;
}

bool NHarqEngine::done() const {
    if (!started_) {
        return cfg_.total_messages == 0;
    }
    if (next_seq_ < cfg_.total_messages) {
        return false;
    }
    return std::all_of(messages_.begin(), messages_.end(), [](const MessageContext& m) {
        return m.status != MessageStatus::Pending;
    });
}

TxPlan NHarqEngine::plan_round() const {
    TxPlan plan;
    plan.mode = mode_;
    plan.new_id = cur_id_;
    if (mode_ == Mode::RM) {
        plan.old_id = old_id_;
    }
    return plan;
}

std::size_t NHarqEngine::transmit(const TxPlan& plan, RngStream* rng) {
    RoundRecord rec;
    rec.h = rng ? sample_channel(cfg_.channel, *rng) : cplx{1.0, 0.0};

    if (plan.mode == Mode::RM) {
        rec.constituents.push_back({*plan.old_id, cfg_.amplitude_old(), false});
        rec.constituents.push_back({plan.new_id, cfg_.amplitude_new(), false});
    } else {
        rec.constituents.push_back({plan.new_id, cfg_.amplitude_full(), false});
    }

    if (cfg_.decoder.kind == DecoderModel::Kind::BitLevel && rng) {
        const std::size_t n = cfg_.frame.symbols_per_frame();
        SymbolBlock composite(n, cplx{0.0, 0.0});
        for (const Constituent& c : rec.constituents) {
            const SymbolBlock& x = messages_[c.message_id].tx_symbols;
            for (std::size_t i = 0; i < n; ++i) {
                composite[i] += c.amplitude * x[i];
            }
        }
        rec.y.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            rec.y[i] = rec.h * composite[i];
        }
        rec.y = add_noise(rec.y, *rng);
    }

    const std::size_t idx = rounds_.size();
    rounds_.push_back(std::move(rec));
    for (const Constituent& c : rounds_.back().constituents) {
        MessageContext& ctx = messages_[c.message_id];
        ctx.rounds_used += 1;
        if (ctx.rounds_used > cfg_.max_rounds) {
            throw std::logic_error("NHarqEngine: message exceeded max_rounds");
        }
        ctx.round_indices.push_back(idx);
    }
    return idx;
}

Ack NHarqEngine::decode_message(std::uint32_t id, bool as_old) {
    MessageContext& ctx = messages_[id];

    if (cfg_.decoder.kind == DecoderModel::Kind::BitLevel) {
        std::vector<const RoundRecord*> window;
        window.reserve(ctx.round_indices.size());
        for (std::size_t idx : ctx.round_indices) {
            window.push_back(&rounds_[idx]);
        }
        const SymbolBlock combined = mrc_combine(window);
        const ParseResult parsed = qpsk_parse(combined);
        if (!parsed.ok() || parsed.seq != static_cast<std::uint16_t>(id & 0xFFFF)) {
            return Ack::NACK;
        }
        std::uint64_t errors = 0;
        for (std::size_t i = 0; i < parsed.payload.size(); ++i) {
            std::uint8_t diff = parsed.payload[i] ^ ctx.payload[i];
            while (diff) {
                errors += diff & 1;
                diff >>= 1;
            }
        }
        ctx.bit_errors = errors;
        ctx.decoded_payload = parsed.payload;
        return Ack::ACK;
    }

    // Threshold model: closed-form post-MRC SINR over the message's copy
    // window, uncancelled constituents grouped by identity.
    std::vector<cplx> h;
    std::vector<double> a;
    std::map<std::uint32_t, std::vector<double>> groups;
    h.reserve(ctx.round_indices.size());
    for (std::size_t w = 0; w < ctx.round_indices.size(); ++w) {
        const RoundRecord& rec = rounds_[ctx.round_indices[w]];
        h.push_back(rec.h);
        const Constituent* own = rec.find(id);
        double own_amp = own->amplitude;
        if (as_old && cfg_.eq7_constant_amplitude) {
            own_amp = cfg_.amplitude_old();
        }
        a.push_back(own_amp);
        for (const Constituent& c : rec.constituents) {
            if (c.message_id == id || c.cancelled) {
                continue;
            }
            auto& vec = groups[c.message_id];
            vec.resize(ctx.round_indices.size(), 0.0);
            vec[w] = (as_old && cfg_.eq7_constant_amplitude) ? cfg_.amplitude_new()
                                                             : c.amplitude;
        }
    }
    std::vector<std::vector<double>> interference;
    interference.reserve(groups.size());
    for (auto& [gid, vec] : groups) {
        vec.resize(ctx.round_indices.size(), 0.0);
        interference.push_back(vec);
    }
    const SinrResult gamma = sinr_general_multi(h, a, interference);
    return threshold_decode(gamma, cfg_.rate()) ? Ack::ACK : Ack::NACK;
}

ParseResult NHarqEngine::qpsk_parse(const SymbolBlock& combined) const {
    return parse_frame(qpsk_demodulate(combined), cfg_.frame);
}

void NHarqEngine::mark_decoded(std::uint32_t id) {
    MessageContext& ctx = messages_[id];
    const bool bitlevel = cfg_.decoder.kind == DecoderModel::Kind::BitLevel;
    SymbolBlock reconstructed;
    if (bitlevel) {
        // The receiver cancels its own reconstruction of the frame; with
        // a passed CRC this equals the transmitted block.
        const Frame frame = build_frame(ctx.decoded_payload, cfg_.frame,
                                        static_cast<std::uint16_t>(id & 0xFFFF));
        reconstructed = qpsk_modulate(frame.encoded_bits);
    }
    for (std::size_t idx : ctx.round_indices) {
        RoundRecord& rec = rounds_[idx];
        Constituent* c = rec.find(id);
        if (c == nullptr || c->cancelled) {
            continue;
        }
        if (bitlevel) {
            sic_cancel(rec, id, reconstructed);
        } else {
            c->cancelled = true;
        }
    }
}

Feedback NHarqEngine::decode_round(const TxPlan& plan) {
    Feedback fb;
    if (plan.mode == Mode::ITM) {
        fb.new_ack = decode_message(plan.new_id, false);
        if (fb.new_ack == Ack::ACK) {
            mark_decoded(plan.new_id);
        }
        return fb;
    }
    // RM: the new packet carries the larger power share and is decoded
    // first; the old packet is reachable only through SIC.
    fb.new_ack = decode_message(plan.new_id, false);
    if (fb.new_ack == Ack::ACK) {
        mark_decoded(plan.new_id);
        fb.old_ack = decode_message(*plan.old_id, true);
        if (*fb.old_ack == Ack::ACK) {
            mark_decoded(*plan.old_id);
        }
    } else {
        fb.old_ack = Ack::NACK;
    }
    return fb;
}

void NHarqEngine::finish(std::uint32_t id, Ack ack) {
    MessageContext& ctx = messages_[id];
    if (ack == Ack::ACK) {
        ctx.status = MessageStatus::Delivered;
        // Idempotent for the forced-feedback path, where no decoder ran.
        for (std::size_t idx : ctx.round_indices) {
            Constituent* c = rounds_[idx].find(id);
            if (c != nullptr && !c->cancelled) {
                c->cancelled = true;
            }
        }
    } else {
        ctx.status = MessageStatus::Abandoned;
    }
}

void NHarqEngine::check_pollution_invariant(const MessageContext& ctx) const {
    std::set<std::uint32_t> abandoned_interferers;
    for (std::size_t idx : ctx.round_indices) {
        for (const Constituent& c : rounds_[idx].constituents) {
            if (c.message_id != ctx.id && !c.cancelled &&
                messages_[c.message_id].status == MessageStatus::Abandoned) {
                abandoned_interferers.insert(c.message_id);
            }
        }
    }
    if (abandoned_interferers.size() > 1) {
        throw std::logic_error(
            "NHarqEngine: more than one abandoned interferer in a pending window");
    }
}

void NHarqEngine::apply_feedback(const TxPlan& plan, const Feedback& fb) {
    if (plan.mode == Mode::ITM) {
        if (fb.old_ack.has_value()) {
            throw std::invalid_argument("apply_feedback: old_ack in an ITM round");
        }
        // spawn_message() may grow messages_, so work with the id, not a
        // reference into the vector.
        const std::uint32_t id = plan.new_id;
        if (fb.new_ack == Ack::ACK) {
            finish(id, Ack::ACK);
        } else if (messages_[id].rounds_used >= cfg_.max_rounds) {
            finish(id, Ack::NACK);
        } else {
            // NACK below the round cap: superimpose the next message on
            // the retransmission if one is available, otherwise keep
            // retransmitting solo.
            if (auto next = spawn_message()) {
                mode_ = Mode::RM;
                old_id_ = id;
                cur_id_ = *next;
            }
            return;
        }
        mode_ = Mode::ITM;
        old_id_.reset();
        if (auto next = spawn_message()) {
            cur_id_ = *next;
        }
        return;
    }

    if (!fb.old_ack.has_value()) {
        throw std::invalid_argument("apply_feedback: missing old_ack in an RM round");
    }
    MessageContext& o = messages_[*plan.old_id];
    MessageContext& n = messages_[plan.new_id];

    if (*fb.old_ack == Ack::ACK) {
        finish(o.id, Ack::ACK);
    } else if (o.rounds_used >= cfg_.max_rounds) {
        finish(o.id, Ack::NACK);
        if (n.status == MessageStatus::Pending) {
            check_pollution_invariant(n);
        }
    }
    if (fb.new_ack == Ack::ACK) {
        finish(n.id, Ack::ACK);
    } else if (n.rounds_used >= cfg_.max_rounds) {
        finish(n.id, Ack::NACK);
        if (o.status == MessageStatus::Pending) {
            check_pollution_invariant(o);
        }
    }

    const bool o_pending = o.status == MessageStatus::Pending;
    const bool n_pending = n.status == MessageStatus::Pending;
    if (o_pending && n_pending) {
        return;  // both NACK below the cap: same pair again
    }
    if (o_pending || n_pending) {
        const std::uint32_t survivor = o_pending ? o.id : n.id;
        if (auto next = spawn_message()) {
            mode_ = Mode::RM;
            old_id_ = survivor;
            cur_id_ = *next;
        } else {
            // Message supply exhausted: flush the survivor solo at full
            // power; its earlier copies stay in the combining window.
            mode_ = Mode::ITM;
            old_id_.reset();
            cur_id_ = survivor;
        }
        return;
    }
    mode_ = Mode::ITM;
    old_id_.reset();
    if (auto next = spawn_message()) {
        cur_id_ = *next;
    }
}

Feedback NHarqEngine::step(RngStream& rng) {
    if (!started_) {
        auto first = spawn_message();
        if (!first) {
            throw std::logic_error("NHarqEngine: no messages to transmit");
        }
        cur_id_ = *first;
        started_ = true;
    }
    const TxPlan plan = plan_round();
    transmit(plan, &rng);
    const Feedback fb = decode_round(plan);
    apply_feedback(plan, fb);
    return fb;
}

void NHarqEngine::step_forced(const Feedback& fb) {
    if (!started_) {
        auto first = spawn_message();
        if (!first) {
            throw std::logic_error("NHarqEngine: no messages to transmit");
        }
        cur_id_ = *first;
        started_ = true;
    }
    const TxPlan plan = plan_round();
    transmit(plan, nullptr);
    apply_feedback(plan, fb);
}

EngineOutcome NHarqEngine::outcome() const {
    EngineOutcome out;
    out.messages = messages_.size();
    out.total_rounds = rounds_.size();
    for (const MessageContext& m : messages_) {
        out.sum_rounds_used += static_cast<std::uint64_t>(m.rounds_used);
        if (m.status == MessageStatus::Delivered) {
            out.delivered += 1;
            out.payload_bit_errors += m.bit_errors;
        } else if (m.status == MessageStatus::Abandoned) {
            out.abandoned += 1;
        }
    }
    return out;
}

namespace {

// Shared per-message loop for the two orthogonal baselines.
EngineOutcome run_baseline(const EngineConfig& cfg, std::uint64_t seed,
                           std::uint64_t stream_base, bool chase_combining) {
    cfg.validate();
    const bool bitlevel = cfg.decoder.kind == DecoderModel::Kind::BitLevel;
    const double amp = cfg.amplitude_full();
    EngineOutcome out;
    out.messages = cfg.total_messages;

    for (std::size_t msg = 0; msg < cfg.total_messages; ++msg) {
        RngStream rng(seed, stream_base + msg);
        ByteVec payload;
        SymbolBlock tx;
        if (bitlevel) {
            payload = make_payload(cfg.frame, cfg.payload_seed,
                                   static_cast<std::uint32_t>(msg));
            const Frame frame = build_frame(payload, cfg.frame,
                                            static_cast<std::uint16_t>(msg & 0xFFFF));
            tx = qpsk_modulate(frame.encoded_bits);
        }

        std::vector<RoundRecord> copies;
        bool delivered = false;
        int rounds = 0;
        while (rounds < cfg.max_rounds && !delivered) {
            rounds += 1;
            RoundRecord rec;
            rec.h = sample_channel(cfg.channel, rng);
            rec.constituents.push_back({static_cast<std::uint32_t>(msg), amp, false});
            if (bitlevel) {
                rec.y.resize(tx.size());
                for (std::size_t i = 0; i < tx.size(); ++i) {
                    rec.y[i] = rec.h * amp * tx[i];
                }
                rec.y = add_noise(rec.y, rng);
            }
            copies.push_back(std::move(rec));

            const std::size_t first = chase_combining ? 0 : copies.size() - 1;
            if (bitlevel) {
                std::vector<const RoundRecord*> window;
                for (std::size_t i = first; i < copies.size(); ++i) {
                    window.push_back(&copies[i]);
                }
                const SymbolBlock combined = mrc_combine(window);
                const ParseResult parsed = parse_frame(qpsk_demodulate(combined), cfg.frame);
                if (parsed.ok() && parsed.seq == static_cast<std::uint16_t>(msg & 0xFFFF)) {
                    delivered = true;
                    std::uint64_t errors = 0;
                    for (std::size_t i = 0; i < parsed.payload.size(); ++i) {
                        std::uint8_t diff = parsed.payload[i] ^ payload[i];
                        while (diff) {
                            errors += diff & 1;
                            diff >>= 1;
                        }
                    }
                    out.payload_bit_errors += errors;
                }
            } else {
                std::vector<cplx> h;
                std::vector<double> a;
                for (std::size_t i = first; i < copies.size(); ++i) {
                    h.push_back(copies[i].h);
                    a.push_back(amp);
                }
                const SinrResult gamma = sinr_general(h, a, std::vector<double>(h.size(), 0.0));
                delivered = threshold_decode(gamma, cfg.rate());
            }
        }
        out.total_rounds += static_cast<std::uint64_t>(rounds);
        out.sum_rounds_used += static_cast<std::uint64_t>(rounds);
        if (delivered) {
            out.delivered += 1;
        } else {
            out.abandoned += 1;
        }
    }
    return out;
}

}  // namespace

EngineOutcome run_type1_engine(const EngineConfig& cfg, std::uint64_t seed,
                               std::uint64_t stream_base) {
    return run_baseline(cfg, seed, stream_base, false);
}

EngineOutcome run_harqcc_engine(const EngineConfig& cfg, std::uint64_t seed,
                                std::uint64_t stream_base) {
    return run_baseline(cfg, seed, stream_base, true);
}

EngineOutcome run_nharq_engine(const EngineConfig& cfg, std::uint64_t seed,
                               std::uint64_t stream_base) {
    cfg.validate();
    if (cfg.total_messages == 0) {
        return {};
    }
    NHarqEngine engine(cfg);
    RngStream rng(seed, stream_base);
    while (!engine.done()) {
        engine.step(rng);
    }
    return engine.outcome();
}

}  // namespace nharq
