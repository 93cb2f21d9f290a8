#include "nharq/sim.hpp"

#include <cmath>
#include <future>
#include <stdexcept>

namespace nharq {

const char* scheme_name(Scheme scheme) {
    switch (scheme) {
        case Scheme::Type1:   return "type1";
        case Scheme::HarqCc:  return "harq-cc";
        case Scheme::NHarqCc: return "n-harq-cc";
    }
    return "?";
}

void SimConfig::validate() const {
    if (frames < 1) {
        throw std::invalid_argument("SimConfig: frames must be >= 1");
    }
    if (snr_db_grid.empty()) {
        throw std::invalid_argument("SimConfig: SNR grid must be non-empty");
    }
    if (scheme == Scheme::NHarqCc && (!(alpha2 > 0.0) || !(alpha2 < 0.5))) {
        throw std::invalid_argument("SimConfig: alpha2 must lie in (0, 0.5)");
    }
    if (max_rounds < 1) {
        throw std::invalid_argument("SimConfig: max_rounds must be >= 1");
    }
    frame.validate();
}

double aggregate_ber(const EngineOutcome& outcome, std::size_t payload_bits) {
    if (outcome.messages == 0) {
        throw std::invalid_argument("aggregate_ber: zero frames");
    }
    const double total = static_cast<double>(payload_bits) *
                         static_cast<double>(outcome.messages);
    const double errors = static_cast<double>(outcome.payload_bit_errors) +
                          static_cast<double>(payload_bits) *
                              static_cast<double>(outcome.abandoned);
    return errors / total;
}

double aggregate_se(const EngineOutcome& outcome, double symbols_per_round,
                    std::size_t payload_bits) {
    if (outcome.messages == 0) {
        throw std::invalid_argument("aggregate_se: zero frames");
    }
    if (outcome.total_rounds == 0) {
        throw std::invalid_argument("aggregate_se: zero rounds");
    }
    return static_cast<double>(payload_bits) * static_cast<double>(outcome.delivered) /
           (symbols_per_round * static_cast<double>(outcome.total_rounds));
}

MetricsRow run_point(const SimConfig& cfg, double snr_db, std::size_t grid_index) {
    cfg.validate();

    EngineConfig ecfg;
    ecfg.power = std::pow(10.0, snr_db / 10.0);
    ecfg.alpha2 = cfg.scheme == Scheme::NHarqCc ? cfg.alpha2 : 0.2;
    ecfg.max_rounds = cfg.max_rounds;
    ecfg.total_messages = cfg.frames;
    ecfg.decoder = cfg.decoder;
    ecfg.channel = cfg.channel;
    ecfg.frame = cfg.frame;
    ecfg.eq7_constant_amplitude = cfg.eq7_constant_amplitude;
    ecfg.payload_seed = cfg.seed;

    const std::uint64_t stream_base = static_cast<std::uint64_t>(grid_index) << 32;
    EngineOutcome outcome;
    switch (cfg.scheme) {
        case Scheme::Type1:
            outcome = run_type1_engine(ecfg, cfg.seed, stream_base);
            break;
        case Scheme::HarqCc:
            outcome = run_harqcc_engine(ecfg, cfg.seed, stream_base);
            break;
        case Scheme::NHarqCc:
            outcome = run_nharq_engine(ecfg, cfg.seed, stream_base);
            break;
    }

    const double symbols_per_round =
        cfg.decoder.kind == DecoderModel::Kind::BitLevel
            ? static_cast<double>(cfg.frame.symbols_per_frame())
            : static_cast<double>(cfg.frame.payload_bits) / ecfg.rate();

    MetricsRow row;
    row.scheme = scheme_name(cfg.scheme);
    row.snr_db = snr_db;
    row.ber = aggregate_ber(outcome, cfg.frame.payload_bits);
    row.se = aggregate_se(outcome, symbols_per_round, cfg.frame.payload_bits);
    row.avg_rounds = static_cast<double>(outcome.sum_rounds_used) /
                     static_cast<double>(outcome.messages);
    row.abandon_rate = static_cast<double>(outcome.abandoned) /
                       static_cast<double>(outcome.messages);
    row.frames = cfg.frames;
    row.seed = cfg.seed;
    return row;
}

std::vector<MetricsRow> sweep(const SimConfig& cfg, unsigned jobs) {
    cfg.validate();
    const std::size_t n = cfg.snr_db_grid.size();
    std::vector<MetricsRow> rows(n);
    if (jobs <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            rows[i] = run_point(cfg, cfg.snr_db_grid[i], i);
        }
        return rows;
    }
    std::vector<std::future<MetricsRow>> futures;
    futures.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        futures.push_back(std::async(std::launch::async, [&cfg, i]() {
            return run_point(cfg, cfg.snr_db_grid[i], i);
        }));
    }
    for (std::size_t i = 0; i < n; ++i) {
        rows[i] = futures[i].get();
    }
    return rows;
}

}  // namespace nharq
