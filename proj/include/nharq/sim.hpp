#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nharq/harq.hpp"

namespace nharq {

enum class Scheme { Type1, HarqCc, NHarqCc };

const char* scheme_name(Scheme scheme);

struct SimConfig {
    Scheme scheme = Scheme::NHarqCc;
    std::vector<double> snr_db_grid;  // non-empty
    double alpha2 = 0.2;              // unused by the baselines
    int max_rounds = 3;
    std::size_t frames = 1757;
    DecoderModel decoder;
    ChannelModel channel;
    FrameConfig frame;
    std::uint64_t seed = 0;
    bool eq7_constant_amplitude = false;

    void validate() const;
};

struct MetricsRow {
    std::string scheme;
    double snr_db = 0.0;
    double ber = 0.0;
    double se = 0.0;           // delivered info bits per transmitted symbol
    double avg_rounds = 0.0;
    double abandon_rate = 0.0;
    std::size_t frames = 0;
    std::uint64_t seed = 0;
};

// Errored info bits over total info bits; every abandoned frame scores
// all of its payload bits as errors.
double aggregate_ber(const EngineOutcome& outcome, std::size_t payload_bits);

// Delivered info bits per transmitted complex symbol (bps/Hz under unit
// bandwidth). An RM round carrying two messages counts one round of
// symbols.
double aggregate_se(const EngineOutcome& outcome, double symbols_per_round,
                    std::size_t payload_bits);

MetricsRow run_point(const SimConfig& cfg, double snr_db, std::size_t grid_index);

// One row per grid point, grid order preserved. Grid points use disjoint
// RNG stream ids, so parallel and serial execution produce identical
// rows.
std::vector<MetricsRow> sweep(const SimConfig& cfg, unsigned jobs = 1);

}  // namespace nharq
