#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "nharq/channel.hpp"
#include "nharq/framing.hpp"

namespace nharq {

// QPSK Gray mapping, 2 bits/symbol, unit-power constellation:
//   00 -> (+1+i)/sqrt2   01 -> (-1+i)/sqrt2
//   11 -> (-1-i)/sqrt2   10 -> (+1-i)/sqrt2
// Throws on odd bit count.
SymbolBlock qpsk_modulate(const BitVec& bits);

// Hard decision by quadrant, inverse Gray map. A coordinate exactly 0
// decides as positive.
BitVec qpsk_demodulate(const SymbolBlock& symbols);

// Power split between the superimposed old and new packets. alpha is the
// amplitude fraction of the old packet; the new packet always gets the
// larger share (alpha^2 < 1/2).
struct SuperpositionSpec {
    double alpha = 0.0;  // in (0, 1/sqrt2)
    double power = 1.0;  // linear transmit power P

    double amplitude_old() const { return alpha * std::sqrt(power); }
    double amplitude_new() const { return std::sqrt((1.0 - alpha * alpha) * power); }
};

// Per-sample alpha*sqrt(P)*x_old + sqrt((1-alpha^2)*P)*x_new.
SymbolBlock superimpose(const SymbolBlock& x_old, const SymbolBlock& x_new,
                        const SuperpositionSpec& spec);

// One message's share of a transmitted round.
struct Constituent {
    std::uint32_t message_id = 0;
    double amplitude = 0.0;
    bool cancelled = false;
};

// One HARQ round as seen by the receiver: the received samples, the
// channel coefficient of the round, and which messages were superimposed
// at which amplitudes. At most two constituents.
struct RoundRecord {
    SymbolBlock y;
    cplx h{1.0, 0.0};
    std::vector<Constituent> constituents;

    const Constituent* find(std::uint32_t message_id) const;
    Constituent* find(std::uint32_t message_id);
};

// Combined = (1 / sum |h_i|^2) * sum h_i^* y_i, per sample. Throws on an
// empty window or an all-zero channel vector.
SymbolBlock mrc_combine(const std::vector<const RoundRecord*>& records);
SymbolBlock mrc_combine(const std::vector<RoundRecord>& records);

// Subtracts h * amplitude * known_symbols of the given message from the
// stored samples and flags the constituent cancelled. Throws if the
// message is not present or was already cancelled.
void sic_cancel(RoundRecord& record, std::uint32_t message_id,
                const SymbolBlock& known_symbols);

struct SinrResult {
    double gamma = 0.0;  // linear SINR; +infinity when noise-free
    std::vector<std::size_t> window;

    bool infinite() const { return std::isinf(gamma); }
};

// Post-MRC SINR with per-round signal amplitudes a_i and per-round
// coherent (chase-combined) interference amplitudes b_i:
//
//   gamma = (sum a_i |h_i|^2)^2 / ((sum b_i |h_i|^2)^2 + sum |h_i|^2)
//
// Constant a_i = sqrt((1-alpha^2) P), b_i = alpha sqrt(P) gives the SINR
// of the new message; b_i = 0 gives the post-SIC SNR of the old message;
// b_i nonzero on a sub-window gives the one-SIC-failure SINR.
SinrResult sinr_general(const std::vector<cplx>& h, const std::vector<double>& a,
                        const std::vector<double>& b);

// Same combiner with several independent interferers; each group is only
// coherent within itself, so the squared sums add per group.
SinrResult sinr_general_multi(const std::vector<cplx>& h, const std::vector<double>& a,
                              const std::vector<std::vector<double>>& interference_groups);

// Monte Carlo SINR estimate: least-squares fit of the combined block
// against the true transmitted reference; gamma from the fitted signal
// power over the residual power. Returns +infinity when the residual
// vanishes.
SinrResult estimate_post_mrc_sinr(const SymbolBlock& combined, const SymbolBlock& reference);

}  // namespace nharq
