#pragma once

#include <complex>
#include <vector>

#include "nharq/rng.hpp"

namespace nharq {

using cplx = std::complex<double>;
using SymbolBlock = std::vector<cplx>;

enum class ChannelKind {
    AwgnFixed,      // h = 1 every round, noise only
    RayleighBlock,  // h redrawn i.i.d. CN(0, mean_square_gain) per round
};

struct ChannelModel {
    ChannelKind kind = ChannelKind::AwgnFixed;
    double mean_square_gain = 1.0;
};

// One channel coefficient for a HARQ round (block fading: constant within
// the round, independent across rounds).
cplx sample_channel(const ChannelModel& model, RngStream& rng);

// Adds unit-variance complex AWGN per sample (CN(0,1), i.e. variance 0.5
// per real dimension). Noise variance is fixed at 1; transmit power is the
// only SNR knob.
SymbolBlock add_noise(const SymbolBlock& symbols, RngStream& rng);

}  // namespace nharq
