#include "nharq/channel.hpp"

namespace nharq {

cplx sample_channel(const ChannelModel& model, RngStream& rng) {
    switch (model.kind) {
        case ChannelKind::AwgnFixed:
            return {1.0, 0.0};
        case ChannelKind::RayleighBlock:
            return rng.complex_gaussian(model.mean_square_gain);
    }
    return {1.0, 0.0};
}

SymbolBlock add_noise(const SymbolBlock& symbols, RngStream& rng) {
    SymbolBlock out;
    out.reserve(symbols.size());
    for (const cplx& s : symbols) {
        out.push_back(s + rng.complex_gaussian(1.0));
    }
    return out;
}

}  // namespace nharq
