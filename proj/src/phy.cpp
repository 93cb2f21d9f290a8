#include "nharq/phy.hpp"

#include <cmath>
#include <stdexcept>

namespace nharq {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}

SymbolBlock qpsk_modulate(const BitVec& bits) {
    if (bits.size() % 2 != 0) {
        throw std::invalid_argument("qpsk_modulate: odd bit count");
    }
    SymbolBlock out;
    out.reserve(bits.size() / 2);
    for (std::size_t i = 0; i < bits.size(); i += 2) {
        const double im = bits[i] ? -kInvSqrt2 : kInvSqrt2;
        const double re = bits[i + 1] ? -kInvSqrt2 : kInvSqrt2;
        out.emplace_back(re, im);
    }
    return out;
}

BitVec qpsk_demodulate(const SymbolBlock& symbols) {
    BitVec out;
    out.reserve(symbols.size() * 2);
    for (const cplx& s : symbols) {
        out.push_back(s.imag() < 0.0 ? 1 : 0);
        out.push_back(s.real() < 0.0 ? 1 : 0);
    }
    return out;
}

SymbolBlock superimpose(const SymbolBlock& x_old, const SymbolBlock& x_new,
                        const SuperpositionSpec& spec) {
    if (x_old.size() != x_new.size()) {
        throw std::invalid_argument("superimpose: length mismatch");
    }
    const double a_old = spec.amplitude_old();
    const double a_new = spec.amplitude_new();
    SymbolBlock out;
    out.reserve(x_old.size());
    for (std::size_t i = 0; i < x_old.size(); ++i) {
        out.push_back(a_old * x_old[i] + a_new * x_new[i]);
    }
    return out;
}

const Constituent* RoundRecord::find(std::uint32_t message_id) const {
    for (const Constituent& c : constituents) {
        if (c.message_id == message_id) {
            return &c;
        }
    }
    return nullptr;
}

Constituent* RoundRecord::find(std::uint32_t message_id) {
    for (Constituent& c : constituents) {
        if (c.message_id == message_id) {
            return &c;
        }
    }
    return nullptr;
}

SymbolBlock mrc_combine(const std::vector<const RoundRecord*>& records) {
    if (records.empty()) {
        throw std::invalid_argument("mrc_combine: empty window");
    }
    const std::size_t n = records.front()->y.size();
    double norm2 = 0.0;
    for (const RoundRecord* rec : records) {
        if (rec->y.size() != n) {
            throw std::invalid_argument("mrc_combine: block length mismatch");
        }
        norm2 += std::norm(rec->h);
    }
    if (norm2 <= 0.0) {
        throw std::invalid_argument("mrc_combine: zero channel norm");
    }
    SymbolBlock out(n, cplx{0.0, 0.0});
    for (const RoundRecord* rec : records) {
        const cplx w = std::conj(rec->h);
        for (std::size_t i = 0; i < n; ++i) {
            out[i] += w * rec->y[i];
        }
    }
    for (cplx& s : out) {
        s /= norm2;
    }
    return out;
}

SymbolBlock mrc_combine(const std::vector<RoundRecord>& records) {
    std::vector<const RoundRecord*> ptrs;
    ptrs.reserve(records.size());
    for (const RoundRecord& rec : records) {
        ptrs.push_back(&rec);
    }
    return mrc_combine(ptrs);
}

void sic_cancel(RoundRecord& record, std::uint32_t message_id,
                const SymbolBlock& known_symbols) {
    Constituent* c = record.find(message_id);
    if (c == nullptr) {
        throw std::invalid_argument("sic_cancel: message not in record");
    }
    if (c->cancelled) {
        throw std::logic_error("sic_cancel: message already cancelled");
    }
    if (!record.y.empty()) {
        if (known_symbols.size() != record.y.size()) {
            throw std::invalid_argument("sic_cancel: symbol length mismatch");
        }
        const cplx scale = record.h * c->amplitude;
        for (std::size_t i = 0; i < record.y.size(); ++i) {
            record.y[i] -= scale * known_symbols[i];
        }
    }
    c->cancelled = true;
}

SinrResult sinr_general(const std::vector<cplx>& h, const std::vector<double>& a,
                        const std::vector<double>& b) {
    return sinr_general_multi(h, a, {b});
}

SinrResult sinr_general_multi(const std::vector<cplx>& h, const std::vector<double>& a,
                              const std::vector<std::vector<double>>& interference_groups) {
    if (h.empty()) {
        throw std::invalid_argument("sinr_general: empty window");
    }
    if (a.size() != h.size()) {
        throw std::invalid_argument("sinr_general: dimension mismatch");
    }
    for (const auto& g : interference_groups) {
        if (g.size() != h.size()) {
            throw std::invalid_argument("sinr_general: dimension mismatch");
        }
    }
    double norm2 = 0.0;
    double signal = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double g2 = std::norm(h[i]);
        norm2 += g2;
        signal += a[i] * g2;
    }
    if (norm2 <= 0.0) {
        throw std::invalid_argument("sinr_general: zero channel norm");
    }
    double interference = 0.0;
    for (const auto& g : interference_groups) {
        double coherent = 0.0;
        for (std::size_t i = 0; i < h.size(); ++i) {
            coherent += g[i] * std::norm(h[i]);
        }
        interference += coherent * coherent;
    }
    SinrResult result;
    result.gamma = signal * signal / (interference + norm2);
    result.window.resize(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        result.window[i] = i;
    }
    return result;
}

SinrResult estimate_post_mrc_sinr(const SymbolBlock& combined, const SymbolBlock& reference) {
    if (combined.size() != reference.size()) {
        throw std::invalid_argument("estimate_post_mrc_sinr: length mismatch");
    }
    if (combined.empty()) {
        throw std::invalid_argument("estimate_post_mrc_sinr: empty block");
    }
    cplx cross{0.0, 0.0};
    double ref_pow = 0.0;
    for (std::size_t i = 0; i < combined.size(); ++i) {
        cross += std::conj(reference[i]) * combined[i];
        ref_pow += std::norm(reference[i]);
    }
    const cplx coeff = cross / ref_pow;
    double resid_pow = 0.0;
    for (std::size_t i = 0; i < combined.size(); ++i) {
        resid_pow += std::norm(combined[i] - coeff * reference[i]);
    }
    const double n = static_cast<double>(combined.size());
    SinrResult result;
    const double mean_ref = ref_pow / n;
    const double mean_resid = resid_pow / n;
    if (mean_resid <= 0.0) {
        result.gamma = std::numeric_limits<double>::infinity();
    } else {
        result.gamma = std::norm(coeff) * mean_ref / mean_resid;
    }
    return result;
}

}  // namespace nharq
