// Python bindings for the main operations: framing, QPSK, combining,
// closed-form SINR, and the Monte Carlo sweep.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nharq/channel.hpp"
#include "nharq/framing.hpp"
#include "nharq/harq.hpp"
#include "nharq/metrics_io.hpp"
#include "nharq/phy.hpp"
#include "nharq/sim.hpp"

namespace py = pybind11;
using namespace nharq;

namespace {

FrameConfig make_frame_config(std::size_t payload_bits, const std::string& fec) {
    FrameConfig cfg;
    cfg.payload_bits = payload_bits;
    cfg.fec = fec == "rep3" ? FecScheme::Repetition3 : FecScheme::Identity;
    cfg.validate();
    return cfg;
}

py::dict row_to_dict(const MetricsRow& row) {
    py::dict d;
    d["scheme"] = row.scheme;
    d["snr_db"] = row.snr_db;
    d["ber"] = row.ber;
    d["se"] = row.se;
    d["avg_rounds"] = row.avg_rounds;
    d["abandon_rate"] = row.abandon_rate;
    d["frames"] = row.frames;
    d["seed"] = row.seed;
    return d;
}

}  // namespace

PYBIND11_MODULE(_nharq, m) {
    m.doc() = "Link-level N-HARQ-CC simulator core";

    m.def("crc32", [](py::bytes data) {
        const std::string s = data;
        return crc32(ByteVec(s.begin(), s.end()));
    }, py::arg("data"));

    m.def("whiten", &whiten, py::arg("bits"));
    m.def("fec_encode", [](const BitVec& bits, const std::string& scheme) {
        return fec_encode(bits, scheme == "rep3" ? FecScheme::Repetition3
                                                 : FecScheme::Identity);
    }, py::arg("bits"), py::arg("scheme") = "none");
    m.def("fec_decode", [](const BitVec& bits, const std::string& scheme) {
        return fec_decode(bits, scheme == "rep3" ? FecScheme::Repetition3
                                                 : FecScheme::Identity);
    }, py::arg("bits"), py::arg("scheme") = "none");

    m.def("build_frame",
          [](py::bytes payload, std::uint16_t seq, std::size_t payload_bits,
             const std::string& fec, std::uint8_t round_index) {
              const std::string s = payload;
              const Frame frame = build_frame(ByteVec(s.begin(), s.end()),
                                              make_frame_config(payload_bits, fec),
                                              seq, round_index);
              return frame.encoded_bits;
          },
          py::arg("payload"), py::arg("seq") = 0, py::arg("payload_bits") = 200,
          py::arg("fec") = "none", py::arg("round_index") = 0);

    m.def("parse_frame",
          [](const BitVec& bits, std::size_t payload_bits, const std::string& fec) {
              const ParseResult r =
                  parse_frame(bits, make_frame_config(payload_bits, fec));
              py::dict d;
              d["status"] = r.status == ParseStatus::Ok        ? "ok"
                            : r.status == ParseStatus::BadCrc ? "bad-crc"
                                                              : "bad-header";
              d["seq"] = r.seq;
              d["payload"] = py::bytes(std::string(r.payload.begin(), r.payload.end()));
              return d;
          },
          py::arg("bits"), py::arg("payload_bits") = 200, py::arg("fec") = "none");

    m.def("qpsk_modulate", &qpsk_modulate, py::arg("bits"));
    m.def("qpsk_demodulate", &qpsk_demodulate, py::arg("symbols"));

    m.def("superimpose",
          [](const SymbolBlock& x_old, const SymbolBlock& x_new, double alpha,
             double power) {
              return superimpose(x_old, x_new, SuperpositionSpec{alpha, power});
          },
          py::arg("x_old"), py::arg("x_new"), py::arg("alpha"), py::arg("power"));

    m.def("sinr_general",
          [](const std::vector<cplx>& h, const std::vector<double>& a,
             const std::vector<double>& b) { return sinr_general(h, a, b).gamma; },
          py::arg("h"), py::arg("a"), py::arg("b"));

    m.def("sweep",
          [](const std::string& scheme, const std::vector<double>& snr_db,
             double alpha2, int max_rounds, std::size_t frames,
             const std::string& decoder, const std::string& channel,
             const std::string& fec, double rate_override, std::uint64_t seed,
             unsigned jobs) {
              SimConfig cfg;
              cfg.scheme = scheme == "type1"     ? Scheme::Type1
                           : scheme == "harq-cc" ? Scheme::HarqCc
                           : scheme == "cc"      ? Scheme::HarqCc
                                                 : Scheme::NHarqCc;
              cfg.snr_db_grid = snr_db;
              cfg.alpha2 = alpha2;
              cfg.max_rounds = max_rounds;
              cfg.frames = frames;
              cfg.decoder.kind = decoder == "bitlevel" ? DecoderModel::Kind::BitLevel
                                                        : DecoderModel::Kind::Threshold;
              if (rate_override > 0.0) {
                  cfg.decoder.rate_bits_per_symbol = 2.0 * rate_override;
              }
              cfg.channel.kind = channel == "rayleigh" ? ChannelKind::RayleighBlock
                                                        : ChannelKind::AwgnFixed;
              cfg.frame.fec = fec == "rep3" ? FecScheme::Repetition3
                                            : FecScheme::Identity;
              cfg.seed = seed;
              const auto rows = sweep(cfg, jobs);
              py::list out;
              for (const auto& row : rows) {
                  out.append(row_to_dict(row));
              }
              return out;
          },
          py::arg("scheme") = "n-cc", py::arg("snr_db"), py::arg("alpha2") = 0.2,
          py::arg("max_rounds") = 3, py::arg("frames") = 1757,
          py::arg("decoder") = "threshold", py::arg("channel") = "awgn",
          py::arg("fec") = "none", py::arg("rate_override") = 0.0,
          py::arg("seed") = 0, py::arg("jobs") = 1);

    m.def("render_csv", [](py::list rows_in) {
        std::vector<MetricsRow> rows;
        for (auto item : rows_in) {
            py::dict d = item.cast<py::dict>();
            MetricsRow row;
            row.scheme = d["scheme"].cast<std::string>();
            row.snr_db = d["snr_db"].cast<double>();
            row.ber = d["ber"].cast<double>();
            row.se = d["se"].cast<double>();
            row.avg_rounds = d["avg_rounds"].cast<double>();
            row.abandon_rate = d["abandon_rate"].cast<double>();
            row.frames = d["frames"].cast<std::size_t>();
            row.seed = d["seed"].cast<std::uint64_t>();
            rows.push_back(std::move(row));
        }
        return render_csv(rows);
    }, py::arg("rows"));
}
