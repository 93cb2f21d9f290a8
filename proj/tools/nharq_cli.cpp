// Command-line front end: parses a sweep configuration, runs the Monte
// Carlo simulation, and emits CSV or JSON metrics.

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nharq/metrics_io.hpp"
#include "nharq/sim.hpp"

namespace {

// "a:b:s" in dB, inclusive of b when it lands on the grid; a single
// value is also accepted.
std::vector<double> parse_snr_grid(const std::string& text) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ':')) {
        std::size_t used = 0;
        double v = std::stod(token, &used);
        if (used != token.size()) {
            throw CLI::ValidationError("--snr", "malformed SNR value: " + token);
        }
        parts.push_back(v);
    }
    if (parts.size() == 1) {
        return parts;
    }
    if (parts.size() != 3) {
        throw CLI::ValidationError("--snr", "expected a single value or start:stop:step");
    }
    const double start = parts[0], stop = parts[1], step = parts[2];
    if (step <= 0.0 || stop < start) {
        throw CLI::ValidationError("--snr", "need stop >= start and step > 0");
    }
    std::vector<double> grid;
    for (int i = 0;; ++i) {
        const double v = start + step * i;
        if (v > stop + 1e-9) {
            break;
        }
        grid.push_back(v);
    }
    return grid;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"N-HARQ-CC link-level simulator"};

    std::string scheme = "n-cc";
    std::string snr = "4:14:1";
    double alpha2 = 0.2;
    int max_rounds = 3;
    std::size_t frames = 1757;
    std::string decoder = "threshold";
    std::string channel = "awgn";
    std::string fec = "none";
    double rate_override = 0.0;
    std::uint64_t seed = 0;
    std::string out_path;
    std::string format = "csv";
    bool eq7 = false;
    unsigned jobs = 1;

    app.add_option("--scheme", scheme, "Transmission scheme")
        ->check(CLI::IsMember({"type1", "cc", "n-cc"}))
        ->capture_default_str();
    app.add_option("--snr", snr, "SNR grid in dB: value or start:stop:step")
        ->capture_default_str();
    app.add_option("--alpha2", alpha2, "Power fraction of the old packet, in (0, 0.5)")
        ->capture_default_str();
    app.add_option("--max-rounds", max_rounds, "HARQ round cap M per message")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--frames", frames, "Messages per grid point")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--decoder", decoder, "Decode model")
        ->check(CLI::IsMember({"threshold", "bitlevel"}))
        ->capture_default_str();
    app.add_option("--channel", channel, "Channel model")
        ->check(CLI::IsMember({"awgn", "rayleigh"}))
        ->capture_default_str();
    app.add_option("--fec", fec, "FEC scheme")
        ->check(CLI::IsMember({"none", "rep3"}))
        ->capture_default_str();
    app.add_option("--rate-override", rate_override,
                   "Code rate override for the threshold model and SE normalization");
    app.add_option("--seed", seed, "RNG seed")->capture_default_str();
    app.add_option("--out", out_path, "Output file (default: stdout)");
    app.add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_flag("--eq7-constant-amplitude", eq7,
                 "Use a constant old-packet amplitude across the whole combining window");
    app.add_option("--jobs", jobs, "Worker threads across grid points")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        nharq::SimConfig cfg;
        cfg.scheme = scheme == "type1"  ? nharq::Scheme::Type1
                     : scheme == "cc"   ? nharq::Scheme::HarqCc
                                        : nharq::Scheme::NHarqCc;
        cfg.snr_db_grid = parse_snr_grid(snr);
        if (cfg.scheme == nharq::Scheme::NHarqCc && (alpha2 <= 0.0 || alpha2 >= 0.5)) {
            std::cerr << "error: --alpha2 must lie in (0, 0.5): the old packet may not "
                         "carry as much power as the new one\n";
            return 2;
        }
        cfg.alpha2 = alpha2;
        cfg.max_rounds = max_rounds;
        cfg.frames = frames;
        cfg.decoder.kind = decoder == "bitlevel" ? nharq::DecoderModel::Kind::BitLevel
                                                 : nharq::DecoderModel::Kind::Threshold;
        if (rate_override != 0.0) {
            if (rate_override <= 0.0) {
                std::cerr << "error: --rate-override must be positive\n";
                return 2;
            }
            cfg.decoder.rate_bits_per_symbol = 2.0 * rate_override;
        }
        cfg.channel.kind = channel == "rayleigh" ? nharq::ChannelKind::RayleighBlock
                                                 : nharq::ChannelKind::AwgnFixed;
        cfg.frame.fec = fec == "rep3" ? nharq::FecScheme::Repetition3
                                      : nharq::FecScheme::Identity;
        cfg.seed = seed;
        cfg.eq7_constant_amplitude = eq7;
        cfg.validate();

        const std::vector<nharq::MetricsRow> rows = nharq::sweep(cfg, jobs);

        nharq::OutputSpec spec;
        spec.path = out_path;
        spec.format = format == "json" ? nharq::OutputFormat::Json
                                       : nharq::OutputFormat::Csv;
        nharq::emit(rows, spec);
        return 0;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
