#include "nharq/metrics_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace nharq {

namespace {

std::string fmt10(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

std::string render_csv(const std::vector<MetricsRow>& rows) {
    std::ostringstream out;
    out << "scheme,snr_db,ber,se,avg_rounds,abandon_rate,frames,seed\n";
    for (const MetricsRow& r : rows) {
        out << r.scheme << ',' << fmt10(r.snr_db) << ',' << fmt10(r.ber) << ','
            << fmt10(r.se) << ',' << fmt10(r.avg_rounds) << ','
            << fmt10(r.abandon_rate) << ',' << r.frames << ',' << r.seed << '\n';
    }
    return out.str();
}

std::string render_json(const std::vector<MetricsRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const MetricsRow& r : rows) {
        // Round through the same 10-significant-digit formatting as the
        // CSV so both formats carry identical values.
        nlohmann::json obj;
        obj["scheme"] = r.scheme;
        obj["snr_db"] = std::strtod(fmt10(r.snr_db).c_str(), nullptr);
        obj["ber"] = std::strtod(fmt10(r.ber).c_str(), nullptr);
        obj["se"] = std::strtod(fmt10(r.se).c_str(), nullptr);
        obj["avg_rounds"] = std::strtod(fmt10(r.avg_rounds).c_str(), nullptr);
        obj["abandon_rate"] = std::strtod(fmt10(r.abandon_rate).c_str(), nullptr);
        obj["frames"] = r.frames;
        obj["seed"] = r.seed;
        arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
}

void emit(const std::vector<MetricsRow>& rows, const OutputSpec& spec) {
    const std::string body =
        spec.format == OutputFormat::Csv ? render_csv(rows) : render_json(rows);
    if (spec.path.empty()) {
        std::cout << body;
        std::cout.flush();
        return;
    }
    std::ofstream file(spec.path, std::ios::binary);
    if (!file) {
        throw std::runtime_error("cannot open output file: " + spec.path);
    }
    file << body;
    if (!file) {
        throw std::runtime_error("write failed: " + spec.path);
    }
}

}  // namespace nharq
