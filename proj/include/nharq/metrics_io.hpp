#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nharq/sim.hpp"

namespace nharq {

enum class OutputFormat { Csv, Json };

struct OutputSpec {
    std::string path;  // empty: standard output
    OutputFormat format = OutputFormat::Csv;
};

// CSV header is exactly
//   scheme,snr_db,ber,se,avg_rounds,abandon_rate,frames,seed
// floats carry 10 significant digits, rows in grid order. JSON is an
// array of objects with the same keys and the same rounded values.
std::string render_csv(const std::vector<MetricsRow>& rows);
std::string render_json(const std::vector<MetricsRow>& rows);

// Writes to spec.path, or to stdout when the path is empty. Throws
// std::runtime_error with the path on I/O failure.
void emit(const std::vector<MetricsRow>& rows, const OutputSpec& spec);

}  // namespace nharq
