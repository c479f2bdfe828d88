#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "brw/config.hpp"

namespace brw {

inline constexpr const char* kVersion = "0.1.0";

// Command-line overrides applied on top of a parsed config.
struct RunOverrides {
    std::optional<int> depth;
    std::optional<double> beta;
    std::optional<long long> replicates;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
};

// One experiment's output: CSV table plus a JSON summary with stable key
// order. Runtime is reported in the summary only, never in the CSV, so
// repeated runs produce identical tables.
struct ResultRecord {
    std::string experiment;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    nlohmann::ordered_json summary;
};

// Shortest decimal string that round-trips the value.
std::string format_double(double v);

ResultRecord run_experiment(const ConfigMap& config,
                            const RunOverrides& overrides = {});

// Cross-record report. All records must come from the same experiment;
// multi-record reports add trend fields where they make sense.
nlohmann::ordered_json summarize(const std::vector<ResultRecord>& records);

void write_csv(const ResultRecord& record, std::ostream& out);

} // namespace brw
