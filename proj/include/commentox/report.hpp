#pragma once

#include <string>
#include <vector>

#include "commentox/config.hpp"
#include "commentox/corpus.hpp"

namespace ctox {

inline constexpr const char* kToolVersion = "0.1.0";

struct ReportTable {
    std::string name;
    std::string path;    // relative to the output directory; "" if not written
    std::string status;  // "ok", "requires labels", "failed"
    std::string error;   // detail when status == "failed"
};

struct Report {
    std::vector<ReportTable> tables;
    std::string tool_version;
    std::string config_hash;         // hash of the config snapshot
    std::string corpus_fingerprint;  // combined hash of the input files
    bool ok = false;                 // every table landed
};

// Runs every analysis over the corpus and writes one file per table under
// config.out, plus config.toml (the effective config snapshot) and
// report.json (the index below). Analyses beyond the corpus breakdown need
// a fully labeled corpus; otherwise they are flagged "requires labels".
// A failing analysis is recorded and does not stop the others.
Report report_all(const Corpus& corpus, const RunConfig& config);

std::string render_report_json(const Report& report);

// Bootstrap grid over every channel category x (all labels + each label).
// Cells whose pool is empty keep their row with blank statistics.
std::string render_bootstrap_grid_csv(const Corpus& corpus, uint64_t sample_size,
                                      uint64_t repetitions, uint64_t seed);

// Non-appropriate fraction summaries for the two skewed leaning groups,
// overall and restricted to each channel category.
std::string render_leaning_csv(const Corpus& corpus);

// Per-discussion comment count and mean toxicity.
std::string render_discussions_csv(const Corpus& corpus);

}  // namespace ctox
