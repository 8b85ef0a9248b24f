#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ctox {

// Everything a run can be told, mirroring the command-line flags. The
// effective configuration is snapshotted as TOML next to a run's outputs,
// so any published result can be reproduced from its output directory.
struct RunConfig {
    // inputs
    std::string channels;
    std::string videos;
    std::string comments;
    std::string labels;
    std::string annotations;
    std::string category_split;  // questionable channel-id list override
    std::string lexicon;
    std::string predictions;  // labels.csv-format model output for cv
    std::string synth_spec;
    std::string fixtures;  // canned-response directory for collect
    std::string host;      // remote host for collect (fixtures win if both)

    // outputs
    std::string out;

    // shared knobs
    std::optional<uint64_t> seed;
    int bins = 24;
    double trim = 0.20;

    // subcommand knobs
    double cutoff = 0.99;          // delay cutoff quantile (regress)
    int shuffles = 100;            // random-label draws per cell (regress)
    int sample_size = 7500;        // bootstrap draw size (delays)
    int repetitions = 1000;        // bootstrap repetitions (delays)
    bool bootstrap = false;        // add bootstrap table to delays
    std::string group_by = "label_category";  // delays grouping
    std::string time_bin = "week";            // timeseries: week|day
    bool per_label = false;                   // concentration: per-label curves
    int density_bins = 50;                    // users: joint-density grid
    std::string constant_label;               // cv: constant baseline label
    std::vector<std::string> keywords;        // collect: search terms
    int max_depth = 2;                        // collect: crawl depth
    int max_videos = 0;                       // collect: crawl cap (0 = none)
    double rate = 0.0;                        // collect: requests/s (0 = off)
    std::string window_from;                  // collect: ISO lower bound
    std::string window_to;                    // collect: ISO upper bound
    int annotators = 8;                       // plan-annotation
    int redundancy = 2;                       // plan-annotation
    int target_comments = 1000;               // plan-annotation eval sample
};

// One value from the flat TOML subset this tool reads: scalars and string
// arrays only, no tables.
struct TomlValue {
    enum class Kind { String, Integer, Float, Boolean, StringArray };
    Kind kind = Kind::String;
    std::string str;
    int64_t integer = 0;
    double real = 0.0;
    bool boolean = false;
    std::vector<std::string> array;
};

// Parses `key = value` lines with # comments. Strings are double-quoted
// with \\ \" \n \t escapes; arrays hold strings only. Tables ([section])
// and other TOML features are rejected with a ParseError naming the line.
std::map<std::string, TomlValue> parse_toml(const std::string& text,
                                            const std::string& origin);
std::map<std::string, TomlValue> load_toml(const std::string& path);

// Applies recognized keys onto `config`. Unknown keys or mismatched value
// kinds throw ValidationError naming the key.
void apply_toml(RunConfig& config, const std::map<std::string, TomlValue>& values,
                const std::string& origin);

// TOML snapshot of the effective configuration; parse_toml/apply_toml of
// the result reproduces `config`.
std::string render_config_toml(const RunConfig& config);

}  // namespace ctox
