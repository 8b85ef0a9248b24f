#include "commentox/cli.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "commentox/annotation.hpp"
#include "commentox/behavior.hpp"
#include "commentox/collector.hpp"
#include "commentox/config.hpp"
#include "commentox/corpus.hpp"
#include "commentox/csv.hpp"
#include "commentox/errors.hpp"
#include "commentox/report.hpp"
#include "commentox/rng.hpp"
#include "commentox/strutil.hpp"
#include "commentox/synth.hpp"
#include "commentox/timeutil.hpp"
#include "commentox/toxicity.hpp"

namespace ctox {

namespace {

using ordered_json = nlohmann::ordered_json;

void log_line(const std::string& msg) { std::cerr << "commentox: " << msg << "\n"; }

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << content;
    out.flush();
    if (!out) throw ValidationError("short write to '" + path + "'");
}

// Collects the flags of one subcommand and replays the explicitly given
// ones over the config-file values, so flags always win.
class OptionSet {
public:
    explicit OptionSet(CLI::App* cmd) : cmd_(cmd) {
        cmd_->add_option("--config", config_path_,
                         "TOML config file; explicit flags override it");
    }

    template <typename T>
    CLI::Option* add(const std::string& flag, T RunConfig::*field,
                     const std::string& desc) {
        CLI::Option* opt = cmd_->add_option(flag, staging_.*field, desc);
        overrides_.emplace_back(opt, [field](RunConfig& dst, const RunConfig& src) {
            dst.*field = src.*field;
        });
        return opt;
    }

    CLI::Option* add_flag(const std::string& flag, bool RunConfig::*field,
                          const std::string& desc) {
        CLI::Option* opt = cmd_->add_flag(flag, staging_.*field, desc);
        overrides_.emplace_back(opt, [field](RunConfig& dst, const RunConfig& src) {
            dst.*field = src.*field;
        });
        return opt;
    }

    CLI::Option* add_seed(bool required) {
        CLI::Option* opt = cmd_->add_option(
            "--seed", seed_, "random seed (runs are deterministic per seed)");
        if (required) opt->required();
        overrides_.emplace_back(opt, [this](RunConfig& dst, const RunConfig&) {
            dst.seed = seed_;
        });
        return opt;
    }

    // Effective config: defaults, then the config file, then explicit flags.
    RunConfig effective() const {
        RunConfig cfg;
        if (!config_path_.empty()) apply_toml(cfg, load_toml(config_path_), config_path_);
        for (const auto& [opt, apply] : overrides_)
            if (opt->count() > 0) apply(cfg, staging_);
        return cfg;
    }

private:
    CLI::App* cmd_;
    RunConfig staging_;
    std::string config_path_;
    uint64_t seed_ = 0;
    std::vector<std::pair<
        CLI::Option*, std::function<void(RunConfig&, const RunConfig&)>>>
        overrides_;
};

void add_corpus_inputs(OptionSet& opts) {
    opts.add("--channels", &RunConfig::channels, "channels.csv path");
    opts.add("--videos", &RunConfig::videos, "videos.jsonl path");
    opts.add("--comments", &RunConfig::comments, "comments.jsonl path");
    opts.add("--labels", &RunConfig::labels, "labels.csv to attach (optional)");
    opts.add("--category-split", &RunConfig::category_split,
             "file listing questionable channel ids, one per line; "
             "overrides the categories in channels.csv");
}

void add_out(OptionSet& opts) {
    opts.add("--out", &RunConfig::out, "output directory");
}

std::string require_path(const std::string& value, const char* flag) {
    if (value.empty())
        throw UsageError(std::string("missing required flag ") + flag);
    return value;
}

std::string ensure_out(const RunConfig& cfg) {
    if (cfg.out.empty()) throw UsageError("missing required flag --out");
    std::filesystem::create_directories(cfg.out);
    return cfg.out;
}

uint64_t require_seed(const RunConfig& cfg) {
    if (!cfg.seed)
        throw UsageError("this subcommand is randomized and needs an explicit --seed");
    return *cfg.seed;
}

void snapshot_config(const RunConfig& cfg) {
    write_text(cfg.out + "/config.toml", render_config_toml(cfg));
}

// Re-splits channel categories from a file of questionable channel ids.
Corpus apply_category_split(const Corpus& corpus, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read category split '" + path + "'");
    std::unordered_set<std::string> questionable;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!corpus.find_channel(line))
            throw ValidationError("category split names unknown channel '" + line +
                                  "'");
        questionable.insert(line);
    }
    CorpusBuilder builder;
    for (const Channel& ch : corpus.channels())
        builder.add_channel(ch.id, questionable.count(ch.id)
                                       ? ChannelCategory::Questionable
                                       : ChannelCategory::Reliable);
    for (const Video& v : corpus.videos())
        builder.add_video(v.id, corpus.channels()[v.channel_index].id, v.title,
                          v.description, v.published_at);
    for (const Comment& c : corpus.comments())
        builder.add_comment(c.id, corpus.video_of(c).id, c.user_id, c.published_at,
                            c.label, c.text);
    return builder.build();
}

Corpus load_inputs(const RunConfig& cfg) {
    Corpus corpus = load_corpus(require_path(cfg.channels, "--channels"),
                                require_path(cfg.videos, "--videos"),
                                require_path(cfg.comments, "--comments"));
    if (!cfg.labels.empty()) {
        AttachResult attached = attach_labels(corpus, cfg.labels);
        log_line("attached " + std::to_string(attached.labeled) + " labels (" +
                 std::to_string(attached.unknown_ids) + " unknown ids skipped)");
        corpus = std::move(attached.corpus);
    }
    if (!cfg.category_split.empty())
        corpus = apply_category_split(corpus, cfg.category_split);
    return corpus;
}

DelayGrouping parse_grouping(const std::string& token) {
    if (token == "all") return DelayGrouping::All;
    if (token == "label") return DelayGrouping::ByLabel;
    if (token == "category") return DelayGrouping::ByCategory;
    if (token == "label_category") return DelayGrouping::ByLabelAndCategory;
    throw UsageError("--group-by must be one of all, label, category, "
                     "label_category (got '" + token + "')");
}

TimeBinKind parse_time_bin(const std::string& token) {
    if (token == "week") return TimeBinKind::IsoWeek;
    if (token == "day") return TimeBinKind::Day;
    throw UsageError("--bin must be week or day (got '" + token + "')");
}

std::string video_ref_jsonl(const VideoRef& v) {
    ordered_json line;
    line["video_id"] = v.video_id;
    line["channel_id"] = v.channel_id;
    line["title"] = v.title;
    line["description"] = v.description;
    line["published_at"] = format_iso8601(v.published_at);
    return line.dump();
}

// --- subcommand bodies ------------------------------------------------------

int cmd_collect(const RunConfig& cfg) {
    ensure_out(cfg);
    snapshot_config(cfg);

    std::unique_ptr<DataSourcePort> base;
    if (!cfg.fixtures.empty()) {
        base = std::make_unique<FixtureSource>(cfg.fixtures);
    } else if (!cfg.host.empty()) {
        HttpSourceOptions options;
        options.host = cfg.host;
        base = std::make_unique<HttpSource>(options);
    } else {
        throw UsageError("collect needs --fixtures DIR or --host HOST");
    }
    RetryingSource::Options retry;
    retry.rate_per_second = cfg.rate;
    RetryingSource source(*base, retry);

    std::vector<std::string> keywords = cfg.keywords;
    if (keywords.empty())
        keywords.assign(default_keywords().begin(), default_keywords().end());

    TimeWindow window;
    if (!cfg.window_from.empty()) window.from = parse_iso8601(cfg.window_from);
    if (!cfg.window_to.empty()) window.to = parse_iso8601(cfg.window_to);

    std::vector<VideoRef> found = search_videos(source, keywords, window);
    log_line("search found " + std::to_string(found.size()) + " videos");

    CrawlOptions crawl;
    crawl.max_depth = cfg.max_depth;
    crawl.max_videos = static_cast<size_t>(cfg.max_videos);
    crawl.checkpoint_path = cfg.out + "/crawl.checkpoint.json";
    std::vector<VideoRef> crawled = crawl_related(source, found, crawl);
    log_line("crawl reached " + std::to_string(crawled.size()) + " videos");

    std::vector<VideoRef> matched = filter_matching(crawled, keywords);
    log_line("keyword filter kept " + std::to_string(matched.size()) + " videos");

    std::string lines;
    for (const VideoRef& v : matched) lines += video_ref_jsonl(v) + "\n";
    write_text(cfg.out + "/videos.jsonl", lines);

    FetchResult fetched = fetch_comments(source, matched, cfg.out + "/comments.jsonl",
                                         cfg.out + "/fetch.checkpoint.json");
    log_line("fetched " + std::to_string(fetched.comments) + " comments from " +
             std::to_string(fetched.videos_completed) + " videos (" +
             std::to_string(fetched.failed_videos.size()) + " failed)");

    ordered_json summary;
    summary["searched"] = found.size();
    summary["crawled"] = crawled.size();
    summary["matched"] = matched.size();
    summary["videos_completed"] = fetched.videos_completed;
    summary["comments"] = fetched.comments;
    summary["failed_videos"] = fetched.failed_videos;
    write_text(cfg.out + "/collect.json", summary.dump(2) + "\n");

    return fetched.failed_videos.empty() ? 0 : 1;
}

int cmd_ingest(const RunConfig& cfg) {
    Corpus corpus = load_inputs(cfg);
    ensure_out(cfg);
    snapshot_config(cfg);
    save_corpus(corpus, cfg.out);
    ordered_json summary;
    summary["channels"] = corpus.channels().size();
    summary["videos"] = corpus.videos().size();
    summary["comments"] = corpus.comments().size();
    summary["labeled_comments"] = corpus.labeled_comment_count();
    write_text(cfg.out + "/ingest.json", summary.dump(2) + "\n");
    log_line("ingested " + std::to_string(corpus.comments().size()) +
             " comments into " + cfg.out);
    return 0;
}

int cmd_validate(const RunConfig& cfg) {
    Corpus corpus = load_inputs(cfg);
    log_line("valid corpus: " + std::to_string(corpus.channels().size()) +
             " channels, " + std::to_string(corpus.videos().size()) + " videos, " +
             std::to_string(corpus.comments().size()) + " comments, " +
             std::to_string(corpus.labeled_comment_count()) + " labeled");
    if (!cfg.out.empty()) {
        ensure_out(cfg);
        snapshot_config(cfg);
        ordered_json summary;
        summary["status"] = "ok";
        summary["channels"] = corpus.channels().size();
        summary["videos"] = corpus.videos().size();
        summary["comments"] = corpus.comments().size();
        summary["labeled_comments"] = corpus.labeled_comment_count();
        write_text(cfg.out + "/validate.json", summary.dump(2) + "\n");
    }
    return 0;
}

int cmd_plan_annotation(const RunConfig& cfg) {
    Corpus corpus = load_inputs(cfg);
    const uint64_t seed = require_seed(cfg);
    ensure_out(cfg);
    snapshot_config(cfg);

    auto lexicon = load_lexicon(require_path(cfg.lexicon, "--lexicon"));
    ScoreSet scores = score_comments(corpus, lexicon);
    if (scores.lexicon_empty)
        log_line("warning: lexicon is empty, every comment screens as clean");

    std::vector<SelectedThread> training =
        select_training_threads(corpus, scores.scores);
    uint64_t training_comments = 0;
    std::string threads_csv =
        join_csv_line({"video_id", "comments", "hateful", "hateful_fraction"}) +
        "\n";
    for (const SelectedThread& t : training) {
        training_comments += t.comments;
        threads_csv += join_csv_line({t.video_id, std::to_string(t.comments),
                                      std::to_string(t.hateful),
                                      fmt_double(t.hateful_fraction)}) +
                       "\n";
    }
    write_text(cfg.out + "/threads.csv", threads_csv);

    ThreadSample sample = sample_evaluation_threads(
        corpus, static_cast<uint64_t>(cfg.target_comments),
        derive_seed(seed, "eval-sample"));
    if (sample.exhausted)
        log_line("warning: evaluation target exceeds the corpus, sampled all of it");

    std::vector<ThreadSize> sizes;
    sizes.reserve(training.size());
    for (const SelectedThread& t : training)
        sizes.push_back({t.video_id, t.comments});
    AnnotatorAssignment assignment =
        assign_annotators(sizes, cfg.annotators, cfg.redundancy,
                          derive_seed(seed, "assignment"));
    write_text(cfg.out + "/assignment.csv",
               render_assignment_csv(sizes, assignment));

    uint64_t min_load = 0, max_load = 0;
    if (!assignment.group_loads.empty()) {
        auto [lo, hi] = std::minmax_element(assignment.group_loads.begin(),
                                            assignment.group_loads.end());
        min_load = *lo;
        max_load = *hi;
    }
    ordered_json plan;
    plan["training"] = {{"threads", training.size()},
                        {"comments", training_comments}};
    plan["evaluation"] = {{"threads", sample.video_ids.size()},
                          {"comments", sample.total_comments},
                          {"exhausted", sample.exhausted},
                          {"video_ids", sample.video_ids}};
    plan["assignment"] = {{"annotators", assignment.annotators},
                          {"redundancy", assignment.redundancy},
                          {"groups", assignment.groups.size()},
                          {"min_group_load", min_load},
                          {"max_group_load", max_load}};
    write_text(cfg.out + "/plan.json", plan.dump(2) + "\n");
    log_line("planned " + std::to_string(training.size()) + " training threads, " +
             std::to_string(sample.video_ids.size()) + " evaluation threads");
    return 0;
}

int cmd_agreement(const RunConfig& cfg) {
    auto records = load_annotations(require_path(cfg.annotations, "--annotations"));
    AgreementReport report = agreement_report(records);
    ensure_out(cfg);
    snapshot_config(cfg);
    ordered_json doc;
    doc["records"] = report.size;
    doc["alpha"] = report.alpha;
    doc["percent_agreement"] = report.acc;
    write_text(cfg.out + "/agreement.json", doc.dump(2) + "\n");
    log_line("alpha " + fmt_double(report.alpha) + ", percent agreement " +
             fmt_double(report.acc));
    return 0;
}

int cmd_cv(const RunConfig& cfg) {
    Corpus corpus = load_inputs(cfg);
    auto records = load_annotations(require_path(cfg.annotations, "--annotations"));

    std::unique_ptr<LabelerPort> labeler;
    if (!cfg.predictions.empty()) {
        labeler = std::make_unique<FileLabeler>(cfg.predictions);
    } else if (!cfg.lexicon.empty()) {
        labeler = std::make_unique<LexiconLabeler>(load_lexicon(cfg.lexicon));
    } else if (!cfg.constant_label.empty()) {
        auto label = parse_hate_label(cfg.constant_label);
        if (!label)
            throw UsageError("--constant-label must name a label (got '" +
                             cfg.constant_label + "')");
        labeler = std::make_unique<ConstantLabeler>(*label);
    } else {
        throw UsageError("cv needs a labeler: --predictions, --lexicon, or "
                         "--constant-label");
    }

    CVReport report = annotator_fold_cv(*labeler, corpus, records);
    ensure_out(cfg);
    snapshot_config(cfg);
    write_text(cfg.out + "/cv.json", render_cv_report_json(report));
    for (const std::string& w : report.warnings) log_line("warning: " + w);
    log_line("cv over " + std::to_string(report.folds.size()) + " folds done");
    return 0;
}

int cmd_delays(const RunConfig& cfg) {
    Corpus corpus = load_inputs(cfg);
    ensure_out(cfg);
    snapshot_config(cfg);
    DelayReport report =
        delay_stats(corpus, parse_grouping(cfg.group_by), cfg.trim);
    write_text(cfg.out + "/delays.csv", render_delay_csv(report));
    log_line("delay stats over " + std::to_string(report.groups.size()) +
             " groups (" + std::to_string(report.negative_excluded) +
             " negative delays excluded)");
    if (cfg.bootstrap) {
        const uint64_t seed = require_seed(cfg);
        write_text(cfg.out + "/bootstrap.csv",
                   render_bootstrap_grid_csv(
                       corpus, static_cast<uint64_t>(cfg.sample_size),
                       static_cast<uint64_t>(cfg.repetitions), seed));
    }
    return 0;
}

int cmd_timeseries(const RunConfig& cfg) {
    Corpus corpus = load_inputs(cfg);
    ensure_out(cfg);
    snapshot_config(cfg);
    TimeSeries series = label_timeseries(corpus, parse_time_bin(cfg.time_bin));
    write_text(cfg.out + "/timeseries.csv", render_timeseries_csv(series));
    log_line(std::to_string(series.bins.size()) + " time bins written");
    return 0;
}

int cmd_concentration(const RunConfig& cfg) {
    Corpus corpus = load_inputs(cfg);
    ensure_out(cfg);
    snapshot_config(cfg);
    auto curves = concentration_curves(corpus, cfg.per_label);
    write_text(cfg.out + "/concentration.csv", render_concentration_csv(curves));
    log_line(std::to_string(curves.size()) + " concentration curves written");
    return 0;
}

int cmd_users(const RunConfig& cfg) {
    Corpus corpus = load_inputs(cfg);
    ensure_out(cfg);
    snapshot_config(cfg);
    std::vector<UserProfile> profiles = user_profiles(corpus);
    write_text(cfg.out + "/profiles.csv", render_profiles_csv(profiles));
    TriangleReport triangle = triangle_projections(profiles);
    write_text(cfg.out + "/triangle.csv", render_triangle_csv(triangle));
    DensityGrid grid = joint_density(profiles, cfg.density_bins, cfg.density_bins);
    write_text(cfg.out + "/density.csv", render_density_csv(grid));
    log_line(std::to_string(profiles.size()) + " user profiles written (" +
             std::to_string(triangle.excluded) + " pure-I users excluded from "
             "the triangle)");
    return 0;
}

int cmd_leaning(const RunConfig& cfg) {
    Corpus corpus = load_inputs(cfg);
    ensure_out(cfg);
    snapshot_config(cfg);
    write_text(cfg.out + "/leaning.csv", render_leaning_csv(corpus));

    std::vector<UserProfile> profiles = user_profiles(corpus);
    std::string users_csv =
        join_csv_line({"group", "target", "user_id", "abar"}) + "\n";
    for (const LeaningInterval& interval : {kReliableSkewed, kQuestionableSkewed}) {
        GroupDistribution dist = group_distribution(corpus, profiles, interval);
        for (size_t i = 0; i < dist.user_ids.size(); ++i)
            users_csv += join_csv_line({interval.to_string(), "overall",
                                        dist.user_ids[i],
                                        fmt_double(dist.abar[i])}) +
                         "\n";
    }
    write_text(cfg.out + "/leaning_users.csv", users_csv);
    return 0;
}

int cmd_toxicity(const RunConfig& cfg) {
    Corpus corpus = load_inputs(cfg);
    ensure_out(cfg);
    snapshot_config(cfg);
    write_text(cfg.out + "/discussions.csv", render_discussions_csv(corpus));
    auto discussions = discussions_of(corpus);
    log_line(std::to_string(discussions.size()) + " discussions written");
    return 0;
}

int cmd_regress(const RunConfig& cfg) {
    Corpus corpus = load_inputs(cfg);
    const uint64_t seed = require_seed(cfg);
    ensure_out(cfg);
    snapshot_config(cfg);

    SuiteOptions options;
    options.n_bins = cfg.bins;
    options.cutoff_quantile = cfg.cutoff;
    options.seed = seed;
    options.shuffles = cfg.shuffles;
    RegressionSuite suite = regression_suite(corpus, options);

    write_text(cfg.out + "/regression.csv", render_regression_csv(suite));
    write_text(cfg.out + "/regression_bins.csv", render_suite_bins_csv(suite));
    std::string null_csv = join_csv_line({"dataset", "x_kind", "shuffles",
                                          "slope_mean", "slope_lo", "slope_hi"}) +
                           "\n";
    for (const SuiteCell& cell : suite.cells) {
        if (!cell.null_band) continue;
        null_csv += join_csv_line({cell.dataset, cell.x_kind,
                                   std::to_string(cell.null_band->shuffles),
                                   fmt_double(cell.null_band->slope_mean),
                                   fmt_double(cell.null_band->slope_lo),
                                   fmt_double(cell.null_band->slope_hi)}) +
                    "\n";
    }
    write_text(cfg.out + "/regression_null.csv", null_csv);

    for (const SuiteCell& cell : suite.cells)
        if (!cell.note.empty())
            log_line("cell " + cell.dataset + "/" + cell.x_kind + "/" + cell.model +
                     " skipped: " + cell.note);
    return 0;
}

int cmd_synth(const RunConfig& cfg) {
    SynthSpec spec = load_synth_spec(require_path(cfg.synth_spec, "--spec"));
    const uint64_t seed = require_seed(cfg);
    ensure_out(cfg);
    snapshot_config(cfg);
    Corpus corpus = synth_corpus(spec, seed);
    save_corpus(corpus, cfg.out);
    write_text(cfg.out + "/synth_spec.json", render_synth_spec_json(spec));
    log_line("synthesized " + std::to_string(corpus.comments().size()) +
             " comments across " + std::to_string(corpus.videos().size()) +
             " videos");
    return 0;
}

int cmd_report_all(const RunConfig& cfg) {
    Corpus corpus = load_inputs(cfg);
    require_seed(cfg);
    if (cfg.out.empty()) throw UsageError("missing required flag --out");
    Report report = report_all(corpus, cfg);
    for (const ReportTable& t : report.tables)
        if (t.status != "ok")
            log_line("table " + t.name + ": " + t.status +
                     (t.error.empty() ? "" : " (" + t.error + ")"));
    log_line(std::string("report ") + (report.ok ? "complete" : "incomplete") +
             " in " + cfg.out);
    return report.ok ? 0 : 1;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"toxicity measurement pipeline for online discussions"};
    app.require_subcommand(1);

    struct SubEntry {
        OptionSet* opts = nullptr;
        std::function<int(const RunConfig&)> handler;
    };
    std::vector<std::unique_ptr<OptionSet>> option_sets;
    std::map<const CLI::App*, SubEntry> entries;

    auto subcommand = [&](const std::string& name, const std::string& desc,
                          std::function<int(const RunConfig&)> handler)
        -> OptionSet& {
        CLI::App* cmd = app.add_subcommand(name, desc);
        option_sets.push_back(std::make_unique<OptionSet>(cmd));
        entries[cmd] = {option_sets.back().get(), std::move(handler)};
        return *option_sets.back();
    };

    {
        OptionSet& o = subcommand("collect", "crawl a data source into raw files",
                                  cmd_collect);
        o.add("--fixtures", &RunConfig::fixtures, "canned-response directory");
        o.add("--host", &RunConfig::host, "remote API host");
        o.add("--keywords", &RunConfig::keywords,
              "search keywords (default: the built-in list)");
        o.add("--depth", &RunConfig::max_depth, "related-video crawl depth");
        o.add("--max-videos", &RunConfig::max_videos, "crawl cap (0 = none)");
        o.add("--rate", &RunConfig::rate, "request rate limit per second (0 = off)");
        o.add("--from", &RunConfig::window_from, "earliest publish time (ISO 8601)");
        o.add("--to", &RunConfig::window_to, "latest publish time (ISO 8601)");
        add_out(o);
    }
    {
        OptionSet& o = subcommand("ingest", "load, validate and canonicalize a corpus",
                                  cmd_ingest);
        add_corpus_inputs(o);
        add_out(o);
    }
    {
        OptionSet& o = subcommand("validate", "check corpus files and exit",
                                  cmd_validate);
        add_corpus_inputs(o);
        add_out(o);
    }
    {
        OptionSet& o = subcommand(
            "plan-annotation", "select threads and balance annotator assignments",
            cmd_plan_annotation);
        add_corpus_inputs(o);
        o.add("--lexicon", &RunConfig::lexicon, "screening lexicon CSV");
        o.add("--target-comments", &RunConfig::target_comments,
              "evaluation sample size in comments");
        o.add("--annotators", &RunConfig::annotators, "annotator count");
        o.add("--redundancy", &RunConfig::redundancy, "annotators per thread");
        o.add_seed(true);
        add_out(o);
    }
    {
        OptionSet& o = subcommand("agreement",
                                  "inter-annotator agreement from annotations",
                                  cmd_agreement);
        o.add("--annotations", &RunConfig::annotations, "annotations.csv path");
        add_out(o);
    }
    {
        OptionSet& o = subcommand(
            "cv", "annotator-fold cross-validation of a labeler", cmd_cv);
        add_corpus_inputs(o);
        o.add("--annotations", &RunConfig::annotations, "annotations.csv path");
        o.add("--predictions", &RunConfig::predictions,
              "labels.csv-format model output");
        o.add("--lexicon", &RunConfig::lexicon, "lexicon for the baseline labeler");
        o.add("--constant-label", &RunConfig::constant_label,
              "constant baseline label (A/I/O/V)");
        add_out(o);
    }
    {
        OptionSet& o = subcommand("delays", "comment delay statistics", cmd_delays);
        add_corpus_inputs(o);
        o.add("--group-by", &RunConfig::group_by,
              "all, label, category, or label_category");
        o.add("--trim", &RunConfig::trim, "upper trim fraction for trimmed means");
        o.add_flag("--bootstrap", &RunConfig::bootstrap,
                   "also bootstrap mean delays per category and label");
        o.add("--sample-size", &RunConfig::sample_size, "bootstrap draw size");
        o.add("--repetitions", &RunConfig::repetitions, "bootstrap repetitions");
        o.add_seed(false);
        add_out(o);
    }
    {
        OptionSet& o = subcommand("timeseries", "label proportions over time",
                                  cmd_timeseries);
        add_corpus_inputs(o);
        o.add("--bin", &RunConfig::time_bin, "week or day");
        add_out(o);
    }
    {
        OptionSet& o = subcommand("concentration",
                                  "comment concentration over channel rank",
                                  cmd_concentration);
        add_corpus_inputs(o);
        o.add_flag("--per-label", &RunConfig::per_label,
                   "emit one curve per hate label too");
        add_out(o);
    }
    {
        OptionSet& o = subcommand("users", "per-user behaviour profiles", cmd_users);
        add_corpus_inputs(o);
        o.add("--density-bins", &RunConfig::density_bins,
              "grid resolution of the joint density");
        add_out(o);
    }
    {
        OptionSet& o = subcommand("leaning",
                                  "non-appropriate fractions by leaning group",
                                  cmd_leaning);
        add_corpus_inputs(o);
        add_out(o);
    }
    {
        OptionSet& o = subcommand("toxicity", "per-discussion toxicity levels",
                                  cmd_toxicity);
        add_corpus_inputs(o);
        add_out(o);
    }
    {
        OptionSet& o = subcommand(
            "regress", "binned toxicity regressions with randomized nulls",
            cmd_regress);
        add_corpus_inputs(o);
        o.add("--bins", &RunConfig::bins, "bin count per axis");
        o.add("--cutoff", &RunConfig::cutoff, "delay cutoff quantile");
        o.add("--shuffles", &RunConfig::shuffles, "label shuffles per random cell");
        o.add_seed(true);
        add_out(o);
    }
    {
        OptionSet& o = subcommand("synth", "generate a synthetic corpus",
                                  cmd_synth);
        o.add("--spec", &RunConfig::synth_spec, "synthesis spec JSON");
        o.add_seed(true);
        add_out(o);
    }
    {
        OptionSet& o = subcommand("report-all", "run every analysis into one report",
                                  cmd_report_all);
        add_corpus_inputs(o);
        o.add("--bins", &RunConfig::bins, "regression bin count");
        o.add("--cutoff", &RunConfig::cutoff, "delay cutoff quantile");
        o.add("--shuffles", &RunConfig::shuffles, "label shuffles per random cell");
        o.add("--trim", &RunConfig::trim, "upper trim fraction");
        o.add("--sample-size", &RunConfig::sample_size, "bootstrap draw size");
        o.add("--repetitions", &RunConfig::repetitions, "bootstrap repetitions");
        o.add("--density-bins", &RunConfig::density_bins, "joint density grid size");
        o.add_seed(true);
        add_out(o);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << std::flush;
        return 2;
    }

    try {
        for (auto& [cmd, entry] : entries)
            if (cmd->parsed()) return entry.handler(entry.opts->effective());
        throw UsageError("no subcommand given");
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace ctox
