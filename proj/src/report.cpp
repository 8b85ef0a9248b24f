#include "commentox/report.hpp"

#include <filesystem>
#include <fstream>
#include <functional>

#include <nlohmann/json.hpp>

#include "commentox/behavior.hpp"
#include "commentox/csv.hpp"
#include "commentox/errors.hpp"
#include "commentox/rng.hpp"
#include "commentox/strutil.hpp"
#include "commentox/timeutil.hpp"
#include "commentox/toxicity.hpp"

namespace ctox {

namespace {

using ordered_json = nlohmann::ordered_json;

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << content;
    out.flush();
    if (!out) throw ValidationError("short write to '" + path + "'");
}

std::string opt_stat(const std::optional<double>& v) {
    return v ? fmt_double(*v) : "";
}

}  // namespace

std::string render_bootstrap_grid_csv(const Corpus& corpus, uint64_t sample_size,
                                      uint64_t repetitions, uint64_t seed) {
    std::string out = join_csv_line({"category", "label", "observations",
                                     "sample_size", "repetitions", "mu_hat",
                                     "sigma_hat"}) +
                      "\n";
    const ChannelCategory categories[] = {ChannelCategory::Questionable,
                                          ChannelCategory::Reliable};
    for (ChannelCategory category : categories) {
        for (int slot = -1; slot < kNumLabels; ++slot) {
            std::optional<HateLabel> label;
            std::string label_field;
            if (slot >= 0) {
                label = static_cast<HateLabel>(slot);
                label_field = label_name(*label);
            }
            const std::string domain = std::string("bootstrap|") +
                                       category_name(category) + "|" +
                                       (label ? label_name(*label) : "all");
            std::vector<std::string> row{category_name(category), label_field};
            try {
                BootstrapStats stats =
                    bootstrap_delay(corpus, category, label, sample_size,
                                    repetitions, derive_seed(seed, domain));
                row.push_back(std::to_string(stats.observations));
                row.push_back(std::to_string(stats.sample_size));
                row.push_back(std::to_string(stats.repetitions));
                row.push_back(fmt_double(stats.mu_hat));
                row.push_back(fmt_double(stats.sigma_hat));
            } catch (const StatError&) {
                row.insert(row.end(), {"0", std::to_string(sample_size),
                                       std::to_string(repetitions), "", ""});
            }
            out += join_csv_line(row) + "\n";
        }
    }
    return out;
}

std::string render_leaning_csv(const Corpus& corpus) {
    std::vector<UserProfile> profiles = user_profiles(corpus);
    std::string out = join_csv_line({"group", "target", "users", "excluded",
                                     "mean_abar", "sd_abar", "skew_abar"}) +
                      "\n";
    const LeaningInterval intervals[] = {kReliableSkewed, kQuestionableSkewed};
    const std::optional<ChannelCategory> targets[] = {
        std::nullopt, ChannelCategory::Questionable, ChannelCategory::Reliable};
    for (const LeaningInterval& interval : intervals) {
        for (const auto& target : targets) {
            GroupDistribution dist =
                group_distribution(corpus, profiles, interval, target);
            std::vector<std::string> row{
                interval.to_string(),
                target ? category_name(*target) : "overall",
                std::to_string(dist.user_ids.size()),
                std::to_string(dist.excluded_no_target)};
            if (dist.stats) {
                row.push_back(fmt_double(dist.stats->mean));
                row.push_back(opt_stat(dist.stats->sd));
                row.push_back(opt_stat(dist.stats->skewness));
            } else {
                row.insert(row.end(), {"", "", ""});
            }
            out += join_csv_line(row) + "\n";
        }
    }
    return out;
}

std::string render_discussions_csv(const Corpus& corpus) {
    std::string out = join_csv_line({"video_id", "comments", "toxicity"}) + "\n";
    for (const Discussion& d : discussions_of(corpus)) {
        out += join_csv_line({d.video_id, std::to_string(d.n()),
                              fmt_double(discussion_toxicity(corpus, d))}) +
               "\n";
    }
    return out;
}

namespace {

std::string combined_input_fingerprint(const RunConfig& config) {
    std::string acc;
    auto add = [&](const char* name, const std::string& path) {
        if (path.empty()) return;
        acc += name;
        acc += ':';
        acc += hex64(fingerprint_file(path));
        acc += ';';
    };
    add("channels", config.channels);
    add("videos", config.videos);
    add("comments", config.comments);
    add("labels", config.labels);
    add("category_split", config.category_split);
    return hex64(fnv1a64(acc));
}

}  // namespace

Report report_all(const Corpus& corpus, const RunConfig& config) {
    if (config.out.empty()) throw UsageError("report-all needs --out");
    if (!config.seed) throw UsageError("report-all needs --seed");
    std::filesystem::create_directories(config.out);

    const uint64_t seed = *config.seed;
    const std::string snapshot = render_config_toml(config);
    write_text(config.out + "/config.toml", snapshot);

    Report report;
    report.tool_version = kToolVersion;
    report.config_hash = hex64(fnv1a64(snapshot));
    report.corpus_fingerprint = combined_input_fingerprint(config);

    const bool labeled = corpus.fully_labeled();
    auto emit = [&](const std::string& name, bool needs_labels,
                    const std::function<std::string()>& render) {
        ReportTable table;
        table.name = name;
        if (needs_labels && !labeled) {
            table.status = "requires labels";
        } else {
            try {
                const std::string file = name + ".csv";
                write_text(config.out + "/" + file, render());
                table.path = file;
                table.status = "ok";
            } catch (const std::exception& e) {
                table.status = "failed";
                table.error = e.what();
            }
        }
        report.tables.push_back(std::move(table));
    };

    emit("breakdown", false,
         [&] { return render_breakdown_csv(breakdown(corpus)); });
    emit("delays", true, [&] {
        return render_delay_csv(
            delay_stats(corpus, DelayGrouping::ByLabelAndCategory, config.trim));
    });
    emit("bootstrap", true, [&] {
        return render_bootstrap_grid_csv(
            corpus, static_cast<uint64_t>(config.sample_size),
            static_cast<uint64_t>(config.repetitions), seed);
    });
    emit("timeseries", true, [&] {
        return render_timeseries_csv(label_timeseries(corpus, TimeBinKind::IsoWeek));
    });
    emit("concentration", true, [&] {
        auto curves = concentration_curves(corpus, true);
        return render_concentration_csv(curves);
    });
    emit("profiles", true, [&] {
        auto profiles = user_profiles(corpus);
        return render_profiles_csv(profiles);
    });
    emit("triangle", true, [&] {
        auto profiles = user_profiles(corpus);
        return render_triangle_csv(triangle_projections(profiles));
    });
    emit("density", true, [&] {
        auto profiles = user_profiles(corpus);
        return render_density_csv(
            joint_density(profiles, config.density_bins, config.density_bins));
    });
    emit("leaning", true, [&] { return render_leaning_csv(corpus); });
    emit("discussions", true, [&] { return render_discussions_csv(corpus); });

    // The regression suite feeds three tables; run it once.
    if (!labeled) {
        for (const char* name : {"regression", "regression_bins", "regression_null"})
            report.tables.push_back({name, "", "requires labels", ""});
    } else {
        try {
            SuiteOptions options;
            options.n_bins = config.bins;
            options.cutoff_quantile = config.cutoff;
            options.seed = seed;
            options.shuffles = config.shuffles;
            RegressionSuite suite = regression_suite(corpus, options);

            write_text(config.out + "/regression.csv", render_regression_csv(suite));
            report.tables.push_back({"regression", "regression.csv", "ok", ""});
            write_text(config.out + "/regression_bins.csv",
                       render_suite_bins_csv(suite));
            report.tables.push_back(
                {"regression_bins", "regression_bins.csv", "ok", ""});

            std::string null_csv =
                join_csv_line({"dataset", "x_kind", "shuffles", "slope_mean",
                               "slope_lo", "slope_hi"}) +
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
            write_text(config.out + "/regression_null.csv", null_csv);
            report.tables.push_back(
                {"regression_null", "regression_null.csv", "ok", ""});
        } catch (const std::exception& e) {
            for (const char* name :
                 {"regression", "regression_bins", "regression_null"}) {
                bool already = false;
                for (const ReportTable& t : report.tables)
                    if (t.name == name) already = true;
                if (!already) report.tables.push_back({name, "", "failed", e.what()});
            }
        }
    }

    report.ok = true;
    for (const ReportTable& t : report.tables)
        if (t.status != "ok") report.ok = false;

    write_text(config.out + "/report.json", render_report_json(report));
    return report;
}

std::string render_report_json(const Report& report) {
    ordered_json doc;
    doc["tool_version"] = report.tool_version;
    doc["ok"] = report.ok;
    ordered_json provenance;
    provenance["config_hash"] = report.config_hash;
    provenance["corpus_fingerprint"] = report.corpus_fingerprint;
    doc["provenance"] = provenance;
    ordered_json tables = ordered_json::array();
    for (const ReportTable& t : report.tables) {
        ordered_json entry;
        entry["name"] = t.name;
        entry["status"] = t.status;
        if (!t.path.empty()) entry["path"] = t.path;
        if (!t.error.empty()) entry["error"] = t.error;
        tables.push_back(std::move(entry));
    }
    doc["tables"] = tables;
    return doc.dump(2) + "\n";
}

}  // namespace ctox
