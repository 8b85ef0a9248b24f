#include "commentox/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include "commentox/csv.hpp"
#include "commentox/errors.hpp"
#include "commentox/rng.hpp"
#include "commentox/strutil.hpp"
#include "commentox/timeutil.hpp"

namespace ctox {

namespace {

constexpr double kSecondsPerHour = 3600.0;

HateLabel require_label(const Comment& c) {
    if (!c.label)
        throw ValidationError("comment '" + c.id + "' has no label");
    return *c.label;
}

std::string opt_cell(const std::optional<double>& v) {
    return v ? fmt_double(*v) : std::string();
}

DelayStats stats_from_delays(std::vector<double>& delays, double trim) {
    DelayStats s;
    s.count = delays.size();
    if (delays.empty()) return s;
    Moments m = moments_of(delays);
    s.mu = m.mean;
    s.sigma = m.sd;
    s.gamma = m.skewness;
    s.trimmed_mu = trimmed_mean_upper(delays, trim);
    return s;
}

}  // namespace

// --- comment delays ----------------------------------------------------

double comment_delay(const Comment& comment, const Video& video) {
    return static_cast<double>(comment.published_at - video.published_at) /
           kSecondsPerHour;
}

DelayReport delay_stats(const Corpus& corpus, DelayGrouping grouping, double trim) {
    if (!(trim >= 0.0 && trim < 1.0))
        throw ValidationError("trim fraction must be in [0, 1)");

    const bool by_label = grouping == DelayGrouping::ByLabel ||
                          grouping == DelayGrouping::ByLabelAndCategory;
    const bool by_category = grouping == DelayGrouping::ByCategory ||
                             grouping == DelayGrouping::ByLabelAndCategory;

    DelayReport report;
    report.trim = trim;

    const size_t label_slots = by_label ? kNumLabels : 1;
    const size_t category_slots = by_category ? 2 : 1;
    std::vector<std::vector<double>> delays(label_slots * category_slots);

    for (const Comment& c : corpus.comments()) {
        double d = comment_delay(c, corpus.video_of(c));
        size_t li = by_label ? static_cast<size_t>(require_label(c)) : 0;
        if (d < 0.0) {
            ++report.negative_excluded;
            continue;
        }
        size_t ci = by_category ? static_cast<size_t>(corpus.category_of(c)) : 0;
        delays[li * category_slots + ci].push_back(d);
    }

    for (size_t li = 0; li < label_slots; ++li) {
        for (size_t ci = 0; ci < category_slots; ++ci) {
            DelayGroup group;
            if (by_label) group.label = static_cast<HateLabel>(li);
            if (by_category) group.category = static_cast<ChannelCategory>(ci);
            group.stats = stats_from_delays(delays[li * category_slots + ci], trim);
            report.groups.push_back(std::move(group));
        }
    }
    return report;
}

std::string render_delay_csv(const DelayReport& report) {
    std::string out = "label,category,count,mu,sigma,gamma,trimmed_mu\n";
    for (const DelayGroup& g : report.groups) {
        out += g.label ? label_name(*g.label) : "";
        out += ',';
        out += g.category ? category_name(*g.category) : "";
        out += ',' + std::to_string(g.stats.count);
        out += ',' + opt_cell(g.stats.mu);
        out += ',' + opt_cell(g.stats.sigma);
        out += ',' + opt_cell(g.stats.gamma);
        out += ',' + opt_cell(g.stats.trimmed_mu);
        out += '\n';
    }
    return out;
}

BootstrapStats bootstrap_delay(const Corpus& corpus, ChannelCategory category,
                               std::optional<HateLabel> label,
                               uint64_t sample_size, uint64_t repetitions,
                               uint64_t seed) {
    if (sample_size < 1) throw ValidationError("sample_size must be >= 1");
    if (repetitions < 1) throw ValidationError("repetitions must be >= 1");

    BootstrapStats out;
    out.sample_size = sample_size;
    out.repetitions = repetitions;

    std::vector<double> pool;
    for (const Comment& c : corpus.comments()) {
        if (corpus.category_of(c) != category) continue;
        if (label && require_label(c) != *label) continue;
        double d = comment_delay(c, corpus.video_of(c));
        if (d < 0.0) {
            ++out.negative_excluded;
            continue;
        }
        pool.push_back(d);
    }
    if (pool.empty())
        throw StatError(std::string("no delay observations for category '") +
                        category_name(category) + "'");
    out.observations = pool.size();

    Rng rng(seed);
    std::vector<double> means;
    means.reserve(repetitions);
    for (uint64_t r = 0; r < repetitions; ++r) {
        double sum = 0.0;
        for (uint64_t s = 0; s < sample_size; ++s) sum += pool[rng.index(pool.size())];
        means.push_back(sum / static_cast<double>(sample_size));
    }
    out.mu_hat = mean_of(means);
    if (repetitions >= 2) {
        Moments m = moments_of(means);
        out.sigma_hat = m.sd.value_or(0.0);
    }
    return out;
}

// --- label time series ---------------------------------------------------

TimeSeries label_timeseries(const Corpus& corpus, TimeBinKind bin) {
    TimeSeries series;
    series.bin = bin;
    if (corpus.comments().empty()) return series;

    auto bin_start = [bin](int64_t ts) {
        return bin == TimeBinKind::IsoWeek ? iso_week_start(iso_week_of(ts))
                                           : day_start(ts);
    };
    // ISO weeks open on Mondays 00:00 UTC, so both bin kinds advance by a
    // fixed number of epoch seconds.
    const int64_t step = bin == TimeBinKind::IsoWeek ? 7 * 86400 : 86400;

    std::map<int64_t, std::array<uint64_t, kNumLabels>> counts;
    for (const Comment& c : corpus.comments()) {
        auto label = require_label(c);
        auto& cell = counts[bin_start(c.published_at)];
        ++cell[static_cast<size_t>(label)];
    }

    const int64_t first = counts.begin()->first;
    const int64_t last = counts.rbegin()->first;
    for (int64_t start = first; start <= last; start += step) {
        TimeSeriesBin out_bin;
        out_bin.start = start;
        out_bin.key = bin == TimeBinKind::IsoWeek ? iso_week_key(iso_week_of(start))
                                                  : day_key(start);
        auto it = counts.find(start);
        if (it != counts.end()) {
            uint64_t total = std::accumulate(it->second.begin(), it->second.end(),
                                             uint64_t{0});
            out_bin.comments = total;
            for (size_t l = 0; l < kNumLabels; ++l)
                out_bin.proportions[l] = static_cast<double>(it->second[l]) /
                                         static_cast<double>(total);
        }
        series.bins.push_back(std::move(out_bin));
    }
    return series;
}

std::string render_timeseries_csv(const TimeSeries& series) {
    std::string out = "bin,start,comments";
    for (int l = 0; l < kNumLabels; ++l)
        out += std::string(",") + to_lower_ascii(label_name(static_cast<HateLabel>(l)));
    out += '\n';
    for (const TimeSeriesBin& b : series.bins) {
        out += b.key + ',' + format_iso8601(b.start) + ',' + std::to_string(b.comments);
        for (const auto& p : b.proportions) out += ',' + opt_cell(p);
        out += '\n';
    }
    return out;
}

// --- channel concentration --------------------------------------------------

namespace {

ConcentrationCurve build_curve(const Corpus& corpus, std::string series,
                               const std::vector<uint64_t>& counts) {
    ConcentrationCurve curve;
    curve.series = std::move(series);

    const size_t nch = corpus.channels().size();
    uint64_t total = std::accumulate(counts.begin(), counts.end(), uint64_t{0});
    if (nch == 0 || total == 0) return curve;

    uint64_t questionable_total = 0;
    for (const Channel& ch : corpus.channels())
        if (ch.category == ChannelCategory::Questionable) ++questionable_total;

    std::vector<size_t> order(nch);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (counts[a] != counts[b]) return counts[a] > counts[b];
        return corpus.channels()[a].id < corpus.channels()[b].id;
    });

    uint64_t cum = 0, cum_questionable = 0;
    curve.points.reserve(nch);
    for (size_t rank = 0; rank < nch; ++rank) {
        size_t ch = order[rank];
        cum += counts[ch];
        if (corpus.channels()[ch].category == ChannelCategory::Questionable)
            ++cum_questionable;
        ConcentrationPoint p;
        p.channel_share = static_cast<double>(rank + 1) / static_cast<double>(nch);
        p.comment_share = static_cast<double>(cum) / static_cast<double>(total);
        p.questionable_share =
            questionable_total == 0
                ? 0.0
                : static_cast<double>(cum_questionable) /
                      static_cast<double>(questionable_total);
        curve.points.push_back(p);
    }
    return curve;
}

}  // namespace

std::vector<ConcentrationCurve> concentration_curves(const Corpus& corpus,
                                                     bool per_label) {
    const size_t nch = corpus.channels().size();
    std::vector<uint64_t> total_counts(nch, 0);
    std::array<std::vector<uint64_t>, kNumLabels> label_counts;
    if (per_label)
        for (auto& v : label_counts) v.assign(nch, 0);

    for (const Comment& c : corpus.comments()) {
        size_t ch = corpus.video_of(c).channel_index;
        ++total_counts[ch];
        if (per_label) ++label_counts[static_cast<size_t>(require_label(c))][ch];
    }

    std::vector<ConcentrationCurve> curves;
    curves.push_back(build_curve(corpus, "total", total_counts));
    if (per_label) {
        for (int l = 0; l < kNumLabels; ++l) {
            auto& counts = label_counts[static_cast<size_t>(l)];
            if (std::accumulate(counts.begin(), counts.end(), uint64_t{0}) == 0)
                continue;  // label absent from the corpus, nothing to rank
            curves.push_back(build_curve(
                corpus, to_lower_ascii(label_name(static_cast<HateLabel>(l))),
                counts));
        }
    }
    return curves;
}

std::string render_concentration_csv(std::span<const ConcentrationCurve> curves) {
    std::string out = "series,x,y\n";
    for (const ConcentrationCurve& curve : curves) {
        for (const ConcentrationPoint& p : curve.points)
            out += curve.series + ',' + fmt_double(p.channel_share) + ',' +
                   fmt_double(p.comment_share) + '\n';
        for (const ConcentrationPoint& p : curve.points)
            out += curve.series + "_questionable_share," +
                   fmt_double(p.channel_share) + ',' +
                   fmt_double(p.questionable_share) + '\n';
    }
    return out;
}

// --- user geometry ---------------------------------------------------------

std::vector<UserProfile> user_profiles(const Corpus& corpus) {
    struct Tally {
        std::array<uint64_t, kNumLabels> labels{};
        uint64_t questionable = 0;
        uint64_t total = 0;
    };
    std::unordered_map<std::string_view, Tally> tallies;
    for (const Comment& c : corpus.comments()) {
        auto label = require_label(c);
        Tally& t = tallies[c.user_id];
        ++t.labels[static_cast<size_t>(label)];
        ++t.total;
        if (corpus.category_of(c) == ChannelCategory::Questionable) ++t.questionable;
    }

    std::vector<UserProfile> profiles;
    profiles.reserve(tallies.size());
    for (const auto& [user_id, t] : tallies) {
        UserProfile p;
        p.user_id = std::string(user_id);
        p.c = t.total;
        double n = static_cast<double>(t.total);
        p.a = static_cast<double>(t.labels[0]) / n;
        p.i = static_cast<double>(t.labels[1]) / n;
        p.o = static_cast<double>(t.labels[2]) / n;
        p.v = static_cast<double>(t.labels[3]) / n;
        p.q = t.questionable;
        p.l = static_cast<double>(t.questionable) / n;
        p.abar = 1.0 - p.a;
        p.x = p.o + p.v;
        p.y = p.i + p.o;
        profiles.push_back(std::move(p));
    }
    std::sort(profiles.begin(), profiles.end(),
              [](const UserProfile& a, const UserProfile& b) {
                  return a.user_id < b.user_id;
              });
    return profiles;
}

std::string render_profiles_csv(std::span<const UserProfile> profiles) {
    std::string out = "user_id,comments,a,i,o,v,questionable_comments,leaning,"
                      "non_appropriate,x,y\n";
    for (const UserProfile& p : profiles) {
        out += p.user_id + ',' + std::to_string(p.c) + ',' + fmt_double(p.a) + ',' +
               fmt_double(p.i) + ',' + fmt_double(p.o) + ',' + fmt_double(p.v) +
               ',' + std::to_string(p.q) + ',' + fmt_double(p.l) + ',' +
               fmt_double(p.abar) + ',' + fmt_double(p.x) + ',' + fmt_double(p.y) +
               '\n';
    }
    return out;
}

std::optional<TrianglePoint> triangle_projection(const UserProfile& profile) {
    const double sum = profile.a + profile.o + profile.v;
    if (sum <= 0.0) return std::nullopt;  // pure-I profile
    const double wo = profile.o / sum;
    const double wv = profile.v / sum;
    TrianglePoint p;
    p.x = wo + 0.5 * wv;
    p.y = wv * (std::sqrt(3.0) / 2.0);
    return p;
}

TriangleReport triangle_projections(std::span<const UserProfile> profiles) {
    TriangleReport report;
    for (const UserProfile& profile : profiles) {
        auto point = triangle_projection(profile);
        if (!point) {
            ++report.excluded;
            continue;
        }
        report.rows.push_back(TriangleRow{profile.user_id, point->x, point->y});
    }
    return report;
}

std::string render_triangle_csv(const TriangleReport& report) {
    std::string out = "user_id,x,y\n";
    for (const TriangleRow& row : report.rows)
        out += row.user_id + ',' + fmt_double(row.x) + ',' + fmt_double(row.y) + '\n';
    return out;
}

// --- joint density -----------------------------------------------------------

DensityGrid joint_density(std::span<const UserProfile> profiles, size_t x_bins,
                          size_t y_bins) {
    if (x_bins < 2 || y_bins < 2)
        throw ValidationError("density grid needs at least 2 bins per axis");

    DensityGrid grid;
    grid.x_bins = x_bins;
    grid.y_bins = y_bins;
    grid.counts.assign(x_bins * y_bins, 0);
    grid.total = profiles.size();

    auto cell = [](double value, size_t bins) {
        auto idx = static_cast<size_t>(value * static_cast<double>(bins));
        return std::min(idx, bins - 1);  // value 1.0 falls into the last bin
    };
    for (const UserProfile& p : profiles)
        ++grid.counts[cell(p.abar, y_bins) * x_bins + cell(p.l, x_bins)];
    return grid;
}

std::string render_density_csv(const DensityGrid& grid) {
    std::string out = "x_bin,y_bin,count\n";
    for (size_t yi = 0; yi < grid.y_bins; ++yi)
        for (size_t xi = 0; xi < grid.x_bins; ++xi)
            out += std::to_string(xi) + ',' + std::to_string(yi) + ',' +
                   std::to_string(grid.at(xi, yi)) + '\n';
    return out;
}

// --- leaning groups ------------------------------------------------------------

std::string LeaningInterval::to_string() const {
    std::string out;
    out += lo_open ? '(' : '[';
    out += fmt_double(lo);
    out += ',';
    out += fmt_double(hi);
    out += hi_open ? ')' : ']';
    return out;
}

GroupDistribution group_distribution(const Corpus& corpus,
                                     std::span<const UserProfile> profiles,
                                     const LeaningInterval& interval,
                                     std::optional<ChannelCategory> target_category) {
    GroupDistribution dist;
    dist.interval = interval;
    dist.target_category = target_category;

    struct ConditionalTally {
        uint64_t total = 0;
        uint64_t appropriate = 0;
    };
    std::unordered_map<std::string_view, ConditionalTally> conditional;
    if (target_category) {
        for (const Comment& c : corpus.comments()) {
            if (corpus.category_of(c) != *target_category) continue;
            auto label = require_label(c);
            ConditionalTally& t = conditional[c.user_id];
            ++t.total;
            if (label == HateLabel::Appropriate) ++t.appropriate;
        }
    }

    for (const UserProfile& p : profiles) {
        if (!interval.contains(p.l)) continue;
        if (!target_category) {
            dist.user_ids.push_back(p.user_id);
            dist.abar.push_back(p.abar);
            continue;
        }
        auto it = conditional.find(p.user_id);
        if (it == conditional.end() || it->second.total == 0) {
            ++dist.excluded_no_target;
            continue;
        }
        dist.user_ids.push_back(p.user_id);
        dist.abar.push_back(1.0 - static_cast<double>(it->second.appropriate) /
                                      static_cast<double>(it->second.total));
    }
    if (!dist.abar.empty()) dist.stats = moments_of(dist.abar);
    return dist;
}

std::string render_group_csv(const GroupDistribution& dist) {
    std::string group = dist.interval.to_string();
    std::string target =
        dist.target_category ? category_name(*dist.target_category) : "";
    std::string out = "group,target,user_id,abar\n";
    for (size_t i = 0; i < dist.abar.size(); ++i)
        out += join_csv_line({group, target, dist.user_ids[i],
                              fmt_double(dist.abar[i])}) +
               '\n';
    return out;
}

}  // namespace ctox
