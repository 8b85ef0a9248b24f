#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "commentox/corpus.hpp"
#include "commentox/stats.hpp"
#include "commentox/types.hpp"

namespace ctox {

// --- comment delays -------------------------------------------------------

// Signed fractional hours between video publication and comment posting.
// Negative values (clock skew, re-published videos) are possible here;
// aggregations exclude them and report the count.
double comment_delay(const Comment& comment, const Video& video);

struct DelayStats {
    uint64_t count = 0;
    std::optional<double> mu;          // undefined for empty groups
    std::optional<double> sigma;       // undefined below 2 observations
    std::optional<double> gamma;       // undefined below 3 or at zero variance
    std::optional<double> trimmed_mu;  // one-sided upper trim
};

enum class DelayGrouping { All, ByLabel, ByCategory, ByLabelAndCategory };

struct DelayGroup {
    std::optional<HateLabel> label;
    std::optional<ChannelCategory> category;
    DelayStats stats;
};

struct DelayReport {
    std::vector<DelayGroup> groups;  // fixed enumeration order, empty groups kept
    uint64_t negative_excluded = 0;
    double trim = 0.2;
};

// Per-group delay statistics. Grouping by label requires a fully labeled
// corpus (unlabeled comment -> ValidationError naming it).
DelayReport delay_stats(const Corpus& corpus, DelayGrouping grouping,
                        double trim = 0.20);

std::string render_delay_csv(const DelayReport& report);

struct BootstrapStats {
    double mu_hat = 0.0;     // mean of repetition means
    double sigma_hat = 0.0;  // sd of repetition means (0 for one repetition)
    uint64_t sample_size = 0;
    uint64_t repetitions = 0;
    uint64_t observations = 0;  // pool the samples draw from
    uint64_t negative_excluded = 0;
};

// Bootstrap of the mean delay for one channel category, optionally narrowed
// to one label. Each repetition draws sample_size delays with replacement.
// Deterministic per seed; empty pool -> StatError.
BootstrapStats bootstrap_delay(const Corpus& corpus, ChannelCategory category,
                               std::optional<HateLabel> label = std::nullopt,
                               uint64_t sample_size = 7500,
                               uint64_t repetitions = 1000, uint64_t seed = 0);

// --- label time series ------------------------------------------------------

enum class TimeBinKind { IsoWeek, Day };

struct TimeSeriesBin {
    std::string key;    // "2020-W07" or "2020-02-17"
    int64_t start = 0;  // bin start, epoch seconds UTC
    uint64_t comments = 0;
    // Proportion per label; null for empty bins. Defined entries sum to 1.
    std::array<std::optional<double>, kNumLabels> proportions{};
};

struct TimeSeries {
    TimeBinKind bin = TimeBinKind::IsoWeek;
    std::vector<TimeSeriesBin> bins;  // contiguous between first and last comment
};

// Per-bin label proportions over the corpus time window. Requires a fully
// labeled corpus; empty corpus -> empty series.
TimeSeries label_timeseries(const Corpus& corpus,
                            TimeBinKind bin = TimeBinKind::IsoWeek);

std::string render_timeseries_csv(const TimeSeries& series);

// --- channel concentration ----------------------------------------------------

struct ConcentrationPoint {
    double channel_share = 0.0;       // rank / channel count
    double comment_share = 0.0;       // cumulative fraction of series comments
    double questionable_share = 0.0;  // fraction of the questionable list in top ranks
};

struct ConcentrationCurve {
    std::string series;  // "total" or a label name
    std::vector<ConcentrationPoint> points;  // one per channel rank
};

// Channels ranked descending by comment count (ties by channel id). The
// "total" curve is always present; with per_label, one curve per label that
// occurs in the corpus (per-label curves need a fully labeled corpus).
std::vector<ConcentrationCurve> concentration_curves(const Corpus& corpus,
                                                     bool per_label);

std::string render_concentration_csv(std::span<const ConcentrationCurve> curves);

// --- user geometry ---------------------------------------------------------

struct UserProfile {
    std::string user_id;
    uint64_t c = 0;  // total comments
    double a = 0.0, i = 0.0, o = 0.0, v = 0.0;  // label fractions
    uint64_t q = 0;     // comments on questionable-channel videos
    double l = 0.0;     // leaning q/c
    double abar = 0.0;  // non-appropriate fraction 1-a
    double x = 0.0;     // square projection o+v
    double y = 0.0;     // square projection i+o
};

// One profile per commenting user, sorted by user_id. Requires a fully
// labeled corpus (unlabeled comment -> ValidationError naming it).
std::vector<UserProfile> user_profiles(const Corpus& corpus);

std::string render_profiles_csv(std::span<const UserProfile> profiles);

struct TrianglePoint {
    double x = 0.0;
    double y = 0.0;
};

// Barycentric projection of (a, o, v) renormalized by their sum onto the
// triangle A=(0,0), O=(1,0), V=(0.5, sqrt(3)/2). Pure-I profiles have no
// projection.
std::optional<TrianglePoint> triangle_projection(const UserProfile& profile);

struct TriangleRow {
    std::string user_id;
    double x = 0.0;
    double y = 0.0;
};

struct TriangleReport {
    std::vector<TriangleRow> rows;  // profile order, pure-I users skipped
    uint64_t excluded = 0;
};

TriangleReport triangle_projections(std::span<const UserProfile> profiles);

std::string render_triangle_csv(const TriangleReport& report);

// --- joint density ----------------------------------------------------------

struct DensityGrid {
    size_t x_bins = 50;
    size_t y_bins = 50;
    std::vector<uint64_t> counts;  // row-major: y * x_bins + x
    uint64_t total = 0;

    uint64_t at(size_t xi, size_t yi) const { return counts[yi * x_bins + xi]; }
};

// 2D histogram of (leaning, non-appropriate fraction) over [0,1]^2 with the
// last bin closed on both axes. bins >= 2 per axis.
DensityGrid joint_density(std::span<const UserProfile> profiles,
                          size_t x_bins = 50, size_t y_bins = 50);

std::string render_density_csv(const DensityGrid& grid);

// --- leaning groups -----------------------------------------------------------

struct LeaningInterval {
    double lo = 0.0;
    double hi = 1.0;
    bool lo_open = false;
    bool hi_open = false;

    bool contains(double value) const {
        if (lo_open ? value <= lo : value < lo) return false;
        if (hi_open ? value >= hi : value > hi) return false;
        return true;
    }
    std::string to_string() const;
};

// Default tail groups; both exclude the pure-extreme leanings 0 and 1.
inline constexpr LeaningInterval kReliableSkewed{0.0, 0.25, true, false};
inline constexpr LeaningInterval kQuestionableSkewed{0.75, 1.0, false, true};

struct GroupDistribution {
    LeaningInterval interval;
    std::optional<ChannelCategory> target_category;
    std::vector<std::string> user_ids;  // members, sorted by user_id
    std::vector<double> abar;           // parallel to user_ids
    uint64_t excluded_no_target = 0;    // members with no comment on the target category
    std::optional<Moments> stats;       // empty distribution -> nullopt
};

// Non-appropriate fractions of the users whose leaning falls in the
// interval. With target_category, each member's fraction is recomputed over
// only their comments on that category's videos; members with none there are
// excluded and counted.
GroupDistribution group_distribution(const Corpus& corpus,
                                     std::span<const UserProfile> profiles,
                                     const LeaningInterval& interval,
                                     std::optional<ChannelCategory> target_category =
                                         std::nullopt);

std::string render_group_csv(const GroupDistribution& dist);

}  // namespace ctox
