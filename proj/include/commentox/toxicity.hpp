#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "commentox/corpus.hpp"
#include "commentox/types.hpp"

namespace ctox {

// --- discussions -----------------------------------------------------------

struct Discussion {
    std::string video_id;
    // Comment indices into corpus.comments(), ordered chronologically with
    // ties broken by comment_id.
    std::vector<uint32_t> comment_indices;

    size_t n() const { return comment_indices.size(); }
};

// One discussion per video with at least one comment, sorted by video_id.
std::vector<Discussion> discussions_of(const Corpus& corpus);

// Mean toxicity value over the discussion's comments, in [0, 3].
// Unlabeled comment -> ValidationError naming it.
double discussion_toxicity(const Corpus& corpus, const Discussion& discussion);

// --- binned toxicity --------------------------------------------------------

struct ToxicityBin {
    int x = 0;  // 1-based index into the full edge set (stable when bins drop)
    uint64_t count = 0;
    double y = 0.0;  // mean toxicity of member comments
};

struct BinnedToxicity {
    std::vector<ToxicityBin> bins;  // emitted bins only; empty ones dropped
    int requested_bins = 0;
    std::vector<double> edges;  // full edge set, size requested_bins + 1
    uint64_t excluded = 0;      // delay variant: negative or beyond-cutoff delays
    double cutoff = 0.0;        // delay variant: quantile cutoff in hours
};

// Comments keyed by their 1-based chronological position within their
// discussion; positions fall into logarithmically spaced bins over
// [1, max position]. With a category, only discussions on that category's
// channels contribute. Requires labels on every included comment.
BinnedToxicity position_binned_toxicity(
    const Corpus& corpus, int n_bins = 24,
    std::optional<ChannelCategory> category = std::nullopt);

// Comments keyed by their delay in hours; linear bins over [0, cutoff] where
// the cutoff is the given delay quantile. Negative and beyond-cutoff delays
// are excluded and counted.
BinnedToxicity delay_binned_toxicity(
    const Corpus& corpus, int n_bins = 24, double cutoff_quantile = 0.99,
    std::optional<ChannelCategory> category = std::nullopt);

// --- regression ------------------------------------------------------------

struct RegressionResult {
    double intercept = 0.0;
    double intercept_se = 0.0;
    double slope = 0.0;
    double slope_se = 0.0;
    double t_intercept = 0.0;
    double t_slope = 0.0;
    double p_intercept = 1.0;
    double p_slope = 1.0;
    double r2 = 0.0;
    double adj_r2 = 0.0;
    uint64_t num_obs = 0;
};

// Ordinary least squares of y on x; closed-form estimates, standard errors
// from the residual variance with n-2 degrees of freedom, two-sided t-test
// p-values. Throws StatError below 3 points or at zero x variance.
RegressionResult ols_fit_xy(std::span<const double> x, std::span<const double> y);

// The binned-regression form: x = bin index, y = bin mean toxicity.
RegressionResult ols_fit(std::span<const ToxicityBin> bins);

// "***" p<0.001, "**" p<0.01, "*" p<0.05, "" otherwise.
std::string significance_stars(double p);

// --- randomized null --------------------------------------------------------

// Copy of the corpus with all comment labels permuted uniformly at random;
// the global label multiset is preserved. Requires a fully labeled corpus.
// Deterministic per seed.
Corpus shuffle_labels(const Corpus& corpus, uint64_t seed);

// --- regression suite ---------------------------------------------------------

struct NullBand {
    int shuffles = 0;
    double slope_mean = 0.0;
    double slope_lo = 0.0;  // 2.5% quantile of shuffled slopes
    double slope_hi = 0.0;  // 97.5% quantile
};

struct SuiteCell {
    std::string dataset;  // "all", "questionable", "reliable"
    std::string x_kind;   // "position", "delay"
    std::string model;    // "real", "random"
    std::optional<RegressionResult> fit;  // empty when the cell was skipped
    std::string note;                     // reason for a skipped cell
    BinnedToxicity bins;                  // the fitted bins (first shuffle for random)
    std::optional<NullBand> null_band;    // random cells with shuffles > 1
};

struct SuiteOptions {
    int n_bins = 24;
    double cutoff_quantile = 0.99;
    uint64_t seed = 0;
    int shuffles = 1;  // > 1: first shuffle reported, empirical band attached
};

struct RegressionSuite {
    std::vector<SuiteCell> cells;  // dataset-major, then x_kind, then model
    SuiteOptions options;
};

// {all, questionable, reliable} x {position, delay} x {real, random}.
// Random models permute labels within the cell's dataset, each cell with a
// seed derived from (seed, dataset, x_kind, shuffle index), so results do
// not depend on evaluation order. Categories without comments and binnings
// with fewer than 3 emitted bins are skipped with a note.
RegressionSuite regression_suite(const Corpus& corpus, const SuiteOptions& options);

// model,dataset,x_kind,intercept,intercept_se,slope,slope_se,p_slope,r2,
// adj_r2,num_obs,stars; skipped cells are omitted.
std::string render_regression_csv(const RegressionSuite& suite);

// Plot-ready long format (series,x,y), one series per fitted cell.
std::string render_suite_bins_csv(const RegressionSuite& suite);

}  // namespace ctox
