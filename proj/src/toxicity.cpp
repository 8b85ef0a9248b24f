#include "commentox/toxicity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "commentox/behavior.hpp"
#include "commentox/errors.hpp"
#include "commentox/numerics.hpp"
#include "commentox/rng.hpp"
#include "commentox/stats.hpp"
#include "commentox/strutil.hpp"

namespace ctox {

namespace {

int label_value(const Corpus& corpus, uint32_t comment_index) {
    const Comment& c = corpus.comments()[comment_index];
    if (!c.label) throw ValidationError("comment '" + c.id + "' has no label");
    return toxicity_value(*c.label);
}

bool in_dataset(const Corpus& corpus, const Video& video,
                std::optional<ChannelCategory> category) {
    return !category || corpus.channel_of(video).category == *category;
}

// Accumulates (count, toxicity sum) per bin of the full edge set; labels may
// be overridden per comment index for the permutation null.
struct BinAccumulator {
    explicit BinAccumulator(int n_bins) : count(n_bins, 0), sum(n_bins, 0.0) {}

    std::vector<uint64_t> count;
    std::vector<double> sum;

    void add(int bin_index_1based, int toxicity) {
        count[static_cast<size_t>(bin_index_1based - 1)] += 1;
        sum[static_cast<size_t>(bin_index_1based - 1)] += toxicity;
    }

    std::vector<ToxicityBin> emit() const {
        std::vector<ToxicityBin> bins;
        for (size_t b = 0; b < count.size(); ++b) {
            if (count[b] == 0) continue;
            bins.push_back(ToxicityBin{static_cast<int>(b + 1), count[b],
                                       sum[b] / static_cast<double>(count[b])});
        }
        return bins;
    }
};

// First bin whose right edge exceeds the value; the last bin is closed.
int bin_of(const std::vector<double>& edges, double value) {
    auto it = std::upper_bound(edges.begin() + 1, edges.end(), value);
    auto idx = static_cast<int>(it - edges.begin());
    return std::min(idx, static_cast<int>(edges.size()) - 1);
}

using LabelOverride = const std::vector<int>*;  // toxicity per comment index

int comment_toxicity(const Corpus& corpus, uint32_t ci, LabelOverride override_t) {
    return override_t ? (*override_t)[ci] : label_value(corpus, ci);
}

// Structural half of a binning: member comments with their bin, in add
// order, plus all label-independent metadata. Permutations never move a
// comment between bins, so one plan serves the real model and every shuffle.
struct BinPlan {
    BinnedToxicity meta;             // edges/cutoff/excluded; bins left empty
    std::vector<uint32_t> comments;  // member comment indices, in add order
    std::vector<int> bins;           // 1-based bin per member
};

BinnedToxicity apply_plan(const BinPlan& plan, const Corpus& corpus,
                          LabelOverride override_t) {
    BinnedToxicity out = plan.meta;
    BinAccumulator acc(out.requested_bins);
    for (size_t k = 0; k < plan.comments.size(); ++k)
        acc.add(plan.bins[k],
                comment_toxicity(corpus, plan.comments[k], override_t));
    out.bins = acc.emit();
    return out;
}

BinPlan position_bin_plan(const Corpus& corpus, int n_bins,
                          std::optional<ChannelCategory> category) {
    if (n_bins < 1) throw ValidationError("n_bins must be >= 1");

    BinPlan plan;
    plan.meta.requested_bins = n_bins;

    std::vector<Discussion> discussions = discussions_of(corpus);
    std::erase_if(discussions, [&](const Discussion& d) {
        return !in_dataset(corpus, *corpus.find_video(d.video_id), category);
    });

    size_t max_pos = 0;
    for (const Discussion& d : discussions) max_pos = std::max(max_pos, d.n());
    if (max_pos == 0) return plan;

    plan.meta.edges.resize(static_cast<size_t>(n_bins) + 1);
    // Geometric spacing over [1, max]; degenerate when every discussion has
    // one comment, in which case everything lands in the first bin.
    const double top = static_cast<double>(max_pos);
    for (int i = 0; i <= n_bins; ++i)
        plan.meta.edges[static_cast<size_t>(i)] =
            std::pow(top, static_cast<double>(i) / n_bins);
    plan.meta.edges.front() = 1.0;
    plan.meta.edges.back() = top;

    const bool degenerate = max_pos == 1;
    for (const Discussion& d : discussions) {
        for (size_t k = 0; k < d.comment_indices.size(); ++k) {
            const double position = static_cast<double>(k + 1);
            plan.comments.push_back(d.comment_indices[k]);
            plan.bins.push_back(degenerate ? 1
                                           : bin_of(plan.meta.edges, position));
        }
    }
    return plan;
}

BinPlan delay_bin_plan(const Corpus& corpus, int n_bins, double cutoff_quantile,
                       std::optional<ChannelCategory> category) {
    if (n_bins < 1) throw ValidationError("n_bins must be >= 1");
    if (!(cutoff_quantile > 0.0 && cutoff_quantile <= 1.0))
        throw ValidationError("cutoff_quantile must be in (0, 1]");

    BinPlan plan;
    plan.meta.requested_bins = n_bins;

    std::vector<double> delays;
    std::vector<uint32_t> kept;
    for (uint32_t ci = 0; ci < corpus.comments().size(); ++ci) {
        const Comment& c = corpus.comments()[ci];
        if (!in_dataset(corpus, corpus.video_of(c), category)) continue;
        double d = comment_delay(c, corpus.video_of(c));
        if (d < 0.0) {
            ++plan.meta.excluded;
            continue;
        }
        delays.push_back(d);
        kept.push_back(ci);
    }
    if (delays.empty()) return plan;

    plan.meta.cutoff = quantile(delays, cutoff_quantile);
    plan.meta.edges.resize(static_cast<size_t>(n_bins) + 1);
    for (int i = 0; i <= n_bins; ++i)
        plan.meta.edges[static_cast<size_t>(i)] =
            plan.meta.cutoff * static_cast<double>(i) / n_bins;

    const bool degenerate = plan.meta.cutoff == 0.0;
    for (size_t k = 0; k < kept.size(); ++k) {
        if (delays[k] > plan.meta.cutoff) {
            ++plan.meta.excluded;
            continue;
        }
        plan.comments.push_back(kept[k]);
        plan.bins.push_back(degenerate ? 1
                                       : bin_of(plan.meta.edges, delays[k]));
    }
    return plan;
}

BinnedToxicity position_binned_impl(const Corpus& corpus, int n_bins,
                                    std::optional<ChannelCategory> category,
                                    LabelOverride override_t) {
    return apply_plan(position_bin_plan(corpus, n_bins, category), corpus,
                      override_t);
}

BinnedToxicity delay_binned_impl(const Corpus& corpus, int n_bins,
                                 double cutoff_quantile,
                                 std::optional<ChannelCategory> category,
                                 LabelOverride override_t) {
    return apply_plan(
        delay_bin_plan(corpus, n_bins, cutoff_quantile, category), corpus,
        override_t);
}

// Toxicity values of the dataset's comments permuted among themselves;
// entries outside the dataset stay untouched (and unread).
std::vector<int> shuffled_dataset_values(const Corpus& corpus,
                                         std::optional<ChannelCategory> category,
                                         uint64_t seed) {
    std::vector<uint32_t> members;
    for (uint32_t ci = 0; ci < corpus.comments().size(); ++ci)
        if (in_dataset(corpus, corpus.video_of(corpus.comments()[ci]), category))
            members.push_back(ci);

    std::vector<int> values;
    values.reserve(members.size());
    for (uint32_t ci : members) values.push_back(label_value(corpus, ci));
    Rng rng(seed);
    rng.shuffle(values);

    std::vector<int> by_index(corpus.comments().size(), 0);
    for (size_t k = 0; k < members.size(); ++k) by_index[members[k]] = values[k];
    return by_index;
}

}  // namespace

// --- discussions -----------------------------------------------------------

std::vector<Discussion> discussions_of(const Corpus& corpus) {
    std::vector<std::vector<uint32_t>> per_video(corpus.videos().size());
    for (uint32_t ci = 0; ci < corpus.comments().size(); ++ci)
        per_video[corpus.comments()[ci].video_index].push_back(ci);

    std::vector<Discussion> discussions;
    for (size_t v = 0; v < per_video.size(); ++v) {
        if (per_video[v].empty()) continue;
        Discussion d;
        d.video_id = corpus.videos()[v].id;
        d.comment_indices = std::move(per_video[v]);
        std::sort(d.comment_indices.begin(), d.comment_indices.end(),
                  [&](uint32_t a, uint32_t b) {
                      const Comment& ca = corpus.comments()[a];
                      const Comment& cb = corpus.comments()[b];
                      if (ca.published_at != cb.published_at)
                          return ca.published_at < cb.published_at;
                      return ca.id < cb.id;
                  });
        discussions.push_back(std::move(d));
    }
    std::sort(discussions.begin(), discussions.end(),
              [](const Discussion& a, const Discussion& b) {
                  return a.video_id < b.video_id;
              });
    return discussions;
}

double discussion_toxicity(const Corpus& corpus, const Discussion& discussion) {
    if (discussion.comment_indices.empty())
        throw ValidationError("discussion '" + discussion.video_id +
                              "' has no comments");
    int64_t sum = 0;
    for (uint32_t ci : discussion.comment_indices) sum += label_value(corpus, ci);
    return static_cast<double>(sum) /
           static_cast<double>(discussion.comment_indices.size());
}

// --- binned toxicity ---------------------------------------------------------

BinnedToxicity position_binned_toxicity(const Corpus& corpus, int n_bins,
                                        std::optional<ChannelCategory> category) {
    return position_binned_impl(corpus, n_bins, category, nullptr);
}

BinnedToxicity delay_binned_toxicity(const Corpus& corpus, int n_bins,
                                     double cutoff_quantile,
                                     std::optional<ChannelCategory> category) {
    return delay_binned_impl(corpus, n_bins, cutoff_quantile, category, nullptr);
}

// --- regression --------------------------------------------------------------

RegressionResult ols_fit_xy(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw StatError("x and y differ in length");
    const size_t n = x.size();
    if (n < 3) throw StatError("regression needs at least 3 points, got " +
                               std::to_string(n));

    const double nd = static_cast<double>(n);
    const double x_mean = mean_of(x);
    const double y_mean = mean_of(y);

    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double dx = x[i] - x_mean;
        const double dy = y[i] - y_mean;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw StatError("zero variance in x");

    RegressionResult r;
    r.num_obs = n;
    r.slope = sxy / sxx;
    r.intercept = y_mean - r.slope * x_mean;

    double sse = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double e = y[i] - (r.intercept + r.slope * x[i]);
        sse += e * e;
    }
    const double df = nd - 2.0;
    const double s2 = sse / df;
    r.slope_se = std::sqrt(s2 / sxx);
    r.intercept_se = std::sqrt(s2 * (1.0 / nd + x_mean * x_mean / sxx));

    auto t_and_p = [df](double coef, double se, double& t, double& p) {
        if (se > 0.0) {
            t = coef / se;
            p = student_t_two_sided_p(t, df);
        } else if (coef == 0.0) {
            t = 0.0;
            p = 1.0;
        } else {  // perfect fit: zero residual variance, nonzero coefficient
            t = coef > 0.0 ? HUGE_VAL : -HUGE_VAL;
            p = 0.0;
        }
    };
    t_and_p(r.slope, r.slope_se, r.t_slope, r.p_slope);
    t_and_p(r.intercept, r.intercept_se, r.t_intercept, r.p_intercept);

    r.r2 = syy == 0.0 ? 0.0 : std::clamp(1.0 - sse / syy, 0.0, 1.0);
    r.adj_r2 = 1.0 - (1.0 - r.r2) * (nd - 1.0) / df;
    return r;
}

RegressionResult ols_fit(std::span<const ToxicityBin> bins) {
    std::vector<double> x, y;
    x.reserve(bins.size());
    y.reserve(bins.size());
    for (const ToxicityBin& b : bins) {
        x.push_back(static_cast<double>(b.x));
        y.push_back(b.y);
    }
    try {
        return ols_fit_xy(x, y);
    } catch (const StatError&) {
        if (bins.size() < 3)
            throw StatError("regression needs at least 3 bins, got " +
                            std::to_string(bins.size()));
        throw;
    }
}

std::string significance_stars(double p) {
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "";
}

// --- randomized null ----------------------------------------------------------

Corpus shuffle_labels(const Corpus& corpus, uint64_t seed) {
    std::vector<std::optional<HateLabel>> labels;
    labels.reserve(corpus.comments().size());
    for (const Comment& c : corpus.comments()) {
        if (!c.label) throw ValidationError("comment '" + c.id + "' has no label");
        labels.push_back(c.label);
    }
    Rng rng(seed);
    rng.shuffle(labels);
    return corpus.with_labels(std::move(labels));
}

// --- regression suite -----------------------------------------------------------

RegressionSuite regression_suite(const Corpus& corpus, const SuiteOptions& options) {
    if (options.shuffles < 1) throw ValidationError("shuffles must be >= 1");

    RegressionSuite suite;
    suite.options = options;

    struct Dataset {
        std::string name;
        std::optional<ChannelCategory> category;
    };
    const Dataset datasets[] = {
        {"all", std::nullopt},
        {"questionable", ChannelCategory::Questionable},
        {"reliable", ChannelCategory::Reliable},
    };
    const std::string x_kinds[] = {"position", "delay"};

    for (const Dataset& ds : datasets) {
        uint64_t dataset_comments = 0;
        for (const Comment& c : corpus.comments())
            if (in_dataset(corpus, corpus.video_of(c), ds.category))
                ++dataset_comments;

        for (const std::string& x_kind : x_kinds) {
            std::optional<BinPlan> plan;  // shared by real and every shuffle
            auto bin_once = [&](LabelOverride override_t) {
                if (!plan)
                    plan = x_kind == "position"
                               ? position_bin_plan(corpus, options.n_bins,
                                                   ds.category)
                               : delay_bin_plan(corpus, options.n_bins,
                                                options.cutoff_quantile,
                                                ds.category);
                return apply_plan(*plan, corpus, override_t);
            };

            for (const std::string& model : {std::string("real"), std::string("random")}) {
                SuiteCell cell;
                cell.dataset = ds.name;
                cell.x_kind = x_kind;
                cell.model = model;

                if (dataset_comments == 0) {
                    cell.note = "no comments in category";
                    suite.cells.push_back(std::move(cell));
                    continue;
                }

                try {
                    if (model == "real") {
                        cell.bins = bin_once(nullptr);
                        cell.fit = ols_fit(cell.bins.bins);
                    } else {
                        std::vector<double> slopes;
                        for (int s = 0; s < options.shuffles; ++s) {
                            const uint64_t cell_seed = derive_seed(
                                options.seed, ds.name + "|" + x_kind + "|" +
                                                  std::to_string(s));
                            auto values = shuffled_dataset_values(
                                corpus, ds.category, cell_seed);
                            BinnedToxicity bins = bin_once(&values);
                            RegressionResult fit = ols_fit(bins.bins);
                            if (s == 0) {
                                cell.bins = std::move(bins);
                                cell.fit = fit;
                            }
                            if (options.shuffles > 1) slopes.push_back(fit.slope);
                        }
                        if (options.shuffles > 1) {
                            NullBand band;
                            band.shuffles = options.shuffles;
                            band.slope_mean = mean_of(slopes);
                            band.slope_lo = quantile(slopes, 0.025);
                            band.slope_hi = quantile(slopes, 0.975);
                            cell.null_band = band;
                        }
                    }
                } catch (const StatError& e) {
                    cell.fit.reset();
                    cell.note = e.what();
                }
                suite.cells.push_back(std::move(cell));
            }
        }
    }
    return suite;
}

std::string render_regression_csv(const RegressionSuite& suite) {
    std::string out =
        "model,dataset,x_kind,intercept,intercept_se,slope,slope_se,p_slope,"
        "r2,adj_r2,num_obs,stars\n";
    for (const SuiteCell& cell : suite.cells) {
        if (!cell.fit) continue;
        const RegressionResult& r = *cell.fit;
        out += cell.model + ',' + cell.dataset + ',' + cell.x_kind + ',' +
               fmt_double(r.intercept) + ',' + fmt_double(r.intercept_se) + ',' +
               fmt_double(r.slope) + ',' + fmt_double(r.slope_se) + ',' +
               fmt_double(r.p_slope) + ',' + fmt_double(r.r2) + ',' +
               fmt_double(r.adj_r2) + ',' + std::to_string(r.num_obs) + ',' +
               significance_stars(r.p_slope) + '\n';
    }
    return out;
}

std::string render_suite_bins_csv(const RegressionSuite& suite) {
    std::string out = "series,x,y\n";
    for (const SuiteCell& cell : suite.cells) {
        if (!cell.fit) continue;
        const std::string series =
            cell.dataset + '_' + cell.x_kind + '_' + cell.model;
        for (const ToxicityBin& b : cell.bins.bins)
            out += series + ',' + std::to_string(b.x) + ',' + fmt_double(b.y) + '\n';
    }
    return out;
}

}  // namespace ctox
