#include "commentox/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "commentox/errors.hpp"
#include "commentox/rng.hpp"
#include "commentox/strutil.hpp"
#include "commentox/timeutil.hpp"

namespace ctox {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string padded_id(const char* prefix, int width, uint64_t n) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%0*llu", prefix, width,
                  static_cast<unsigned long long>(n));
    return buf;
}

// Discrete power law P(k) ~ k^-alpha over [min, max], sampled by inverse
// CDF lookup. alpha = 0 gives the uniform distribution.
class DiscretePowerLaw {
public:
    DiscretePowerLaw(uint64_t min, uint64_t max, double alpha) : min_(min) {
        cdf_.reserve(max - min + 1);
        double total = 0.0;
        for (uint64_t k = min; k <= max; ++k) {
            total += std::pow(static_cast<double>(k), -alpha);
            cdf_.push_back(total);
        }
        for (double& c : cdf_) c /= total;
        cdf_.back() = 1.0;
    }

    uint64_t draw(Rng& rng) const {
        const double u = rng.next_double();
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        if (it == cdf_.end()) --it;
        return min_ + static_cast<uint64_t>(it - cdf_.begin());
    }

private:
    uint64_t min_;
    std::vector<double> cdf_;
};

// Index draw proportional to non-negative weights.
class WeightedPick {
public:
    explicit WeightedPick(const std::vector<double>& weights) {
        cdf_.reserve(weights.size());
        double total = 0.0;
        for (double w : weights) {
            total += w;
            cdf_.push_back(total);
        }
        total_ = total;
        if (total > 0.0) {
            for (double& c : cdf_) c /= total;
            cdf_.back() = 1.0;
        }
    }

    bool valid() const { return total_ > 0.0; }

    size_t draw(Rng& rng) const {
        const double u = rng.next_double();
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        if (it == cdf_.end()) --it;
        return static_cast<size_t>(it - cdf_.begin());
    }

private:
    std::vector<double> cdf_;
    double total_ = 0.0;
};

double require_number(const json& j, const char* key, double fallback,
                      const std::string& origin) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number())
        throw ParseError(origin, 0, std::string("'") + key + "' must be a number");
    return j.at(key).get<double>();
}

uint64_t require_count(const json& j, const char* key, uint64_t fallback,
                       const std::string& origin) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer() || j.at(key).get<int64_t>() < 0)
        throw ParseError(origin, 0,
                         std::string("'") + key + "' must be a non-negative integer");
    return j.at(key).get<uint64_t>();
}

}  // namespace

void validate_synth_spec(const SynthSpec& spec) {
    auto fail = [](const std::string& what) { throw ValidationError("synth spec: " + what); };

    if (spec.channel_count < 1) fail("channels.count must be >= 1");
    if (spec.questionable_channels > spec.channel_count)
        fail("channels.questionable exceeds channels.count");
    if (spec.videos_min < 1 || spec.videos_min > spec.videos_max)
        fail("videos_per_channel range must satisfy 1 <= min <= max");
    if (spec.comments_min < 1 || spec.comments_min > spec.comments_max)
        fail("comments_per_video range must satisfy 1 <= min <= max");
    if (spec.comments_max > 1000000) fail("comments_per_video.max too large");
    if (spec.videos_max > 1000000) fail("videos_per_channel.max too large");
    if (spec.videos_alpha < 0.0 || spec.comments_alpha < 0.0)
        fail("power-law alpha must be >= 0");
    if (spec.user_count < 1) fail("users.count must be >= 1");
    if (spec.leaning_jitter < 0.0) fail("users.jitter must be >= 0");
    if (spec.leaning_mixture.empty()) fail("users.leaning_mixture must be non-empty");
    double weight_sum = 0.0;
    for (const LeaningComponent& c : spec.leaning_mixture) {
        if (c.weight < 0.0) fail("mixture weight must be >= 0");
        if (c.mean_leaning < 0.0 || c.mean_leaning > 1.0)
            fail("mean_leaning must be in [0, 1]");
        weight_sum += c.weight;
    }
    if (weight_sum <= 0.0) fail("mixture weights must sum to > 0");

    double rate_sum = 0.0;
    for (double r : spec.label_rates) {
        if (r < 0.0 || r > 1.0) fail("label rate outside [0, 1]");
        rate_sum += r;
    }
    if (std::fabs(rate_sum - 1.0) > 1e-9) fail("label rates must sum to 1");

    if (spec.delay_beta != 0.0 && spec.delay_cap_hours <= 0.0)
        fail("delay_cap_hours must be > 0 when delay_beta is nonzero");
    if (spec.delay_sigma_log < 0.0) fail("delay_lognormal.sigma_log must be >= 0");
    if (spec.video_window_days < 1) fail("video_window_days must be >= 1");

    // Worst-case drift keeps every per-comment label probability in [0,1].
    const double pos_term = spec.position_beta *
                            std::log(static_cast<double>(spec.comments_max));
    const double delay_term = spec.delay_beta * spec.delay_cap_hours;
    const double z_hi = std::max(0.0, pos_term) + std::max(0.0, delay_term);
    const double z_lo = std::min(0.0, pos_term) + std::min(0.0, delay_term);
    if (spec.label_rates[0] - z_hi / 3.0 < 0.0 ||
        spec.label_rates[3] + z_hi / 3.0 > 1.0 ||
        spec.label_rates[3] + z_lo / 3.0 < 0.0 ||
        spec.label_rates[0] - z_lo / 3.0 > 1.0)
        fail("escalation drift pushes a label probability outside [0, 1] "
             "at the extremes of the position/delay range");
}

SynthSpec parse_synth_spec(const std::string& json_text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(origin, 0, e.what());
    }
    if (!doc.is_object()) throw ParseError(origin, 0, "spec must be a JSON object");

    SynthSpec spec;
    if (doc.contains("channels")) {
        const json& j = doc.at("channels");
        spec.channel_count = require_count(j, "count", spec.channel_count, origin);
        spec.questionable_channels =
            require_count(j, "questionable", spec.questionable_channels, origin);
    }
    if (doc.contains("videos_per_channel")) {
        const json& j = doc.at("videos_per_channel");
        spec.videos_min = require_count(j, "min", spec.videos_min, origin);
        spec.videos_max = require_count(j, "max", spec.videos_max, origin);
        spec.videos_alpha = require_number(j, "alpha", spec.videos_alpha, origin);
    }
    if (doc.contains("comments_per_video")) {
        const json& j = doc.at("comments_per_video");
        spec.comments_min = require_count(j, "min", spec.comments_min, origin);
        spec.comments_max = require_count(j, "max", spec.comments_max, origin);
        spec.comments_alpha = require_number(j, "alpha", spec.comments_alpha, origin);
    }
    if (doc.contains("users")) {
        const json& j = doc.at("users");
        spec.user_count = require_count(j, "count", spec.user_count, origin);
        spec.leaning_jitter = require_number(j, "jitter", spec.leaning_jitter, origin);
        if (j.contains("leaning_mixture")) {
            if (!j.at("leaning_mixture").is_array())
                throw ParseError(origin, 0, "'leaning_mixture' must be an array");
            spec.leaning_mixture.clear();
            for (const json& c : j.at("leaning_mixture")) {
                LeaningComponent comp;
                comp.weight = require_number(c, "weight", 1.0, origin);
                comp.mean_leaning = require_number(c, "mean_leaning", 0.5, origin);
                spec.leaning_mixture.push_back(comp);
            }
        }
    }
    if (doc.contains("label_rates")) {
        const json& j = doc.at("label_rates");
        const char* keys[] = {"A", "I", "O", "V"};
        for (size_t i = 0; i < kNumLabels; ++i)
            spec.label_rates[i] =
                require_number(j, keys[i], spec.label_rates[i], origin);
    }
    if (doc.contains("escalation")) {
        const json& j = doc.at("escalation");
        spec.position_beta =
            require_number(j, "position_beta", spec.position_beta, origin);
        spec.delay_beta = require_number(j, "delay_beta", spec.delay_beta, origin);
        spec.delay_cap_hours =
            require_number(j, "delay_cap_hours", spec.delay_cap_hours, origin);
    }
    if (doc.contains("delay_lognormal")) {
        const json& j = doc.at("delay_lognormal");
        spec.delay_mu_log = require_number(j, "mu_log", spec.delay_mu_log, origin);
        spec.delay_sigma_log =
            require_number(j, "sigma_log", spec.delay_sigma_log, origin);
    }
    if (doc.contains("start")) {
        if (!doc.at("start").is_string())
            throw ParseError(origin, 0, "'start' must be an ISO-8601 string");
        spec.start = parse_iso8601(doc.at("start").get<std::string>());
    }
    spec.video_window_days =
        require_count(doc, "video_window_days", spec.video_window_days, origin);

    validate_synth_spec(spec);
    return spec;
}

SynthSpec load_synth_spec(const std::string& path) {
    std::string text;
    {
        FILE* f = std::fopen(path.c_str(), "rb");
        if (!f) throw ParseError(path, 0, "cannot open file");
        char buf[65536];
        size_t got;
        while ((got = std::fread(buf, 1, sizeof(buf), f)) > 0) text.append(buf, got);
        std::fclose(f);
    }
    return parse_synth_spec(text, path);
}

std::string render_synth_spec_json(const SynthSpec& spec) {
    ordered_json doc;
    doc["channels"] = {{"count", spec.channel_count},
                       {"questionable", spec.questionable_channels}};
    doc["videos_per_channel"] = {{"min", spec.videos_min},
                                 {"max", spec.videos_max},
                                 {"alpha", spec.videos_alpha}};
    doc["comments_per_video"] = {{"min", spec.comments_min},
                                 {"max", spec.comments_max},
                                 {"alpha", spec.comments_alpha}};
    ordered_json mixture = ordered_json::array();
    for (const LeaningComponent& c : spec.leaning_mixture)
        mixture.push_back({{"weight", c.weight}, {"mean_leaning", c.mean_leaning}});
    doc["users"] = {{"count", spec.user_count},
                    {"jitter", spec.leaning_jitter},
                    {"leaning_mixture", mixture}};
    doc["label_rates"] = {{"A", spec.label_rates[0]},
                          {"I", spec.label_rates[1]},
                          {"O", spec.label_rates[2]},
                          {"V", spec.label_rates[3]}};
    doc["escalation"] = {{"position_beta", spec.position_beta},
                         {"delay_beta", spec.delay_beta},
                         {"delay_cap_hours", spec.delay_cap_hours}};
    doc["delay_lognormal"] = {{"mu_log", spec.delay_mu_log},
                              {"sigma_log", spec.delay_sigma_log}};
    doc["start"] = format_iso8601(spec.start);
    doc["video_window_days"] = spec.video_window_days;
    return doc.dump(2) + "\n";
}

Corpus synth_corpus(const SynthSpec& spec, uint64_t seed) {
    validate_synth_spec(spec);

    Rng rng(derive_seed(seed, "synth-corpus"));
    CorpusBuilder builder;

    for (uint64_t ch = 0; ch < spec.channel_count; ++ch)
        builder.add_channel(padded_id("ch", 5, ch + 1),
                            ch < spec.questionable_channels
                                ? ChannelCategory::Questionable
                                : ChannelCategory::Reliable);

    // User leanings drive which users comment where: a questionable video
    // picks commenters with probability proportional to their leaning, a
    // reliable one proportional to 1 - leaning.
    std::vector<double> component_weights;
    component_weights.reserve(spec.leaning_mixture.size());
    for (const LeaningComponent& c : spec.leaning_mixture)
        component_weights.push_back(c.weight);
    WeightedPick component_pick(component_weights);

    std::vector<double> leanings(spec.user_count);
    for (uint64_t u = 0; u < spec.user_count; ++u) {
        const LeaningComponent& comp = spec.leaning_mixture[component_pick.draw(rng)];
        const double jitter = spec.leaning_jitter * (2.0 * rng.next_double() - 1.0);
        leanings[u] = std::clamp(comp.mean_leaning + jitter, 0.0, 1.0);
    }
    std::vector<double> anti_leanings(spec.user_count);
    for (uint64_t u = 0; u < spec.user_count; ++u)
        anti_leanings[u] = 1.0 - leanings[u];
    WeightedPick questionable_pick(leanings);
    WeightedPick reliable_pick(anti_leanings);

    auto pick_user = [&](ChannelCategory category) -> uint64_t {
        const WeightedPick& pick = category == ChannelCategory::Questionable
                                       ? questionable_pick
                                       : reliable_pick;
        if (pick.valid()) return pick.draw(rng);
        return rng.below(spec.user_count);  // degenerate one-sided population
    };

    DiscretePowerLaw videos_dist(spec.videos_min, spec.videos_max, spec.videos_alpha);
    DiscretePowerLaw comments_dist(spec.comments_min, spec.comments_max,
                                   spec.comments_alpha);

    const int64_t window_seconds =
        static_cast<int64_t>(spec.video_window_days) * 86400;

    uint64_t video_seq = 0;
    uint64_t comment_seq = 0;
    std::vector<double> delays;
    for (uint64_t ch = 0; ch < spec.channel_count; ++ch) {
        const std::string channel_id = padded_id("ch", 5, ch + 1);
        const ChannelCategory category = ch < spec.questionable_channels
                                             ? ChannelCategory::Questionable
                                             : ChannelCategory::Reliable;
        const uint64_t video_count = videos_dist.draw(rng);
        for (uint64_t v = 0; v < video_count; ++v) {
            const std::string video_id = padded_id("v", 6, ++video_seq);
            const int64_t published =
                spec.start +
                static_cast<int64_t>(rng.below(static_cast<uint64_t>(window_seconds)));
            builder.add_video(video_id, channel_id, "video " + video_id, "",
                              published);

            const uint64_t comment_count = comments_dist.draw(rng);
            delays.clear();
            delays.reserve(comment_count);
            for (uint64_t k = 0; k < comment_count; ++k)
                delays.push_back(
                    rng.lognormal(spec.delay_mu_log, spec.delay_sigma_log));
            // Chronological order defines the planted position, and ids are
            // assigned in the same order, so sub-second timestamp ties
            // cannot reorder comments at analysis time.
            std::sort(delays.begin(), delays.end());

            for (uint64_t p = 1; p <= comment_count; ++p) {
                const double delay_hours = delays[p - 1];
                double z = spec.position_beta * std::log(static_cast<double>(p));
                if (spec.delay_beta != 0.0)
                    z += spec.delay_beta *
                         std::min(delay_hours, spec.delay_cap_hours);
                const double shift = z / 3.0;

                double thresholds[kNumLabels];
                thresholds[0] = spec.label_rates[0] - shift;
                thresholds[1] = thresholds[0] + spec.label_rates[1];
                thresholds[2] = thresholds[1] + spec.label_rates[2];
                thresholds[3] = 1.0;
                const double u = rng.next_double();
                int t = 0;
                while (t < kNumLabels - 1 && u >= thresholds[t]) ++t;

                const uint64_t user = pick_user(category);
                const int64_t comment_time =
                    published + std::llround(delay_hours * 3600.0);
                builder.add_comment(padded_id("c", 8, ++comment_seq), video_id,
                                    padded_id("u", 6, user + 1), comment_time,
                                    static_cast<HateLabel>(t), std::nullopt);
            }
        }
    }
    return builder.build();
}

}  // namespace ctox
