#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "commentox/corpus.hpp"
#include "commentox/errors.hpp"
#include "commentox/synth.hpp"
#include "commentox/toxicity.hpp"
#include "testutil.hpp"

using namespace ctox;
using testutil::TempDir;

namespace {

// Small but non-trivial corpus shape shared by the statistical checks.
SynthSpec small_spec() {
    SynthSpec spec;
    spec.channel_count = 4;
    spec.questionable_channels = 1;
    spec.videos_min = 2;
    spec.videos_max = 6;
    spec.comments_min = 20;
    spec.comments_max = 120;
    spec.user_count = 60;
    return spec;
}

std::map<HateLabel, uint64_t> label_tally(const Corpus& corpus) {
    std::map<HateLabel, uint64_t> tally;
    for (const Comment& c : corpus.comments()) ++tally[*c.label];
    return tally;
}

}  // namespace

TEST_CASE("synth spec: validation rejects inconsistent fields") {
    SynthSpec bad = small_spec();
    bad.questionable_channels = 99;
    CHECK_THROWS_WITH_AS((void)validate_synth_spec(bad),
                         doctest::Contains("exceeds"), ValidationError);

    bad = small_spec();
    bad.channel_count = 0;
    CHECK_THROWS_AS((void)validate_synth_spec(bad), ValidationError);

    bad = small_spec();
    bad.videos_min = 5;
    bad.videos_max = 2;
    CHECK_THROWS_AS((void)validate_synth_spec(bad), ValidationError);

    bad = small_spec();
    bad.comments_min = 0;
    CHECK_THROWS_AS((void)validate_synth_spec(bad), ValidationError);

    bad = small_spec();
    bad.user_count = 0;
    CHECK_THROWS_AS((void)validate_synth_spec(bad), ValidationError);

    bad = small_spec();
    bad.leaning_jitter = -0.5;
    CHECK_THROWS_AS((void)validate_synth_spec(bad), ValidationError);

    bad = small_spec();
    bad.leaning_mixture.clear();
    CHECK_THROWS_AS((void)validate_synth_spec(bad), ValidationError);

    bad = small_spec();
    bad.leaning_mixture = {{1.0, 1.5}};
    CHECK_THROWS_AS((void)validate_synth_spec(bad), ValidationError);

    bad = small_spec();
    bad.label_rates = {0.5, 0.3, 0.3, 0.2};  // sums to 1.3
    CHECK_THROWS_WITH_AS((void)validate_synth_spec(bad),
                         doctest::Contains("sum to 1"), ValidationError);

    bad = small_spec();
    bad.label_rates = {1.1, -0.1, 0.0, 0.0};
    CHECK_THROWS_AS((void)validate_synth_spec(bad), ValidationError);

    bad = small_spec();
    bad.delay_beta = 0.01;  // cap left at zero
    CHECK_THROWS_WITH_AS((void)validate_synth_spec(bad),
                         doctest::Contains("delay_cap_hours"), ValidationError);

    SUBCASE("drift must keep probabilities inside [0, 1]") {
        SynthSpec drifted = small_spec();
        // worst-case shift 0.6 * ln(120) / 3 = 0.96 exceeds the 0.9 mass
        drifted.position_beta = 0.6;
        CHECK_THROWS_WITH_AS((void)validate_synth_spec(drifted),
                             doctest::Contains("drift"), ValidationError);

        drifted = small_spec();
        drifted.position_beta = -0.1;  // violent mass went negative
        CHECK_THROWS_AS((void)validate_synth_spec(drifted), ValidationError);

        drifted = small_spec();
        drifted.position_beta = 0.05;  // worst case 0.05*ln(120) = 0.24, fine
        CHECK_NOTHROW(validate_synth_spec(drifted));
    }
}

TEST_CASE("synth spec: json renders and parses as a fixed point") {
    SynthSpec spec;  // defaults
    std::string text = render_synth_spec_json(spec);
    SynthSpec parsed = parse_synth_spec(text);
    CHECK(render_synth_spec_json(parsed) == text);

    SynthSpec custom = small_spec();
    custom.leaning_mixture = {{0.7, 0.2}, {0.3, 0.8}};
    custom.position_beta = 0.03;
    custom.start = 1596240000;  // 2020-08-01
    custom.video_window_days = 30;
    std::string custom_text = render_synth_spec_json(custom);
    SynthSpec reparsed = parse_synth_spec(custom_text);
    CHECK(render_synth_spec_json(reparsed) == custom_text);
    CHECK(reparsed.leaning_mixture.size() == 2);
    CHECK(reparsed.leaning_mixture[1].mean_leaning == 0.8);
    CHECK(reparsed.start == 1596240000);
}

TEST_CASE("synth spec: parsing overrides defaults field by field") {
    SynthSpec spec = parse_synth_spec(
        R"({"channels": {"count": 3, "questionable": 1},
            "comments_per_video": {"min": 5, "max": 50},
            "users": {"count": 40},
            "label_rates": {"A": 0.7, "I": 0.1, "O": 0.1, "V": 0.1}})");
    CHECK(spec.channel_count == 3);
    CHECK(spec.questionable_channels == 1);
    CHECK(spec.comments_min == 5);
    CHECK(spec.comments_max == 50);
    CHECK(spec.user_count == 40);
    CHECK(spec.label_rates[0] == 0.7);
    // untouched fields keep their defaults
    CHECK(spec.videos_min == 1);
    CHECK(spec.videos_max == 20);
    CHECK(spec.delay_mu_log == 3.57);
    CHECK(spec.leaning_mixture.size() == 3);
}

TEST_CASE("synth spec: parse failures carry the origin") {
    CHECK_THROWS_WITH_AS((void)parse_synth_spec("{nope", "myspec.json"),
                         doctest::Contains("myspec.json"), ParseError);
    CHECK_THROWS_WITH_AS((void)parse_synth_spec("[1,2]"),
                         doctest::Contains("object"), ParseError);
    CHECK_THROWS_WITH_AS((void)parse_synth_spec(R"({"channels": {"count": -2}})"),
                         doctest::Contains("count"), ParseError);
    CHECK_THROWS_WITH_AS((void)parse_synth_spec(R"({"start": 12345})"),
                         doctest::Contains("ISO-8601"), ParseError);
    CHECK_THROWS_WITH_AS(
        (void)parse_synth_spec(R"({"users": {"leaning_mixture": 7}})"),
        doctest::Contains("array"), ParseError);
    // structurally valid JSON with inconsistent values fails validation
    CHECK_THROWS_AS((void)parse_synth_spec(
                        R"({"label_rates": {"A": 0.5, "I": 0.1, "O": 0.1, "V": 0.1}})"),
                    ValidationError);
    CHECK_THROWS_AS((void)load_synth_spec("/nonexistent/spec.json"), ParseError);
}

TEST_CASE("synth corpus: structural invariants") {
    SynthSpec spec = small_spec();
    Corpus corpus = synth_corpus(spec, 77);

    REQUIRE(corpus.channels().size() == 4);
    CHECK(corpus.channels()[0].id == "ch00001");
    CHECK(corpus.channels()[0].category == ChannelCategory::Questionable);
    for (size_t i = 1; i < 4; ++i)
        CHECK(corpus.channels()[i].category == ChannelCategory::Reliable);

    // zero-padded id schemes
    CHECK(corpus.videos().front().id == "v000001");
    CHECK(corpus.comments().front().id == "c00000001");
    for (const Comment& c : corpus.comments()) {
        CHECK(c.user_id.size() == 7);
        CHECK(c.user_id[0] == 'u');
        CHECK(!c.text.has_value());
    }
    CHECK(corpus.fully_labeled());

    // per-channel video counts stay inside the configured range
    std::vector<uint64_t> videos_per_channel(corpus.channels().size(), 0);
    for (const Video& v : corpus.videos()) {
        ++videos_per_channel[v.channel_index];
        CHECK(v.published_at >= spec.start);
        CHECK(v.published_at <
              spec.start + static_cast<int64_t>(spec.video_window_days) * 86400);
    }
    for (uint64_t count : videos_per_channel) {
        CHECK(count >= spec.videos_min);
        CHECK(count <= spec.videos_max);
    }

    // per-video comment counts too, and no comment precedes its video
    std::vector<uint64_t> comments_per_video(corpus.videos().size(), 0);
    for (const Comment& c : corpus.comments()) {
        ++comments_per_video[c.video_index];
        CHECK(c.published_at >= corpus.video_of(c).published_at);
    }
    for (uint64_t count : comments_per_video) {
        CHECK(count >= spec.comments_min);
        CHECK(count <= spec.comments_max);
    }

    // within a video, ascending ids follow ascending timestamps, so the
    // analysis-side discussion order reproduces the generated positions
    for (size_t i = 1; i < corpus.comments().size(); ++i) {
        const Comment& prev = corpus.comments()[i - 1];
        const Comment& cur = corpus.comments()[i];
        CHECK(cur.id > prev.id);
        if (cur.video_index == prev.video_index)
            CHECK(cur.published_at >= prev.published_at);
    }
}

TEST_CASE("synth corpus: deterministic per seed, byte-stable on disk") {
    SynthSpec spec = small_spec();
    Corpus a = synth_corpus(spec, 123);
    Corpus b = synth_corpus(spec, 123);
    REQUIRE(a.comments().size() == b.comments().size());

    TempDir da, db;
    save_corpus(a, da.path().string());
    save_corpus(b, db.path().string());
    for (const char* name : {"channels.csv", "videos.jsonl", "comments.jsonl"}) {
        CAPTURE(name);
        CHECK(testutil::read_file(da.file(name)) == testutil::read_file(db.file(name)));
    }

    Corpus other = synth_corpus(spec, 124);
    bool differs = other.comments().size() != a.comments().size();
    if (!differs) {
        for (size_t i = 0; i < a.comments().size() && !differs; ++i)
            differs = a.comments()[i].published_at != other.comments()[i].published_at ||
                      *a.comments()[i].label != *other.comments()[i].label;
    }
    CHECK(differs);
}

TEST_CASE("synth corpus: label mix matches the configured base rates") {
    SynthSpec spec = small_spec();
    spec.channel_count = 6;
    spec.videos_min = 4;
    spec.videos_max = 8;
    spec.comments_min = 100;
    spec.comments_max = 300;
    Corpus corpus = synth_corpus(spec, 5);
    const double n = static_cast<double>(corpus.comments().size());
    REQUIRE(n > 2000);

    auto tally = label_tally(corpus);
    for (int l = 0; l < kNumLabels; ++l) {
        const double p = spec.label_rates[static_cast<size_t>(l)];
        const double frac =
            static_cast<double>(tally[static_cast<HateLabel>(l)]) / n;
        // five binomial standard deviations around the planted rate
        const double band = 5.0 * std::sqrt(p * (1.0 - p) / n) + 1.0 / n;
        CAPTURE(l);
        CHECK(std::fabs(frac - p) < band);
    }
}

TEST_CASE("synth corpus: planted position drift is recoverable") {
    SynthSpec spec;
    spec.channel_count = 3;
    spec.questionable_channels = 1;
    spec.videos_min = 10;
    spec.videos_max = 10;
    spec.comments_min = 500;
    spec.comments_max = 500;
    spec.user_count = 200;
    spec.position_beta = 0.05;
    Corpus corpus = synth_corpus(spec, 42);
    REQUIRE(corpus.comments().size() == 15000);

    BinnedToxicity binned = position_binned_toxicity(corpus, 24);
    RegressionResult fit = ols_fit(binned.bins);
    // log-spaced bins make E[y] linear in the bin index with slope
    // position_beta * ln(max position) / bins
    const double planted = 0.05 * std::log(500.0) / 24.0;
    CHECK(fit.slope > 0.0);
    CHECK(fit.p_slope < 0.001);
    CHECK(fit.slope == doctest::Approx(planted).epsilon(0.25));

    SUBCASE("no drift, no slope") {
        SynthSpec flat = spec;
        flat.position_beta = 0.0;
        Corpus calm = synth_corpus(flat, 42);
        RegressionResult none = ols_fit(position_binned_toxicity(calm, 24).bins);
        CHECK(std::fabs(none.slope) < planted / 3.0);
        CHECK(none.p_slope > 0.05);  // stable: same frozen seed
    }
}

TEST_CASE("synth corpus: delay drift raises toxicity of late comments") {
    SynthSpec spec;
    spec.channel_count = 2;
    spec.questionable_channels = 1;
    spec.videos_min = 8;
    spec.videos_max = 8;
    spec.comments_min = 400;
    spec.comments_max = 400;
    spec.user_count = 100;
    spec.delay_beta = 0.015;
    spec.delay_cap_hours = 48.0;
    Corpus corpus = synth_corpus(spec, 7);

    double early_sum = 0, late_sum = 0;
    uint64_t early_n = 0, late_n = 0;
    for (const Comment& c : corpus.comments()) {
        const double delay =
            static_cast<double>(c.published_at - corpus.video_of(c).published_at) /
            3600.0;
        const double tox = static_cast<double>(toxicity_value(*c.label));
        if (delay < 12.0) {
            early_sum += tox;
            ++early_n;
        } else if (delay >= 48.0) {
            late_sum += tox;
            ++late_n;
        }
    }
    REQUIRE(early_n > 200);
    REQUIRE(late_n > 200);
    const double gap = late_sum / static_cast<double>(late_n) -
                       early_sum / static_cast<double>(early_n);
    // capped-delay shift separates the groups by at least ~0.015 * 36h
    CHECK(gap > 0.3);
}

TEST_CASE("synth corpus: leaning mixture polarizes commenting") {
    // one-sided mixtures put nearly all questionable-channel comments on the
    // matching user population
    SynthSpec spec = small_spec();
    spec.leaning_mixture = {{0.5, 0.05}, {0.5, 0.95}};
    spec.leaning_jitter = 0.05;
    Corpus corpus = synth_corpus(spec, 21);

    // users split by where they actually comment
    std::map<std::string, std::pair<uint64_t, uint64_t>> per_user;  // (q, total)
    for (const Comment& c : corpus.comments()) {
        auto& [q, total] = per_user[c.user_id];
        ++total;
        if (corpus.category_of(c) == ChannelCategory::Questionable) ++q;
    }
    uint64_t polarized = 0, active = 0;
    for (const auto& [user, counts] : per_user) {
        if (counts.second < 10) continue;
        ++active;
        const double leaning = static_cast<double>(counts.first) /
                               static_cast<double>(counts.second);
        if (leaning < 0.35 || leaning > 0.65) ++polarized;
    }
    REQUIRE(active > 20);
    // a clear majority of active users lean to one side
    CHECK(static_cast<double>(polarized) / static_cast<double>(active) > 0.6);
}

TEST_CASE("synth corpus: generation validates the spec first") {
    SynthSpec bad = small_spec();
    bad.label_rates = {0.5, 0.5, 0.5, 0.5};
    CHECK_THROWS_AS((void)synth_corpus(bad, 1), ValidationError);
}
