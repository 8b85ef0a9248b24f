#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "commentox/corpus.hpp"
#include "commentox/types.hpp"

namespace ctox {

// Synthetic corpora with known ground truth for acceptance and property
// tests: power-law thread sizes, a user population with a planted leaning
// mixture, label base rates, and an optional toxicity drift that is exactly
// linear in z = position_beta*ln(position) + delay_beta*min(delay, cap).
// The drift moves probability mass from Appropriate to Violent by z/3, so
// E[toxicity | z] = E0 + z.

struct LeaningComponent {
    double weight = 1.0;
    double mean_leaning = 0.5;  // component center, jittered per user
};

struct SynthSpec {
    uint64_t channel_count = 10;
    uint64_t questionable_channels = 2;

    uint64_t videos_min = 1;
    uint64_t videos_max = 20;
    double videos_alpha = 2.0;  // P(k) ~ k^-alpha over [min, max]

    uint64_t comments_min = 10;
    uint64_t comments_max = 2000;
    double comments_alpha = 2.0;

    uint64_t user_count = 500;
    double leaning_jitter = 0.1;  // uniform half-width around the component mean
    std::vector<LeaningComponent> leaning_mixture = {
        {0.45, 0.1}, {0.45, 0.9}, {0.1, 0.5}};

    // Base label probabilities at z = 0, in A, I, O, V order.
    std::array<double, kNumLabels> label_rates{0.90, 0.05, 0.03, 0.02};

    double position_beta = 0.0;
    double delay_beta = 0.0;      // per hour of (capped) delay
    double delay_cap_hours = 0.0;  // required > 0 when delay_beta != 0

    double delay_mu_log = 3.57;    // ln-hours; defaults give mean ~120 h
    double delay_sigma_log = 1.56;

    int64_t start = 1579046400;  // 2020-01-15T00:00:00Z
    uint64_t video_window_days = 120;
};

// Field-by-field validation; throws ValidationError with the offending
// field. The drift bound check uses the worst-case z over the spec's
// position and delay ranges so every per-comment probability stays in [0,1].
void validate_synth_spec(const SynthSpec& spec);

// JSON document; every field optional, missing ones keep the defaults
// above. See render_synth_spec_json for the exact key layout.
SynthSpec parse_synth_spec(const std::string& json_text,
                           const std::string& origin = "synth-spec");
SynthSpec load_synth_spec(const std::string& path);

// Canonical JSON rendering of a spec (also documents the schema).
std::string render_synth_spec_json(const SynthSpec& spec);

// Deterministic per (spec, seed); ids are zero-padded so the canonical
// serialization is byte-stable. Comments of a video are emitted in
// chronological order with ascending ids, so analysis-side ordering (time,
// then id) reproduces the generated positions exactly.
Corpus synth_corpus(const SynthSpec& spec, uint64_t seed);

}  // namespace ctox
