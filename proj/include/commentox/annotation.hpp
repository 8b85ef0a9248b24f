#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "commentox/corpus.hpp"
#include "commentox/types.hpp"

namespace ctox {

// --- screening classifier ----------------------------------------------

struct LexiconEntry {
    std::string term;  // single- or multi-word, matched whole-word
    int penalty = 1;   // 1..3
};

// lexicon.csv with header term,penalty.
std::vector<LexiconEntry> load_lexicon(const std::string& path);

// Screening score in [-3, +3]: +3 (normal) minus the penalties of matched
// lexicon terms, clamped. Matching is case-insensitive on whole-word
// boundaries; each term counts once no matter how often it occurs.
int basic_score(std::string_view text, std::span<const LexiconEntry> lexicon);

struct ScoreSet {
    std::vector<int> scores;  // parallel to corpus.comments()
    bool lexicon_empty = false;
};

// Scores every comment; comments without text score +3.
ScoreSet score_comments(const Corpus& corpus, std::span<const LexiconEntry> lexicon);

// --- thread selection ---------------------------------------------------

struct SelectedThread {
    std::string video_id;
    uint64_t comments = 0;
    uint64_t hateful = 0;  // comments with score < 0
    double hateful_fraction = 0.0;
};

// Threads (all comments of a video) whose length lies in [min_len, max_len]
// and whose hateful fraction is at least min_hateful. `scores` must be
// parallel to corpus.comments(). Result sorted by video_id.
std::vector<SelectedThread> select_training_threads(const Corpus& corpus,
                                                    std::span<const int> scores,
                                                    uint64_t min_len = 10,
                                                    uint64_t max_len = 500,
                                                    double min_hateful = 0.05);

struct ThreadSample {
    std::vector<std::string> video_ids;  // sorted
    uint64_t total_comments = 0;
    bool exhausted = false;  // target exceeded the corpus
};

// Uniformly samples whole threads without replacement until the sampled
// comment count reaches target_comments. Deterministic per seed.
ThreadSample sample_evaluation_threads(const Corpus& corpus,
                                       uint64_t target_comments, uint64_t seed);

// --- annotator assignment ----------------------------------------------

struct ThreadSize {
    std::string id;
    uint64_t comments = 0;
};

struct AnnotatorAssignment {
    int annotators = 0;
    int redundancy = 0;
    std::vector<std::vector<int>> groups;  // all C(k, r) annotator tuples
    std::vector<size_t> thread_group;      // per input thread: index into groups
    std::vector<uint64_t> group_loads;     // comments per tuple
};

// Greedy balancing: threads sorted by size descending, each handed to the
// annotator tuple with the smallest current load. Threads stay intact, so
// every comment of a thread is seen by the same `redundancy` annotators.
// Ties among equally loaded tuples are broken by a seed-derived order.
AnnotatorAssignment assign_annotators(std::span<const ThreadSize> threads, int k = 8,
                                      int redundancy = 2, uint64_t seed = 0);

std::string render_assignment_csv(std::span<const ThreadSize> threads,
                                  const AnnotatorAssignment& assignment);

// --- agreement ----------------------------------------------------------

struct AnnotationRecord {
    std::string comment_id;
    std::string annotator_id;
    HateLabel label = HateLabel::Appropriate;
};

// annotations.csv with header comment_id,annotator_id,label. Enforces
// (comment_id, annotator_id) uniqueness.
std::vector<AnnotationRecord> load_annotations(const std::string& path);

// Interval Krippendorff alpha over units holding >= 2 numeric values each
// (singly valued units must already be excluded by the caller of this
// low-level form). alpha = 1 - D_o/D_e with squared-difference distance;
// returns 1.0 when all values coincide (zero expected disagreement).
double krippendorff_interval(const std::vector<std::vector<double>>& units);

// Groups records by comment, maps labels to their toxicity values, drops
// singly annotated units, and applies the interval metric. Throws StatError
// when every unit has fewer than two annotations.
double krippendorff_alpha(std::span<const AnnotationRecord> records);

// Fraction of units whose two annotations agree. Every unit must have
// exactly two records; otherwise throws ValidationError naming the unit.
double percent_agreement(std::span<const AnnotationRecord> records);

struct AgreementReport {
    double alpha = 0.0;
    double acc = 0.0;
    uint64_t size = 0;  // number of annotation records
};

AgreementReport agreement_report(std::span<const AnnotationRecord> records);

// --- classification evaluation -------------------------------------------

struct ClassF1 {
    double f1 = 0.0;
    bool absent = false;  // class occurs in neither predictions nor records
};

// One-vs-rest F1 per label. Each annotation record is one evaluation
// instance; the prediction for its comment is scored against the recorded
// label. Missing predictions are an error.
std::array<ClassF1, kNumLabels> per_class_f1(
    const std::unordered_map<std::string, HateLabel>& predictions_by_comment,
    std::span<const AnnotationRecord> records);

// Port filled by any comment labeler (the production model lives behind
// this interface; the lexicon baseline ships with the library).
class LabelerPort {
public:
    virtual ~LabelerPort() = default;
    virtual std::string name() const = 0;
    virtual std::string version() const = 0;
    // Total over comments: must return a label for any comment.
    virtual HateLabel label(const Comment& comment) const = 0;
    virtual bool thread_safe() const { return true; }
};

// Deterministic baseline mapping the screening score to labels:
// score >= 0 -> A, -1 -> I, -2 -> O, <= -3 -> V.
class LexiconLabeler : public LabelerPort {
public:
    explicit LexiconLabeler(std::vector<LexiconEntry> lexicon);
    std::string name() const override { return "lexicon-baseline"; }
    std::string version() const override;
    HateLabel label(const Comment& comment) const override;

private:
    std::vector<LexiconEntry> lexicon_;
};

// Precomputed predictions from a labels.csv-format file; this is how
// external model output enters the evaluation protocol.
class FileLabeler : public LabelerPort {
public:
    explicit FileLabeler(const std::string& predictions_path);
    std::string name() const override { return "file"; }
    std::string version() const override { return version_; }
    HateLabel label(const Comment& comment) const override;

private:
    std::unordered_map<std::string, HateLabel> predictions_;
    std::string version_;
};

class ConstantLabeler : public LabelerPort {
public:
    explicit ConstantLabeler(HateLabel value) : value_(value) {}
    std::string name() const override { return "constant"; }
    std::string version() const override { return std::string(1, label_code(value_)); }
    HateLabel label(const Comment&) const override { return value_; }

private:
    HateLabel value_;
};

// --- annotator-fold cross-validation -------------------------------------

struct FoldMetrics {
    double alpha = 0.0;
    bool alpha_defined = false;
    double acc = 0.0;
    std::array<ClassF1, kNumLabels> f1{};
    uint64_t test_records = 0;
    uint64_t train_records = 0;
};

struct FoldReport {
    std::string annotator_id;
    FoldMetrics metrics;
};

struct CVReport {
    std::string labeler_name;
    std::string labeler_version;
    std::vector<FoldReport> folds;
    FoldMetrics pooled;  // micro: union of fold test sets
    FoldMetrics macro;   // unweighted mean over folds
    std::vector<std::string> warnings;
};

struct CVFold {
    std::string annotator_id;
    std::vector<size_t> test_records;   // indices into the record span
    std::vector<size_t> train_records;  // indices into the record span
};

// The fold partition behind annotator_fold_cv: one fold per annotator,
// test = that annotator's records, train = every record whose comment does
// not occur in the fold's test set (comment-level leakage exclusion).
// Folds are ordered by annotator_id.
std::vector<CVFold> cv_folds(std::span<const AnnotationRecord> records);

// One fold per distinct annotator: fold i tests on annotator i's records;
// its training pool excludes every record whose comment appears in the test
// set, so folds never leak comments. Metrics compare the labeler's output
// against the held-out annotations, per fold and pooled.
CVReport annotator_fold_cv(const LabelerPort& labeler, const Corpus& corpus,
                           std::span<const AnnotationRecord> records);

std::string render_cv_report_json(const CVReport& report);

}  // namespace ctox
