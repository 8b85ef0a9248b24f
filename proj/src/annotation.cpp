#include "commentox/annotation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "commentox/csv.hpp"
#include "commentox/errors.hpp"
#include "commentox/rng.hpp"
#include "commentox/strutil.hpp"

namespace ctox {

namespace {

using ordered_json = nlohmann::ordered_json;

// Words are maximal runs of ASCII alphanumerics or non-ASCII bytes, so
// accented UTF-8 text tokenizes without a Unicode library.
std::vector<std::string> word_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        bool word_char = (c >= 0x80) || std::isalnum(c);
        if (word_char) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

bool contains_token_seq(const std::vector<std::string>& words,
                        const std::vector<std::string>& seq) {
    if (seq.empty() || seq.size() > words.size()) return false;
    for (size_t i = 0; i + seq.size() <= words.size(); ++i) {
        bool hit = true;
        for (size_t j = 0; j < seq.size(); ++j) {
            if (words[i + j] != seq[j]) {
                hit = false;
                break;
            }
        }
        if (hit) return true;
    }
    return false;
}

std::vector<std::vector<int>> combinations(int k, int r) {
    std::vector<std::vector<int>> out;
    std::vector<int> current;
    // iterative lexicographic enumeration
    current.resize(static_cast<size_t>(r));
    std::iota(current.begin(), current.end(), 0);
    while (true) {
        out.push_back(current);
        int i = r - 1;
        while (i >= 0 && current[static_cast<size_t>(i)] == k - r + i) --i;
        if (i < 0) break;
        ++current[static_cast<size_t>(i)];
        for (int j = i + 1; j < r; ++j)
            current[static_cast<size_t>(j)] = current[static_cast<size_t>(j - 1)] + 1;
    }
    return out;
}

struct UnitValues {
    std::vector<std::vector<double>> units;
};

UnitValues units_from_records(std::span<const AnnotationRecord> records,
                              bool require_pairs) {
    std::map<std::string_view, std::vector<double>> by_comment;
    for (const AnnotationRecord& rec : records)
        by_comment[rec.comment_id].push_back(
            static_cast<double>(toxicity_value(rec.label)));

    UnitValues out;
    for (auto& [id, values] : by_comment) {
        if (require_pairs && values.size() != 2)
            throw ValidationError("unit '" + std::string(id) + "' has " +
                                  std::to_string(values.size()) +
                                  " annotations, expected exactly 2");
        if (values.size() >= 2) out.units.push_back(std::move(values));
    }
    return out;
}

FoldMetrics evaluate_predictions(
    const std::unordered_map<std::string, HateLabel>& predictions,
    std::span<const AnnotationRecord> records) {
    FoldMetrics m;
    m.test_records = records.size();

    std::vector<std::vector<double>> units;
    units.reserve(records.size());
    size_t agree = 0;
    for (const AnnotationRecord& rec : records) {
        HateLabel pred = predictions.at(rec.comment_id);
        if (pred == rec.label) ++agree;
        units.push_back({static_cast<double>(toxicity_value(pred)),
                         static_cast<double>(toxicity_value(rec.label))});
    }
    if (!records.empty()) {
        m.acc = static_cast<double>(agree) / static_cast<double>(records.size());
        m.alpha = krippendorff_interval(units);
        m.alpha_defined = true;
        m.f1 = per_class_f1(predictions, records);
    }
    return m;
}

ordered_json f1_json(const std::array<ClassF1, kNumLabels>& f1) {
    ordered_json out;
    for (int i = 0; i < kNumLabels; ++i) {
        const auto label = static_cast<HateLabel>(i);
        ordered_json cell;
        cell["f1"] = f1[static_cast<size_t>(i)].f1;
        if (f1[static_cast<size_t>(i)].absent) cell["absent"] = true;
        out[label_name(label)] = cell;
    }
    return out;
}

ordered_json metrics_json(const FoldMetrics& m) {
    ordered_json out;
    if (m.alpha_defined)
        out["alpha"] = m.alpha;
    else
        out["alpha"] = nullptr;
    out["acc"] = m.acc;
    out["f1"] = f1_json(m.f1);
    out["test_records"] = m.test_records;
    out["train_records"] = m.train_records;
    return out;
}

}  // namespace

// --- screening classifier ----------------------------------------------

std::vector<LexiconEntry> load_lexicon(const std::string& path) {
    std::vector<LexiconEntry> lexicon;
    for_each_csv_row(path, {"term", "penalty"},
                     [&](size_t lineno, const std::vector<std::string>& row) {
                         int penalty = 0;
                         try {
                             penalty = std::stoi(row[1]);
                         } catch (const std::exception&) {
                             throw ParseError(path, lineno,
                                              "penalty must be an integer, got '" +
                                                  row[1] + "'");
                         }
                         if (penalty < 1 || penalty > 3)
                             throw ParseError(path, lineno,
                                              "penalty must be in {1,2,3}, got '" +
                                                  row[1] + "'");
                         if (row[0].empty())
                             throw ParseError(path, lineno, "empty term");
                         lexicon.push_back(LexiconEntry{row[0], penalty});
                     });
    return lexicon;
}

int basic_score(std::string_view text, std::span<const LexiconEntry> lexicon) {
    std::vector<std::string> words = word_tokens(text);
    int total_penalty = 0;
    for (const LexiconEntry& entry : lexicon) {
        if (contains_token_seq(words, word_tokens(entry.term)))
            total_penalty += entry.penalty;
    }
    return std::clamp(3 - total_penalty, -3, 3);
}

ScoreSet score_comments(const Corpus& corpus, std::span<const LexiconEntry> lexicon) {
    ScoreSet out;
    out.lexicon_empty = lexicon.empty();
    out.scores.reserve(corpus.comments().size());
    for (const Comment& c : corpus.comments())
        out.scores.push_back(c.text ? basic_score(*c.text, lexicon) : 3);
    return out;
}

// --- thread selection ---------------------------------------------------

std::vector<SelectedThread> select_training_threads(const Corpus& corpus,
                                                    std::span<const int> scores,
                                                    uint64_t min_len,
                                                    uint64_t max_len,
                                                    double min_hateful) {
    if (scores.size() != corpus.comments().size())
        throw ValidationError("scores must cover every comment (got " +
                              std::to_string(scores.size()) + " for " +
                              std::to_string(corpus.comments().size()) +
                              " comments)");

    std::vector<uint64_t> total(corpus.videos().size(), 0);
    std::vector<uint64_t> hateful(corpus.videos().size(), 0);
    auto comments = corpus.comments();
    for (size_t i = 0; i < comments.size(); ++i) {
        ++total[comments[i].video_index];
        if (scores[i] < 0) ++hateful[comments[i].video_index];
    }

    std::vector<SelectedThread> selected;
    for (size_t v = 0; v < corpus.videos().size(); ++v) {
        if (total[v] < min_len || total[v] > max_len) continue;
        double frac = static_cast<double>(hateful[v]) / static_cast<double>(total[v]);
        if (frac < min_hateful) continue;
        selected.push_back(SelectedThread{corpus.videos()[v].id, total[v], hateful[v], frac});
    }
    std::sort(selected.begin(), selected.end(),
              [](const SelectedThread& a, const SelectedThread& b) {
                  return a.video_id < b.video_id;
              });
    return selected;
}

ThreadSample sample_evaluation_threads(const Corpus& corpus,
                                       uint64_t target_comments, uint64_t seed) {
    struct Entry {
        std::string id;
        uint64_t comments;
    };
    std::vector<uint64_t> counts(corpus.videos().size(), 0);
    for (const Comment& c : corpus.comments()) ++counts[c.video_index];

    std::vector<Entry> threads;
    for (size_t v = 0; v < corpus.videos().size(); ++v)
        if (counts[v] > 0) threads.push_back(Entry{corpus.videos()[v].id, counts[v]});
    std::sort(threads.begin(), threads.end(),
              [](const Entry& a, const Entry& b) { return a.id < b.id; });

    ThreadSample out;
    if (target_comments == 0) return out;

    Rng rng(seed);
    rng.shuffle(threads);
    for (const Entry& t : threads) {
        if (out.total_comments >= target_comments) break;
        out.video_ids.push_back(t.id);
        out.total_comments += t.comments;
    }
    if (out.total_comments < target_comments) out.exhausted = true;
    std::sort(out.video_ids.begin(), out.video_ids.end());
    return out;
}

// --- annotator assignment ----------------------------------------------

AnnotatorAssignment assign_annotators(std::span<const ThreadSize> threads, int k,
                                      int redundancy, uint64_t seed) {
    if (k < 2) throw ValidationError("need at least 2 annotators, got " + std::to_string(k));
    if (redundancy < 1 || redundancy > k)
        throw ValidationError("redundancy must be in [1, k]");
    if (k > 64) throw ValidationError("annotator pool too large (max 64)");

    AnnotatorAssignment out;
    out.annotators = k;
    out.redundancy = redundancy;
    out.groups = combinations(k, redundancy);
    out.group_loads.assign(out.groups.size(), 0);
    out.thread_group.assign(threads.size(), 0);

    // Seeded tie-break order over groups keeps the result deterministic.
    std::vector<size_t> tiebreak(out.groups.size());
    std::iota(tiebreak.begin(), tiebreak.end(), size_t{0});
    Rng rng(seed);
    rng.shuffle(tiebreak);
    std::vector<size_t> rank(out.groups.size());
    for (size_t pos = 0; pos < tiebreak.size(); ++pos) rank[tiebreak[pos]] = pos;

    std::vector<size_t> order(threads.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (threads[a].comments != threads[b].comments)
            return threads[a].comments > threads[b].comments;
        return threads[a].id < threads[b].id;
    });

    for (size_t t : order) {
        size_t best = 0;
        for (size_t g = 1; g < out.groups.size(); ++g) {
            if (out.group_loads[g] < out.group_loads[best] ||
                (out.group_loads[g] == out.group_loads[best] && rank[g] < rank[best]))
                best = g;
        }
        out.thread_group[t] = best;
        out.group_loads[best] += threads[t].comments;
    }
    return out;
}

std::string render_assignment_csv(std::span<const ThreadSize> threads,
                                  const AnnotatorAssignment& assignment) {
    std::string header = "thread_id";
    for (int i = 1; i <= assignment.redundancy; ++i)
        header += ",annotator_" + std::to_string(i);
    std::string out = header + "\n";

    std::vector<size_t> order(threads.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return threads[a].id < threads[b].id; });
    for (size_t t : order) {
        std::vector<std::string> row{threads[t].id};
        for (int annotator : assignment.groups[assignment.thread_group[t]])
            row.push_back("a" + std::to_string(annotator + 1));
        out += join_csv_line(row) + "\n";
    }
    return out;
}

// --- agreement ----------------------------------------------------------

std::vector<AnnotationRecord> load_annotations(const std::string& path) {
    std::vector<AnnotationRecord> records;
    std::unordered_set<std::string> seen;
    for_each_csv_row(path, {"comment_id", "annotator_id", "label"},
                     [&](size_t lineno, const std::vector<std::string>& row) {
                         auto label = parse_hate_label(row[2]);
                         if (!label)
                             throw ParseError(path, lineno,
                                              "invalid label token '" + row[2] + "'");
                         std::string key = row[0] + '\x1f' + row[1];
                         if (!seen.insert(key).second)
                             throw ParseError(path, lineno,
                                              "duplicate annotation for comment '" +
                                                  row[0] + "' by annotator '" +
                                                  row[1] + "'");
                         records.push_back(AnnotationRecord{row[0], row[1], *label});
                     });
    return records;
}

double krippendorff_interval(const std::vector<std::vector<double>>& units) {
    // Coincidence matrix over the distinct values, each within-unit ordered
    // pair weighted by 1/(m_u - 1).
    std::map<double, size_t> value_index;
    for (const auto& unit : units)
        for (double v : unit) value_index.emplace(v, 0);
    size_t next = 0;
    for (auto& [v, idx] : value_index) idx = next++;
    const size_t nv = value_index.size();

    std::vector<double> coincidence(nv * nv, 0.0);
    double n_total = 0.0;
    bool any_unit = false;
    for (const auto& unit : units) {
        const size_t m = unit.size();
        if (m < 2) throw StatError("unit with fewer than 2 values");
        any_unit = true;
        n_total += static_cast<double>(m);
        const double w = 1.0 / static_cast<double>(m - 1);
        for (size_t p = 0; p < m; ++p)
            for (size_t q = 0; q < m; ++q) {
                if (p == q) continue;
                coincidence[value_index[unit[p]] * nv + value_index[unit[q]]] += w;
            }
    }
    if (!any_unit) throw StatError("alpha undefined: no unit with 2+ annotations");

    std::vector<double> values(nv);
    for (const auto& [v, idx] : value_index) values[idx] = v;
    std::vector<double> marginal(nv, 0.0);
    for (size_t a = 0; a < nv; ++a)
        for (size_t b = 0; b < nv; ++b) marginal[a] += coincidence[a * nv + b];

    double observed = 0.0, expected = 0.0;
    for (size_t a = 0; a < nv; ++a) {
        for (size_t b = 0; b < nv; ++b) {
            double d2 = (values[a] - values[b]) * (values[a] - values[b]);
            observed += coincidence[a * nv + b] * d2;
            expected += marginal[a] * marginal[b] * d2;
        }
    }
    observed /= n_total;
    expected /= n_total * (n_total - 1.0);
    if (expected == 0.0) return 1.0;  // all values identical
    return 1.0 - observed / expected;
}

double krippendorff_alpha(std::span<const AnnotationRecord> records) {
    UnitValues grouped = units_from_records(records, /*require_pairs=*/false);
    if (grouped.units.empty())
        throw StatError("alpha undefined: every unit has a single annotation");
    return krippendorff_interval(grouped.units);
}

double percent_agreement(std::span<const AnnotationRecord> records) {
    UnitValues grouped = units_from_records(records, /*require_pairs=*/true);
    if (grouped.units.empty()) throw StatError("no units to compare");
    size_t agree = 0;
    for (const auto& unit : grouped.units)
        if (unit[0] == unit[1]) ++agree;
    return static_cast<double>(agree) / static_cast<double>(grouped.units.size());
}

AgreementReport agreement_report(std::span<const AnnotationRecord> records) {
    AgreementReport report;
    report.alpha = krippendorff_alpha(records);
    report.acc = percent_agreement(records);
    report.size = records.size();
    return report;
}

// --- classification evaluation -------------------------------------------

std::array<ClassF1, kNumLabels> per_class_f1(
    const std::unordered_map<std::string, HateLabel>& predictions_by_comment,
    std::span<const AnnotationRecord> records) {
    std::array<uint64_t, kNumLabels> tp{}, fp{}, fn{};
    for (const AnnotationRecord& rec : records) {
        auto it = predictions_by_comment.find(rec.comment_id);
        if (it == predictions_by_comment.end())
            throw ValidationError("missing prediction for comment '" +
                                  rec.comment_id + "'");
        auto pred = static_cast<size_t>(it->second);
        auto truth = static_cast<size_t>(rec.label);
        if (pred == truth) {
            ++tp[pred];
        } else {
            ++fp[pred];
            ++fn[truth];
        }
    }

    std::array<ClassF1, kNumLabels> out{};
    for (size_t c = 0; c < kNumLabels; ++c) {
        uint64_t support = tp[c] + fp[c] + fn[c];
        if (support == 0) {
            out[c].absent = true;
            continue;
        }
        out[c].f1 = 2.0 * static_cast<double>(tp[c]) /
                    static_cast<double>(2 * tp[c] + fp[c] + fn[c]);
    }
    return out;
}

// --- labelers -------------------------------------------------------------

LexiconLabeler::LexiconLabeler(std::vector<LexiconEntry> lexicon)
    : lexicon_(std::move(lexicon)) {}

std::string LexiconLabeler::version() const {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (const LexiconEntry& e : lexicon_) {
        h = fnv1a64(e.term, h);
        h = fnv1a64(std::string_view("\x1f", 1), h);
        h = fnv1a64(std::to_string(e.penalty), h);
    }
    return hex64(h);
}

HateLabel LexiconLabeler::label(const Comment& comment) const {
    int score = comment.text ? basic_score(*comment.text, lexicon_) : 3;
    if (score >= 0) return HateLabel::Appropriate;
    if (score == -1) return HateLabel::Inappropriate;
    if (score == -2) return HateLabel::Offensive;
    return HateLabel::Violent;
}

FileLabeler::FileLabeler(const std::string& predictions_path) {
    for_each_csv_row(predictions_path, {"comment_id", "label"},
                     [&](size_t lineno, const std::vector<std::string>& row) {
                         auto label = parse_hate_label(row[1]);
                         if (!label)
                             throw ParseError(predictions_path, lineno,
                                              "invalid label token '" + row[1] + "'");
                         predictions_[row[0]] = *label;
                     });
    version_ = hex64(fingerprint_file(predictions_path));
}

HateLabel FileLabeler::label(const Comment& comment) const {
    auto it = predictions_.find(comment.id);
    if (it == predictions_.end())
        throw ValidationError("missing prediction for comment '" + comment.id + "'");
    return it->second;
}

// --- annotator-fold cross-validation -------------------------------------

std::vector<CVFold> cv_folds(std::span<const AnnotationRecord> records) {
    std::set<std::string> annotators;
    for (const AnnotationRecord& rec : records) annotators.insert(rec.annotator_id);

    std::vector<CVFold> folds;
    for (const std::string& annotator : annotators) {
        CVFold fold;
        fold.annotator_id = annotator;
        std::unordered_set<std::string> test_comments;
        for (size_t i = 0; i < records.size(); ++i) {
            if (records[i].annotator_id == annotator) {
                fold.test_records.push_back(i);
                test_comments.insert(records[i].comment_id);
            }
        }
        // Training pool: drop every record whose comment is under test.
        for (size_t i = 0; i < records.size(); ++i)
            if (!test_comments.count(records[i].comment_id))
                fold.train_records.push_back(i);
        folds.push_back(std::move(fold));
    }
    return folds;
}

CVReport annotator_fold_cv(const LabelerPort& labeler, const Corpus& corpus,
                           std::span<const AnnotationRecord> records) {
    CVReport report;
    report.labeler_name = labeler.name();
    report.labeler_version = labeler.version();
    if (records.empty()) throw ValidationError("no annotation records");

    // One prediction per distinct comment; labelers are deterministic for a
    // fixed identity, so the prediction is shared across folds.
    std::unordered_map<std::string, HateLabel> predictions;
    for (const AnnotationRecord& rec : records) {
        if (predictions.count(rec.comment_id)) continue;
        const Comment* comment = corpus.find_comment(rec.comment_id);
        if (!comment)
            throw ValidationError("annotation references unknown comment '" +
                                  rec.comment_id + "'");
        predictions.emplace(rec.comment_id, labeler.label(*comment));
    }

    for (const CVFold& partition : cv_folds(records)) {
        std::vector<AnnotationRecord> test;
        test.reserve(partition.test_records.size());
        for (size_t i : partition.test_records) test.push_back(records[i]);
        if (test.empty()) {
            report.warnings.push_back("annotator '" + partition.annotator_id +
                                      "' has no records; fold skipped");
            continue;
        }
        FoldReport fold;
        fold.annotator_id = partition.annotator_id;
        fold.metrics = evaluate_predictions(predictions, test);
        fold.metrics.train_records = partition.train_records.size();
        report.folds.push_back(std::move(fold));
    }

    report.pooled = evaluate_predictions(predictions, records);
    report.pooled.train_records = 0;

    FoldMetrics macro;
    if (!report.folds.empty()) {
        size_t alpha_folds = 0;
        std::array<size_t, kNumLabels> present_folds{};
        for (const FoldReport& fold : report.folds) {
            if (fold.metrics.alpha_defined) {
                macro.alpha += fold.metrics.alpha;
                ++alpha_folds;
            }
            macro.acc += fold.metrics.acc;
            for (size_t c = 0; c < kNumLabels; ++c) {
                macro.f1[c].f1 += fold.metrics.f1[c].f1;
                if (!fold.metrics.f1[c].absent) ++present_folds[c];
            }
            macro.test_records += fold.metrics.test_records;
        }
        double nf = static_cast<double>(report.folds.size());
        if (alpha_folds > 0) {
            macro.alpha /= static_cast<double>(alpha_folds);
            macro.alpha_defined = true;
        }
        macro.acc /= nf;
        for (size_t c = 0; c < kNumLabels; ++c) {
            macro.f1[c].f1 /= nf;
            macro.f1[c].absent = present_folds[c] == 0;
        }
    }
    report.macro = macro;
    return report;
}

std::string render_cv_report_json(const CVReport& report) {
    ordered_json doc;
    doc["labeler"] = {{"name", report.labeler_name},
                      {"version", report.labeler_version}};
    ordered_json folds = ordered_json::array();
    for (const FoldReport& fold : report.folds) {
        ordered_json f;
        f["annotator_id"] = fold.annotator_id;
        f.update(metrics_json(fold.metrics));
        folds.push_back(f);
    }
    doc["folds"] = folds;
    doc["pooled_micro"] = metrics_json(report.pooled);
    doc["macro"] = metrics_json(report.macro);
    if (!report.warnings.empty()) doc["warnings"] = report.warnings;
    return doc.dump(2) + "\n";
}

}  // namespace ctox
