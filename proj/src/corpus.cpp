#include "commentox/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "commentox/csv.hpp"
#include "commentox/errors.hpp"
#include "commentox/strutil.hpp"
#include "commentox/timeutil.hpp"

namespace ctox {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string require_string(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null())
        throw ParseError(std::string("missing field '") + key + "'");
    if (!it->is_string())
        throw ParseError(std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string())
        throw ParseError(std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

// Streams a JSONL file, calling fn(lineno, parsed object) per non-empty
// line. Parse failures are rethrown with file + line context.
void for_each_jsonl(const std::string& path,
                    const std::function<void(size_t, const json&)>& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path, 0, "cannot open file");
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(path, lineno, std::string("invalid JSON: ") + e.what());
        }
        if (!obj.is_object()) throw ParseError(path, lineno, "line is not a JSON object");
        try {
            fn(lineno, obj);
        } catch (const ParseError& e) {
            if (e.line() == 0) throw ParseError(path, lineno, e.reason());
            throw;
        }
    }
}

std::string json_escape(const std::string& s) {
    return json(s).dump();
}

}  // namespace

// --- Corpus ------------------------------------------------------------

const Channel* Corpus::find_channel(const std::string& id) const {
    auto it = channel_index_.find(id);
    return it == channel_index_.end() ? nullptr : &channels_[it->second];
}

const Video* Corpus::find_video(const std::string& id) const {
    auto it = video_index_.find(id);
    return it == video_index_.end() ? nullptr : &videos_[it->second];
}

const Comment* Corpus::find_comment(const std::string& id) const {
    auto it = comment_index_.find(id);
    return it == comment_index_.end() ? nullptr : &comments_[it->second];
}

size_t Corpus::labeled_comment_count() const {
    return static_cast<size_t>(
        std::count_if(comments_.begin(), comments_.end(),
                      [](const Comment& c) { return c.label.has_value(); }));
}

Corpus Corpus::with_labels(std::vector<std::optional<HateLabel>> labels) const {
    if (labels.size() != comments_.size())
        throw ValidationError("label vector must cover every comment (got " +
                              std::to_string(labels.size()) + " for " +
                              std::to_string(comments_.size()) + " comments)");
    Corpus copy = *this;
    for (size_t i = 0; i < labels.size(); ++i) copy.comments_[i].label = labels[i];
    return copy;
}

// --- CorpusBuilder -----------------------------------------------------

uint32_t CorpusBuilder::add_channel(std::string id, ChannelCategory category) {
    if (id.empty()) throw ValidationError("channel_id must be non-empty");
    auto [it, inserted] = corpus_.channel_index_.emplace(
        id, static_cast<uint32_t>(corpus_.channels_.size()));
    if (!inserted) throw ValidationError("duplicate channel_id '" + id + "'");
    corpus_.channels_.push_back(Channel{std::move(id), category});
    return it->second;
}

uint32_t CorpusBuilder::add_video(std::string id, const std::string& channel_id,
                                  std::string title, std::string description,
                                  int64_t published_at) {
    if (id.empty()) throw ValidationError("video_id must be non-empty");
    auto ch = corpus_.channel_index_.find(channel_id);
    if (ch == corpus_.channel_index_.end())
        throw ValidationError("video '" + id + "' references unknown channel_id '" +
                              channel_id + "'");
    auto [it, inserted] = corpus_.video_index_.emplace(
        id, static_cast<uint32_t>(corpus_.videos_.size()));
    if (!inserted) throw ValidationError("duplicate video_id '" + id + "'");
    corpus_.videos_.push_back(Video{std::move(id), ch->second, std::move(title),
                                    std::move(description), published_at});
    return it->second;
}

uint32_t CorpusBuilder::add_comment(std::string id, const std::string& video_id,
                                    std::string user_id, int64_t published_at,
                                    std::optional<HateLabel> label,
                                    std::optional<std::string> text) {
    if (id.empty()) throw ValidationError("comment_id must be non-empty");
    auto vid = corpus_.video_index_.find(video_id);
    if (vid == corpus_.video_index_.end())
        throw ValidationError("comment '" + id + "' references unknown video_id '" +
                              video_id + "'");
    auto [it, inserted] = corpus_.comment_index_.emplace(
        id, static_cast<uint32_t>(corpus_.comments_.size()));
    if (!inserted) throw ValidationError("duplicate comment_id '" + id + "'");
    corpus_.comments_.push_back(Comment{std::move(id), vid->second,
                                        std::move(user_id), published_at, label,
                                        std::move(text)});
    return it->second;
}

Corpus CorpusBuilder::build() {
    if (!corpus_.comments_.empty()) {
        auto [lo, hi] = std::minmax_element(
            corpus_.comments_.begin(), corpus_.comments_.end(),
            [](const Comment& a, const Comment& b) {
                return a.published_at < b.published_at;
            });
        corpus_.time_min_ = lo->published_at;
        corpus_.time_max_ = hi->published_at;
    }
    return std::move(corpus_);
}

// --- ingestion ---------------------------------------------------------

Corpus load_corpus(const std::string& channels_path,
                   const std::string& videos_path,
                   const std::string& comments_path) {
    CorpusBuilder builder;

    for_each_csv_row(channels_path, {"channel_id", "category"},
                     [&](size_t lineno, const std::vector<std::string>& row) {
                         ChannelCategory cat = ChannelCategory::Reliable;
                         if (!row[1].empty()) {
                             auto parsed = parse_category(row[1]);
                             if (!parsed)
                                 throw ParseError(channels_path, lineno,
                                                  "unknown category '" + row[1] + "'");
                             cat = *parsed;
                         }
                         try {
                             builder.add_channel(row[0], cat);
                         } catch (const ValidationError& e) {
                             throw ParseError(channels_path, lineno, e.what());
                         }
                     });

    for_each_jsonl(videos_path, [&](size_t, const json& obj) {
        builder.add_video(require_string(obj, "video_id"),
                          require_string(obj, "channel_id"),
                          optional_string(obj, "title").value_or(""),
                          optional_string(obj, "description").value_or(""),
                          parse_iso8601(require_string(obj, "published_at")));
    });

    for_each_jsonl(comments_path, [&](size_t, const json& obj) {
        std::optional<HateLabel> label;
        if (auto token = optional_string(obj, "label")) {
            label = parse_hate_label(*token);
            if (!label) throw ParseError("invalid label token '" + *token + "'");
        }
        builder.add_comment(require_string(obj, "comment_id"),
                            require_string(obj, "video_id"),
                            require_string(obj, "user_id"),
                            parse_iso8601(require_string(obj, "published_at")),
                            label, optional_string(obj, "text"));
    });

    return builder.build();
}

AttachResult attach_labels(const Corpus& corpus, const std::string& labels_path) {
    AttachResult result;
    result.corpus = corpus;
    auto& comments = result.corpus.comments_;

    for_each_csv_row(labels_path, {"comment_id", "label"},
                     [&](size_t lineno, const std::vector<std::string>& row) {
                         auto label = parse_hate_label(row[1]);
                         if (!label)
                             throw ParseError(labels_path, lineno,
                                              "invalid label token '" + row[1] + "'");
                         auto it = result.corpus.comment_index_.find(row[0]);
                         if (it == result.corpus.comment_index_.end()) {
                             ++result.unknown_ids;
                             return;
                         }
                         comments[it->second].label = *label;
                         ++result.labeled;
                     });
    return result;
}

void save_corpus(const Corpus& corpus, const std::string& out_dir) {
    auto sorted_indices = [](size_t n, auto id_of) {
        std::vector<uint32_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0u);
        std::sort(idx.begin(), idx.end(),
                  [&](uint32_t a, uint32_t b) { return id_of(a) < id_of(b); });
        return idx;
    };

    {
        std::ofstream out(out_dir + "/channels.csv", std::ios::binary);
        if (!out) throw ValidationError("cannot write " + out_dir + "/channels.csv");
        out << "channel_id,category\n";
        auto channels = corpus.channels();
        auto idx = sorted_indices(channels.size(), [&](uint32_t i) -> const std::string& {
            return channels[i].id;
        });
        for (uint32_t i : idx) {
            out << join_csv_line({channels[i].id, category_name(channels[i].category)})
                << '\n';
        }
    }
    {
        std::ofstream out(out_dir + "/videos.jsonl", std::ios::binary);
        if (!out) throw ValidationError("cannot write " + out_dir + "/videos.jsonl");
        auto videos = corpus.videos();
        auto idx = sorted_indices(videos.size(), [&](uint32_t i) -> const std::string& {
            return videos[i].id;
        });
        for (uint32_t i : idx) {
            const Video& v = videos[i];
            out << "{\"video_id\":" << json_escape(v.id)
                << ",\"channel_id\":" << json_escape(corpus.channels()[v.channel_index].id)
                << ",\"title\":" << json_escape(v.title)
                << ",\"description\":" << json_escape(v.description)
                << ",\"published_at\":\"" << format_iso8601(v.published_at) << "\"}\n";
        }
    }
    {
        std::ofstream out(out_dir + "/comments.jsonl", std::ios::binary);
        if (!out) throw ValidationError("cannot write " + out_dir + "/comments.jsonl");
        auto comments = corpus.comments();
        auto idx = sorted_indices(comments.size(), [&](uint32_t i) -> const std::string& {
            return comments[i].id;
        });
        for (uint32_t i : idx) {
            const Comment& c = comments[i];
            out << "{\"comment_id\":" << json_escape(c.id)
                << ",\"video_id\":" << json_escape(corpus.videos()[c.video_index].id)
                << ",\"user_id\":" << json_escape(c.user_id)
                << ",\"published_at\":\"" << format_iso8601(c.published_at) << "\"";
            if (c.label) out << ",\"label\":\"" << label_code(*c.label) << "\"";
            if (c.text) out << ",\"text\":" << json_escape(*c.text);
            out << "}\n";
        }
    }
}

// --- breakdown ---------------------------------------------------------

BreakdownTable breakdown(const Corpus& corpus) {
    BreakdownTable table;
    table.rows[0].name = "questionable";
    table.rows[1].name = "reliable";
    table.rows[2].name = "total";

    for (const Channel& ch : corpus.channels()) {
        size_t row = ch.category == ChannelCategory::Questionable ? 0 : 1;
        ++table.rows[row].channels;
    }
    for (const Video& v : corpus.videos()) {
        size_t row = corpus.channel_of(v).category == ChannelCategory::Questionable ? 0 : 1;
        ++table.rows[row].videos;
    }
    for (const Comment& c : corpus.comments()) {
        size_t row = corpus.category_of(c) == ChannelCategory::Questionable ? 0 : 1;
        ++table.rows[row].comments;
    }
    table.rows[2].channels = table.rows[0].channels + table.rows[1].channels;
    table.rows[2].videos = table.rows[0].videos + table.rows[1].videos;
    table.rows[2].comments = table.rows[0].comments + table.rows[1].comments;

    for (BreakdownRow& row : table.rows) {
        auto pct = [](uint64_t part, uint64_t whole) {
            return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) /
                                          static_cast<double>(whole);
        };
        row.channels_pct = pct(row.channels, table.rows[2].channels);
        row.videos_pct = pct(row.videos, table.rows[2].videos);
        row.comments_pct = pct(row.comments, table.rows[2].comments);
    }
    return table;
}

std::string render_breakdown_csv(const BreakdownTable& table) {
    std::string out =
        "category,channels,channels_pct,videos,videos_pct,comments,comments_pct\n";
    for (const BreakdownRow& row : table.rows) {
        out += join_csv_line({row.name, std::to_string(row.channels),
                              fmt_fixed(row.channels_pct, 1),
                              std::to_string(row.videos),
                              fmt_fixed(row.videos_pct, 1),
                              std::to_string(row.comments),
                              fmt_fixed(row.comments_pct, 1)});
        out += '\n';
    }
    return out;
}

}  // namespace ctox
