#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "commentox/types.hpp"

namespace ctox {

struct AttachResult;

// Immutable after construction; safe to share across threads. Entities are
// held in flat vectors, with cross-references stored as indices so lookups
// never chase ids at analysis time.
class Corpus {
public:
    std::span<const Channel> channels() const { return channels_; }
    std::span<const Video> videos() const { return videos_; }
    std::span<const Comment> comments() const { return comments_; }

    const Video& video_of(const Comment& c) const { return videos_[c.video_index]; }
    const Channel& channel_of(const Video& v) const { return channels_[v.channel_index]; }
    ChannelCategory category_of(const Comment& c) const {
        return channels_[videos_[c.video_index].channel_index].category;
    }

    const Channel* find_channel(const std::string& id) const;
    const Video* find_video(const std::string& id) const;
    const Comment* find_comment(const std::string& id) const;

    // [min, max] over comment timestamps; both 0 when there are no comments.
    int64_t time_min() const { return time_min_; }
    int64_t time_max() const { return time_max_; }

    size_t labeled_comment_count() const;
    bool fully_labeled() const { return labeled_comment_count() == comments_.size(); }

    // Copy with every comment label replaced; `labels` is parallel to
    // comments(). Backs the label-permutation null models.
    Corpus with_labels(std::vector<std::optional<HateLabel>> labels) const;

private:
    friend class CorpusBuilder;
    friend struct AttachResult;
    friend AttachResult attach_labels(const Corpus& corpus,
                                      const std::string& labels_path);

    std::vector<Channel> channels_;
    std::vector<Video> videos_;
    std::vector<Comment> comments_;
    std::unordered_map<std::string, uint32_t> channel_index_;
    std::unordered_map<std::string, uint32_t> video_index_;
    std::unordered_map<std::string, uint32_t> comment_index_;
    int64_t time_min_ = 0;
    int64_t time_max_ = 0;
};

// Incremental, validating construction. add_* throw ValidationError on
// duplicate ids or dangling references, so every Corpus that leaves the
// builder is referentially intact.
class CorpusBuilder {
public:
    uint32_t add_channel(std::string id, ChannelCategory category);
    uint32_t add_video(std::string id, const std::string& channel_id,
                       std::string title, std::string description,
                       int64_t published_at);
    uint32_t add_comment(std::string id, const std::string& video_id,
                         std::string user_id, int64_t published_at,
                         std::optional<HateLabel> label = {},
                         std::optional<std::string> text = {});

    size_t channel_count() const { return corpus_.channels_.size(); }
    size_t video_count() const { return corpus_.videos_.size(); }
    size_t comment_count() const { return corpus_.comments_.size(); }

    Corpus build();

private:
    Corpus corpus_;
};

// --- ingestion ---------------------------------------------------------

// Streaming load of the three input files (see the formats below). Each
// file is read line by line; memory is proportional to entity counts.
// Throws ParseError (with file + line) or ValidationError.
//
//   channels.csv   header channel_id,category; category questionable|reliable
//   videos.jsonl   {"video_id","channel_id","title","description","published_at"}
//   comments.jsonl {"comment_id","video_id","user_id","published_at","label"?,"text"?}
Corpus load_corpus(const std::string& channels_path,
                   const std::string& videos_path,
                   const std::string& comments_path);

struct AttachResult {
    Corpus corpus;
    size_t labeled = 0;        // labels applied
    size_t unknown_ids = 0;    // rows naming a comment_id not in the corpus
};

// Applies labels.csv (header comment_id,label) on top of a corpus. Unknown
// comment ids are skipped and counted; an invalid label token is an error.
AttachResult attach_labels(const Corpus& corpus, const std::string& labels_path);

// Canonical serialization: entities sorted by id, fixed field order,
// canonical timestamp rendering. load(save(c)) == c and save is a fixed
// point, so corpora can be fingerprinted byte-wise.
void save_corpus(const Corpus& corpus, const std::string& out_dir);

// --- breakdown ---------------------------------------------------------

struct BreakdownRow {
    std::string name;  // "questionable", "reliable", "total"
    uint64_t channels = 0;
    uint64_t videos = 0;
    uint64_t comments = 0;
    // column percentages, 0 when the column total is empty
    double channels_pct = 0.0;
    double videos_pct = 0.0;
    double comments_pct = 0.0;
};

struct BreakdownTable {
    std::array<BreakdownRow, 3> rows;  // questionable, reliable, total

    const BreakdownRow& questionable() const { return rows[0]; }
    const BreakdownRow& reliable() const { return rows[1]; }
    const BreakdownRow& total() const { return rows[2]; }
};

// Per-category and total channel/video/comment counts with column
// percentages (rendered to one decimal place downstream).
BreakdownTable breakdown(const Corpus& corpus);

// CSV rendering with percentages at one decimal place.
std::string render_breakdown_csv(const BreakdownTable& table);

}  // namespace ctox
