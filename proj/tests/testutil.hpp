#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "commentox/corpus.hpp"
#include "commentox/timeutil.hpp"

namespace testutil {

// Unique scratch directory, removed on scope exit.
class TempDir {
public:
    TempDir() {
        static std::atomic<uint64_t> counter{0};
        auto base = std::filesystem::temp_directory_path();
        path_ = base / ("ctox-test-" + std::to_string(::getpid()) + "-" +
                        std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string str() const { return path_.string(); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline int64_t ts(const std::string& iso) { return ctox::parse_iso8601(iso); }

// The standard two-channel fixture used across suites: one questionable
// channel with one video, one reliable channel with two videos, five
// comments from three users.
inline void write_small_corpus(const TempDir& dir) {
    write_file(dir.file("channels.csv"),
               "channel_id,category\n"
               "chq,questionable\n"
               "chr,reliable\n");
    write_file(dir.file("videos.jsonl"),
               R"({"video_id":"v1","channel_id":"chq","title":"covid update","description":"daily numbers","published_at":"2020-02-01T00:00:00Z"})"
               "\n"
               R"({"video_id":"v2","channel_id":"chr","title":"cooking pasta","description":"","published_at":"2020-02-02T12:00:00Z"})"
               "\n"
               R"({"video_id":"v3","channel_id":"chr","title":"news roundup","description":"coronavirus special","published_at":"2020-02-03T06:30:00Z"})"
               "\n");
    write_file(dir.file("comments.jsonl"),
               R"({"comment_id":"c1","video_id":"v1","user_id":"u1","published_at":"2020-02-01T01:00:00Z","text":"first"})"
               "\n"
               R"({"comment_id":"c2","video_id":"v1","user_id":"u2","published_at":"2020-02-01T02:30:00Z"})"
               "\n"
               R"({"comment_id":"c3","video_id":"v2","user_id":"u1","published_at":"2020-02-02T18:00:00Z","label":"O"})"
               "\n"
               R"({"comment_id":"c4","video_id":"v3","user_id":"u3","published_at":"2020-02-03T07:00:00Z"})"
               "\n"
               R"({"comment_id":"c5","video_id":"v3","user_id":"u2","published_at":"2020-02-04T06:30:00Z"})"
               "\n");
}

inline void write_small_labels(const TempDir& dir) {
    write_file(dir.file("labels.csv"),
               "comment_id,label\n"
               "c1,A\n"
               "c2,I\n"
               "c3,O\n"
               "c4,V\n"
               "c5,A\n");
}

}  // namespace testutil
