#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "commentox/types.hpp"

namespace ctox {

// --- acquisition types --------------------------------------------------

// Video metadata as returned by the remote source, before corpus validation.
struct VideoRef {
    std::string video_id;
    std::string channel_id;
    std::string title;
    std::string description;
    int64_t published_at = 0;
};

struct RawComment {
    std::string comment_id;
    std::string video_id;
    std::string user_id;
    int64_t published_at = 0;
    std::optional<std::string> text;
};

struct VideoPage {
    std::vector<VideoRef> items;
    std::optional<std::string> next;  // absent on the last page
};

struct CommentPage {
    std::vector<RawComment> items;
    std::optional<std::string> next;
};

// The keyword set the acquisition defaults to.
std::span<const std::string> default_keywords();

// --- source port ----------------------------------------------------------

// Paginated remote endpoints. An empty page token requests the first page.
// Implementations throw TransportError (retryable or not) on failure and
// RateLimitedError when the remote asks the client to back off.
class DataSourcePort {
public:
    virtual ~DataSourcePort() = default;
    virtual VideoPage search(const std::string& keyword,
                             const std::string& page_token) = 0;
    virtual VideoPage related(const std::string& video_id,
                              const std::string& page_token) = 0;
    virtual CommentPage comments(const std::string& video_id,
                                 const std::string& page_token) = 0;
};

// Replays canned JSON responses from a directory, for byte-exact offline
// runs. A request for (endpoint, param, token) reads
//   <dir>/<endpoint>_<sanitized param>_<token or "p0">.json
// holding {"items": [...], "next_page_token": "..."?}. A file may instead
// hold {"sequence": [response, ...]} whose entries are consumed one per
// call; an entry {"error": "rate_limited"} or {"error": "transport",
// "retryable": bool} raises the corresponding failure, which lets tests
// inject faults ahead of a successful replay.
class FixtureSource : public DataSourcePort {
public:
    explicit FixtureSource(std::string dir);
    VideoPage search(const std::string& keyword,
                     const std::string& page_token) override;
    VideoPage related(const std::string& video_id,
                      const std::string& page_token) override;
    CommentPage comments(const std::string& video_id,
                         const std::string& page_token) override;

    static std::string sanitize(const std::string& param);

private:
    std::string read_response(const std::string& endpoint, const std::string& param,
                              const std::string& page_token);

    std::string dir_;
    std::unordered_map<std::string, size_t> sequence_pos_;
};

// --- resilience decorators -----------------------------------------------------

using SleepFn = std::function<void(uint64_t /*milliseconds*/)>;
using ClockFn = std::function<uint64_t()>;  // monotonic milliseconds

// Token-bucket limiter: at most `per_second` acquisitions per second,
// sleeping as needed. Clock and sleeper are injectable for tests.
class RateLimiter {
public:
    RateLimiter(double per_second, ClockFn clock = {}, SleepFn sleep = {});
    void acquire();

private:
    double interval_ms_;
    double next_free_ms_ = 0.0;
    ClockFn clock_;
    SleepFn sleep_;
};

// Retries retryable transport failures with exponential backoff (default 3
// attempts: waits of 1s then 2s), optionally rate-limiting every outgoing
// request. Non-retryable errors pass through immediately.
class RetryingSource : public DataSourcePort {
public:
    struct Options {
        int attempts = 3;
        uint64_t backoff_ms = 1000;  // doubled after each failure
        double rate_per_second = 0.0;  // 0: no rate limiting
        SleepFn sleep;                 // injectable; default really sleeps
        ClockFn clock;
    };

    explicit RetryingSource(DataSourcePort& inner);
    RetryingSource(DataSourcePort& inner, Options options);

    VideoPage search(const std::string& keyword,
                     const std::string& page_token) override;
    VideoPage related(const std::string& video_id,
                      const std::string& page_token) override;
    CommentPage comments(const std::string& video_id,
                         const std::string& page_token) override;

private:
    template <typename Fn>
    auto with_retry(Fn&& fn) -> decltype(fn());

    DataSourcePort& inner_;
    Options options_;
    std::optional<RateLimiter> limiter_;
};

// --- remote adapter ----------------------------------------------------------

// Generic HTTPS REST adapter speaking the same JSON page schema as the
// fixture files. The API key is read from the named environment variable
// and sent as the `key` query parameter.
struct HttpSourceOptions {
    std::string host;  // required
    int port = 443;
    bool use_tls = true;
    std::string search_path = "/search";      // ?q=<keyword>&page_token=<t>
    std::string related_path = "/related";    // ?video_id=<id>&page_token=<t>
    std::string comments_path = "/comments";  // ?video_id=<id>&page_token=<t>
    std::string api_key_env = "COMMENTOX_API_KEY";
    int timeout_seconds = 30;
};

class HttpSource : public DataSourcePort {
public:
    explicit HttpSource(HttpSourceOptions options);
    ~HttpSource() override;

    VideoPage search(const std::string& keyword,
                     const std::string& page_token) override;
    VideoPage related(const std::string& video_id,
                      const std::string& page_token) override;
    CommentPage comments(const std::string& video_id,
                         const std::string& page_token) override;

private:
    std::string get(const std::string& path, const std::string& query);

    HttpSourceOptions options_;
    std::string api_key_;
    struct Client;
    std::unique_ptr<Client> client_;
};

// --- acquisition operations ------------------------------------------------------

struct TimeWindow {
    int64_t from = INT64_MIN;  // inclusive
    int64_t to = INT64_MAX;    // inclusive
};

// Union of all result pages for all keywords, deduplicated by video_id,
// restricted to the window, sorted by video_id.
std::vector<VideoRef> search_videos(DataSourcePort& source,
                                    std::span<const std::string> keywords,
                                    const TimeWindow& window = {});

struct CrawlOptions {
    int max_depth = 2;
    size_t max_videos = 0;  // 0: unlimited
    // When set, crawl progress is checkpointed here after every expanded
    // video, and an existing checkpoint resumes the crawl.
    std::string checkpoint_path;
};

// Breadth-first expansion of the related-video graph from the seeds.
// Every video is visited once (cycles are fine); output is deduplicated
// and sorted by video_id. Depth 0 returns exactly the seeds.
std::vector<VideoRef> crawl_related(DataSourcePort& source,
                                    std::span<const VideoRef> seeds,
                                    const CrawlOptions& options = {});

// Keeps videos whose title or description contains any keyword,
// case-insensitive substring match.
std::vector<VideoRef> filter_matching(std::span<const VideoRef> videos,
                                      std::span<const std::string> keywords);

// Hook for custom text filters (e.g. language detection). An empty
// predicate keeps everything.
using VideoPredicate = std::function<bool(const VideoRef&)>;
std::vector<VideoRef> filter_videos(std::span<const VideoRef> videos,
                                    const VideoPredicate& pred);

struct FetchResult {
    uint64_t comments = 0;  // lines in the sink over all completed videos
    uint64_t videos_completed = 0;
    std::vector<std::string> failed_videos;  // skipped after transport failure
};

// Streams every video's comment pages to `sink_path` in comments.jsonl
// format. With a checkpoint path the fetch is resumable: the checkpoint
// records completed videos and the sink byte offset, and on resume the sink
// is truncated back to the last consistent offset, so each comment line is
// written exactly once no matter where a previous run died. A video whose
// fetch fails is logged to stderr and skipped; the sink stays valid JSONL.
FetchResult fetch_comments(DataSourcePort& source,
                           std::span<const VideoRef> videos,
                           const std::string& sink_path,
                           const std::string& checkpoint_path = "");

// One comments.jsonl line (no trailing newline).
std::string raw_comment_jsonl(const RawComment& comment);

}  // namespace ctox
