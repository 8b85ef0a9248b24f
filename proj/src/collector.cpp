#include "commentox/collector.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "collector_wire.hpp"
#include "commentox/errors.hpp"
#include "commentox/strutil.hpp"
#include "commentox/timeutil.hpp"

namespace ctox {

namespace wire {

namespace {

std::string string_field(const nlohmann::json& item, const char* key,
                         const std::string& origin) {
    if (!item.contains(key) || !item.at(key).is_string())
        throw ParseError(origin, 0, std::string("missing string field '") + key + "'");
    return item.at(key).get<std::string>();
}

std::optional<std::string> next_token_of(const nlohmann::json& page) {
    if (!page.contains("next_page_token") || page.at("next_page_token").is_null())
        return std::nullopt;
    return page.at("next_page_token").get<std::string>();
}

}  // namespace

nlohmann::json parse_json(const std::string& text, const std::string& origin) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(origin, 0, e.what());
    }
}

VideoPage parse_video_page(const nlohmann::json& page, const std::string& origin) {
    if (!page.is_object() || !page.contains("items") || !page.at("items").is_array())
        throw ParseError(origin, 0, "page must hold an 'items' array");
    VideoPage out;
    for (const nlohmann::json& item : page.at("items")) {
        VideoRef ref;
        ref.video_id = string_field(item, "video_id", origin);
        ref.channel_id = string_field(item, "channel_id", origin);
        ref.title = string_field(item, "title", origin);
        ref.description = string_field(item, "description", origin);
        ref.published_at = parse_iso8601(string_field(item, "published_at", origin));
        out.items.push_back(std::move(ref));
    }
    out.next = next_token_of(page);
    return out;
}

CommentPage parse_comment_page(const nlohmann::json& page, const std::string& origin) {
    if (!page.is_object() || !page.contains("items") || !page.at("items").is_array())
        throw ParseError(origin, 0, "page must hold an 'items' array");
    CommentPage out;
    for (const nlohmann::json& item : page.at("items")) {
        RawComment c;
        c.comment_id = string_field(item, "comment_id", origin);
        c.video_id = string_field(item, "video_id", origin);
        c.user_id = string_field(item, "user_id", origin);
        c.published_at = parse_iso8601(string_field(item, "published_at", origin));
        if (item.contains("text") && !item.at("text").is_null())
            c.text = string_field(item, "text", origin);
        out.items.push_back(std::move(c));
    }
    out.next = next_token_of(page);
    return out;
}

}  // namespace wire

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;
using wire::parse_json;
using wire::parse_video_page;
using wire::parse_comment_page;

constexpr size_t kMaxPages = 100000;  // guards against cyclic pagination

const std::vector<std::string> kDefaultKeywords = {
    "coronavirus", "nCov", "corona virus", "corona-virus", "covid", "SARS-CoV",
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TransportError("cannot read '" + path + "'", false);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return text;
}

// Raises the failure encoded in a fixture entry, if any.
void raise_fixture_error(const json& entry, const std::string& origin) {
    if (!entry.is_object() || !entry.contains("error")) return;
    const std::string kind = entry.at("error").get<std::string>();
    if (kind == "rate_limited")
        throw RateLimitedError("fixture rate limit: " + origin);
    bool retryable = entry.value("retryable", true);
    throw TransportError("fixture transport failure: " + origin, retryable);
}

template <typename Page, typename Fetch>
std::vector<Page> drain_pages(Fetch&& fetch) {
    std::vector<Page> pages;
    std::string token;
    for (size_t n = 0; n < kMaxPages; ++n) {
        Page page = fetch(token);
        const bool done = !page.next.has_value();
        if (!done) token = *page.next;
        pages.push_back(std::move(page));
        if (done) return pages;
    }
    throw ValidationError("pagination did not terminate within " +
                          std::to_string(kMaxPages) + " pages");
}

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot write '" + tmp + "'");
        out << content;
        out.flush();
        if (!out) throw ValidationError("short write to '" + tmp + "'");
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace

std::span<const std::string> default_keywords() { return kDefaultKeywords; }

// --- FixtureSource ---------------------------------------------------------

FixtureSource::FixtureSource(std::string dir) : dir_(std::move(dir)) {}

std::string FixtureSource::sanitize(const std::string& param) {
    std::string out;
    for (char c : param) {
        if (std::isalnum(static_cast<unsigned char>(c)))
            out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        else
            out += '-';
    }
    return out;
}

std::string FixtureSource::read_response(const std::string& endpoint,
                                         const std::string& param,
                                         const std::string& page_token) {
    const std::string key = endpoint + "_" + sanitize(param) + "_" +
                            (page_token.empty() ? "p0" : page_token);
    const std::string path = dir_ + "/" + key + ".json";
    json doc = parse_json(read_file(path), path);
    if (doc.is_object() && doc.contains("sequence")) {
        const json& seq = doc.at("sequence");
        if (!seq.is_array() || seq.empty())
            throw ParseError(path, 0, "'sequence' must be a non-empty array");
        size_t& pos = sequence_pos_[key];
        const json& entry = seq[std::min(pos, seq.size() - 1)];
        ++pos;
        raise_fixture_error(entry, path);
        return entry.dump();
    }
    raise_fixture_error(doc, path);
    return doc.dump();
}

VideoPage FixtureSource::search(const std::string& keyword,
                                const std::string& page_token) {
    const std::string text = read_response("search", keyword, page_token);
    return parse_video_page(parse_json(text, dir_), dir_ + ":search:" + keyword);
}

VideoPage FixtureSource::related(const std::string& video_id,
                                 const std::string& page_token) {
    const std::string text = read_response("related", video_id, page_token);
    return parse_video_page(parse_json(text, dir_), dir_ + ":related:" + video_id);
}

CommentPage FixtureSource::comments(const std::string& video_id,
                                    const std::string& page_token) {
    const std::string text = read_response("comments", video_id, page_token);
    return parse_comment_page(parse_json(text, dir_), dir_ + ":comments:" + video_id);
}

// --- RateLimiter -------------------------------------------------------------

RateLimiter::RateLimiter(double per_second, ClockFn clock, SleepFn sleep)
    : interval_ms_(1000.0 / per_second),
      clock_(std::move(clock)),
      sleep_(std::move(sleep)) {
    if (!(per_second > 0.0)) throw ValidationError("rate must be > 0 requests/s");
    if (!clock_)
        clock_ = [] {
            return static_cast<uint64_t>(
                std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now().time_since_epoch())
                    .count());
        };
    if (!sleep_)
        sleep_ = [](uint64_t ms) {
            std::this_thread::sleep_for(std::chrono::milliseconds(ms));
        };
}

void RateLimiter::acquire() {
    const double now = static_cast<double>(clock_());
    if (now < next_free_ms_)
        sleep_(static_cast<uint64_t>(next_free_ms_ - now));
    next_free_ms_ = std::max(now, next_free_ms_) + interval_ms_;
}

// --- RetryingSource -------------------------------------------------------------

RetryingSource::RetryingSource(DataSourcePort& inner)
    : RetryingSource(inner, Options{}) {}

RetryingSource::RetryingSource(DataSourcePort& inner, Options options)
    : inner_(inner), options_(std::move(options)) {
    if (options_.attempts < 1) throw ValidationError("attempts must be >= 1");
    if (!options_.sleep)
        options_.sleep = [](uint64_t ms) {
            std::this_thread::sleep_for(std::chrono::milliseconds(ms));
        };
    if (options_.rate_per_second > 0.0)
        limiter_.emplace(options_.rate_per_second, options_.clock, options_.sleep);
}

template <typename Fn>
auto RetryingSource::with_retry(Fn&& fn) -> decltype(fn()) {
    uint64_t backoff = options_.backoff_ms;
    for (int attempt = 1;; ++attempt) {
        if (limiter_) limiter_->acquire();
        try {
            return fn();
        } catch (const TransportError& e) {
            if (!e.retryable() || attempt >= options_.attempts) throw;
            options_.sleep(backoff);
            backoff *= 2;
        }
    }
}

VideoPage RetryingSource::search(const std::string& keyword,
                                 const std::string& page_token) {
    return with_retry([&] { return inner_.search(keyword, page_token); });
}

VideoPage RetryingSource::related(const std::string& video_id,
                                  const std::string& page_token) {
    return with_retry([&] { return inner_.related(video_id, page_token); });
}

CommentPage RetryingSource::comments(const std::string& video_id,
                                     const std::string& page_token) {
    return with_retry([&] { return inner_.comments(video_id, page_token); });
}

// --- acquisition operations --------------------------------------------------------

std::vector<VideoRef> search_videos(DataSourcePort& source,
                                    std::span<const std::string> keywords,
                                    const TimeWindow& window) {
    if (keywords.empty()) throw ValidationError("keyword set must be non-empty");

    std::unordered_map<std::string, VideoRef> by_id;
    for (const std::string& keyword : keywords) {
        auto pages = drain_pages<VideoPage>(
            [&](const std::string& token) { return source.search(keyword, token); });
        for (VideoPage& page : pages)
            for (VideoRef& ref : page.items) by_id.emplace(ref.video_id, std::move(ref));
    }

    std::vector<VideoRef> out;
    out.reserve(by_id.size());
    for (auto& [id, ref] : by_id)
        if (ref.published_at >= window.from && ref.published_at <= window.to)
            out.push_back(std::move(ref));
    std::sort(out.begin(), out.end(), [](const VideoRef& a, const VideoRef& b) {
        return a.video_id < b.video_id;
    });
    return out;
}

namespace {

struct CrawlState {
    std::deque<std::pair<std::string, int>> frontier;  // (video_id, depth)
    std::unordered_set<std::string> seen;              // ever enqueued
    std::vector<VideoRef> collected;

    std::string to_json() const {
        ordered_json doc;
        ordered_json frontier_json = ordered_json::array();
        for (const auto& [id, depth] : frontier)
            frontier_json.push_back({{"video_id", id}, {"depth", depth}});
        doc["frontier"] = frontier_json;
        ordered_json collected_json = ordered_json::array();
        for (const VideoRef& ref : collected)
            collected_json.push_back({{"video_id", ref.video_id},
                                      {"channel_id", ref.channel_id},
                                      {"title", ref.title},
                                      {"description", ref.description},
                                      {"published_at", format_iso8601(ref.published_at)}});
        doc["collected"] = collected_json;
        return doc.dump() + "\n";
    }

    static CrawlState from_json(const std::string& text, const std::string& origin) {
        CrawlState state;
        json doc = parse_json(text, origin);
        for (const json& entry : doc.at("frontier"))
            state.frontier.emplace_back(entry.at("video_id").get<std::string>(),
                                        entry.at("depth").get<int>());
        VideoPage page = parse_video_page(
            json{{"items", doc.at("collected")}}, origin);
        state.collected = std::move(page.items);
        for (const VideoRef& ref : state.collected) state.seen.insert(ref.video_id);
        return state;
    }
};

}  // namespace

std::vector<VideoRef> crawl_related(DataSourcePort& source,
                                    std::span<const VideoRef> seeds,
                                    const CrawlOptions& options) {
    if (seeds.empty()) throw ValidationError("crawl needs at least one seed");
    if (options.max_depth < 0) throw ValidationError("max_depth must be >= 0");

    CrawlState state;
    const bool resuming = !options.checkpoint_path.empty() &&
                          std::filesystem::exists(options.checkpoint_path);
    if (resuming) {
        state = CrawlState::from_json(read_file(options.checkpoint_path),
                                      options.checkpoint_path);
    } else {
        for (const VideoRef& seed : seeds) {
            if (!state.seen.insert(seed.video_id).second) continue;
            state.collected.push_back(seed);
            state.frontier.emplace_back(seed.video_id, 0);
        }
    }

    auto capped = [&] {
        return options.max_videos > 0 && state.collected.size() >= options.max_videos;
    };

    while (!state.frontier.empty() && !capped()) {
        auto [video_id, depth] = state.frontier.front();
        state.frontier.pop_front();
        if (depth >= options.max_depth) continue;

        auto pages = drain_pages<VideoPage>([&](const std::string& token) {
            return source.related(video_id, token);
        });
        for (VideoPage& page : pages) {
            for (VideoRef& ref : page.items) {
                if (capped()) break;
                if (!state.seen.insert(ref.video_id).second) continue;
                state.frontier.emplace_back(ref.video_id, depth + 1);
                state.collected.push_back(std::move(ref));
            }
        }
        if (!options.checkpoint_path.empty())
            atomic_write(options.checkpoint_path, state.to_json());
    }

    std::vector<VideoRef> out = std::move(state.collected);
    std::sort(out.begin(), out.end(), [](const VideoRef& a, const VideoRef& b) {
        return a.video_id < b.video_id;
    });
    return out;
}

std::vector<VideoRef> filter_matching(std::span<const VideoRef> videos,
                                      std::span<const std::string> keywords) {
    std::vector<VideoRef> out;
    for (const VideoRef& v : videos) {
        for (const std::string& k : keywords) {
            if (contains_ci(v.title, k) || contains_ci(v.description, k)) {
                out.push_back(v);
                break;
            }
        }
    }
    return out;
}

std::vector<VideoRef> filter_videos(std::span<const VideoRef> videos,
                                    const VideoPredicate& pred) {
    std::vector<VideoRef> out;
    for (const VideoRef& v : videos)
        if (!pred || pred(v)) out.push_back(v);
    return out;
}

std::string raw_comment_jsonl(const RawComment& comment) {
    ordered_json line;
    line["comment_id"] = comment.comment_id;
    line["video_id"] = comment.video_id;
    line["user_id"] = comment.user_id;
    line["published_at"] = format_iso8601(comment.published_at);
    if (comment.text) line["text"] = *comment.text;
    return line.dump();
}

namespace {

struct FetchCheckpoint {
    std::unordered_set<std::string> completed;
    uint64_t sink_bytes = 0;
    uint64_t comments = 0;

    std::string to_json() const {
        std::vector<std::string> ids(completed.begin(), completed.end());
        std::sort(ids.begin(), ids.end());
        ordered_json doc;
        doc["completed"] = ids;
        doc["sink_bytes"] = sink_bytes;
        doc["comments"] = comments;
        return doc.dump() + "\n";
    }

    static FetchCheckpoint from_json(const std::string& text,
                                     const std::string& origin) {
        FetchCheckpoint cp;
        json doc = parse_json(text, origin);
        for (const json& id : doc.at("completed"))
            cp.completed.insert(id.get<std::string>());
        cp.sink_bytes = doc.at("sink_bytes").get<uint64_t>();
        cp.comments = doc.at("comments").get<uint64_t>();
        return cp;
    }
};

}  // namespace

FetchResult fetch_comments(DataSourcePort& source, std::span<const VideoRef> videos,
                           const std::string& sink_path,
                           const std::string& checkpoint_path) {
    FetchCheckpoint cp;
    const bool resuming = !checkpoint_path.empty() &&
                          std::filesystem::exists(checkpoint_path);
    if (resuming) {
        cp = FetchCheckpoint::from_json(read_file(checkpoint_path), checkpoint_path);
        if (!std::filesystem::exists(sink_path)) {
            if (cp.sink_bytes > 0)
                throw ValidationError("checkpoint expects sink '" + sink_path +
                                      "' to exist");
        } else {
            if (std::filesystem::file_size(sink_path) < cp.sink_bytes)
                throw ValidationError("sink '" + sink_path +
                                      "' is shorter than its checkpoint offset");
            // Drop whatever a dying run wrote past the last consistent state.
            std::filesystem::resize_file(sink_path, cp.sink_bytes);
        }
    }
    if (!resuming) {
        std::ofstream truncate(sink_path, std::ios::binary | std::ios::trunc);
        if (!truncate) throw ValidationError("cannot write sink '" + sink_path + "'");
    }

    std::ofstream sink(sink_path, std::ios::binary | std::ios::app);
    if (!sink) throw ValidationError("cannot append to sink '" + sink_path + "'");

    FetchResult result;
    std::unordered_set<std::string> seen_input;
    for (const VideoRef& video : videos) {
        if (!seen_input.insert(video.video_id).second) continue;
        if (cp.completed.count(video.video_id)) continue;

        uint64_t video_comments = 0;
        try {
            auto pages = drain_pages<CommentPage>([&](const std::string& token) {
                return source.comments(video.video_id, token);
            });
            for (const CommentPage& page : pages) {
                for (const RawComment& c : page.items) {
                    sink << raw_comment_jsonl(c) << '\n';
                    ++video_comments;
                }
            }
            sink.flush();
            if (!sink)
                throw ValidationError("write to sink '" + sink_path + "' failed");
        } catch (const TransportError& e) {
            // Roll the sink back so a later resume cannot duplicate lines.
            sink.close();
            std::filesystem::resize_file(sink_path, cp.sink_bytes);
            sink.open(sink_path, std::ios::binary | std::ios::app);
            std::cerr << "fetch: skipping video '" << video.video_id
                      << "': " << e.what() << "\n";
            result.failed_videos.push_back(video.video_id);
            continue;
        }

        cp.comments += video_comments;
        cp.sink_bytes = static_cast<uint64_t>(std::filesystem::file_size(sink_path));
        cp.completed.insert(video.video_id);
        if (!checkpoint_path.empty()) atomic_write(checkpoint_path, cp.to_json());
    }

    result.comments = cp.comments;
    result.videos_completed = cp.completed.size();
    return result;
}

}  // namespace ctox
