// The vendored HTTP client is confined to this translation unit.

#ifdef COMMENTOX_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <cstdlib>

#include "collector_wire.hpp"
#include "commentox/collector.hpp"
#include "commentox/errors.hpp"

namespace ctox {

namespace {

std::string percent_encode(const std::string& value) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : value) {
        const bool plain = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                           (c >= '0' && c <= '9') || c == '-' || c == '_' ||
                           c == '.' || c == '~';
        if (plain) {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 0xf];
        }
    }
    return out;
}

}  // namespace

struct HttpSource::Client {
    httplib::Client http;
    explicit Client(const std::string& base) : http(base) {}
};

HttpSource::HttpSource(HttpSourceOptions options) : options_(std::move(options)) {
    if (options_.host.empty()) throw ValidationError("remote source needs a host");
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (options_.use_tls)
        throw UsageError("this build lacks TLS support; rebuild with OpenSSL "
                         "or set use_tls=false");
#endif
    const char* key = std::getenv(options_.api_key_env.c_str());
    if (!key || !*key)
        throw UsageError("environment variable '" + options_.api_key_env +
                         "' must hold the API key");
    api_key_ = key;

    const std::string base = (options_.use_tls ? "https://" : "http://") +
                             options_.host + ":" + std::to_string(options_.port);
    client_ = std::make_unique<Client>(base);
    client_->http.set_connection_timeout(options_.timeout_seconds, 0);
    client_->http.set_read_timeout(options_.timeout_seconds, 0);
    client_->http.set_write_timeout(options_.timeout_seconds, 0);
}

HttpSource::~HttpSource() = default;

std::string HttpSource::get(const std::string& path, const std::string& query) {
    const std::string target = path + "?" + query + "&key=" + percent_encode(api_key_);
    httplib::Result res = client_->http.Get(target);
    const std::string where = options_.host + path;
    if (!res)
        throw TransportError(where + ": " + httplib::to_string(res.error()), true);
    if (res->status == 429) throw RateLimitedError(where + ": HTTP 429");
    if (res->status >= 500)
        throw TransportError(where + ": HTTP " + std::to_string(res->status), true);
    if (res->status != 200)
        throw TransportError(where + ": HTTP " + std::to_string(res->status), false);
    return res->body;
}

VideoPage HttpSource::search(const std::string& keyword,
                             const std::string& page_token) {
    std::string query = "q=" + percent_encode(keyword);
    if (!page_token.empty()) query += "&page_token=" + percent_encode(page_token);
    const std::string body = get(options_.search_path, query);
    const std::string origin = options_.host + options_.search_path;
    return wire::parse_video_page(wire::parse_json(body, origin), origin);
}

VideoPage HttpSource::related(const std::string& video_id,
                              const std::string& page_token) {
    std::string query = "video_id=" + percent_encode(video_id);
    if (!page_token.empty()) query += "&page_token=" + percent_encode(page_token);
    const std::string body = get(options_.related_path, query);
    const std::string origin = options_.host + options_.related_path;
    return wire::parse_video_page(wire::parse_json(body, origin), origin);
}

CommentPage HttpSource::comments(const std::string& video_id,
                                 const std::string& page_token) {
    std::string query = "video_id=" + percent_encode(video_id);
    if (!page_token.empty()) query += "&page_token=" + percent_encode(page_token);
    const std::string body = get(options_.comments_path, query);
    const std::string origin = options_.host + options_.comments_path;
    return wire::parse_comment_page(wire::parse_json(body, origin), origin);
}

}  // namespace ctox
