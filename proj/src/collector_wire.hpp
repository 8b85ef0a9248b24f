#pragma once

// Wire-format helpers shared by the fixture and HTTP source adapters.

#include <string>

#include <nlohmann/json.hpp>

#include "commentox/collector.hpp"

namespace ctox::wire {

// Parses `text`, rethrowing json errors as ParseError tagged with `origin`.
nlohmann::json parse_json(const std::string& text, const std::string& origin);

VideoPage parse_video_page(const nlohmann::json& page, const std::string& origin);
CommentPage parse_comment_page(const nlohmann::json& page, const std::string& origin);

}  // namespace ctox::wire
