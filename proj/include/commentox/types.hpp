#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ctox {

// Four-level comment schema, ordered by severity. The numeric toxicity
// value of each level is fixed: A=0, I=1, O=2, V=3.
enum class HateLabel : uint8_t {
    Appropriate = 0,
    Inappropriate = 1,
    Offensive = 2,
    Violent = 3,
};

constexpr int kNumLabels = 4;

constexpr int toxicity_value(HateLabel label) {
    return static_cast<int>(label);
}

constexpr char label_code(HateLabel label) {
    constexpr char codes[] = {'A', 'I', 'O', 'V'};
    return codes[static_cast<int>(label)];
}

const char* label_name(HateLabel label);

// Accepts the single-letter code (A/I/O/V) or the full name,
// case-insensitive.
std::optional<HateLabel> parse_hate_label(std::string_view token);

enum class ChannelCategory : uint8_t {
    Questionable = 0,
    Reliable = 1,
};

const char* category_name(ChannelCategory category);
std::optional<ChannelCategory> parse_category(std::string_view token);

struct Channel {
    std::string id;
    ChannelCategory category = ChannelCategory::Reliable;
};

struct Video {
    std::string id;
    uint32_t channel_index = 0;
    std::string title;
    std::string description;
    int64_t published_at = 0;  // UTC epoch seconds
};

struct Comment {
    std::string id;
    uint32_t video_index = 0;
    std::string user_id;
    int64_t published_at = 0;  // UTC epoch seconds
    std::optional<HateLabel> label;
    std::optional<std::string> text;  // may be withheld for privacy
};

}  // namespace ctox
