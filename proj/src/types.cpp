#include "commentox/types.hpp"

#include "commentox/strutil.hpp"

namespace ctox {

const char* label_name(HateLabel label) {
    switch (label) {
        case HateLabel::Appropriate: return "appropriate";
        case HateLabel::Inappropriate: return "inappropriate";
        case HateLabel::Offensive: return "offensive";
        case HateLabel::Violent: return "violent";
    }
    return "?";
}

std::optional<HateLabel> parse_hate_label(std::string_view token) {
    std::string t = to_lower_ascii(token);
    if (t == "a" || t == "appropriate") return HateLabel::Appropriate;
    if (t == "i" || t == "inappropriate") return HateLabel::Inappropriate;
    if (t == "o" || t == "offensive") return HateLabel::Offensive;
    if (t == "v" || t == "violent") return HateLabel::Violent;
    return std::nullopt;
}

const char* category_name(ChannelCategory category) {
    return category == ChannelCategory::Questionable ? "questionable" : "reliable";
}

std::optional<ChannelCategory> parse_category(std::string_view token) {
    std::string t = to_lower_ascii(token);
    if (t == "questionable") return ChannelCategory::Questionable;
    if (t == "reliable") return ChannelCategory::Reliable;
    return std::nullopt;
}

}  // namespace ctox
