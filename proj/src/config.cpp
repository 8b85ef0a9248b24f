#include "commentox/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "commentox/errors.hpp"
#include "commentox/strutil.hpp"

namespace ctox {

namespace {

bool is_bare_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Cursor {
    const std::string& text;
    size_t pos = 0;
    const std::string& origin;
    size_t line;

    [[noreturn]] void fail(const std::string& reason) const {
        throw ParseError(origin, line, reason);
    }
    bool done() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    void skip_ws() {
        while (!done() && (peek() == ' ' || peek() == '\t')) ++pos;
    }
};

std::string parse_quoted(Cursor& cur) {
    if (cur.done() || cur.peek() != '"') cur.fail("expected '\"'");
    ++cur.pos;
    std::string out;
    while (!cur.done() && cur.peek() != '"') {
        char c = cur.text[cur.pos++];
        if (c == '\\') {
            if (cur.done()) cur.fail("dangling escape");
            char e = cur.text[cur.pos++];
            switch (e) {
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                default: cur.fail(std::string("unsupported escape '\\") + e + "'");
            }
        } else {
            out += c;
        }
    }
    if (cur.done()) cur.fail("unterminated string");
    ++cur.pos;
    return out;
}

TomlValue parse_value(Cursor& cur) {
    cur.skip_ws();
    if (cur.done()) cur.fail("missing value");
    TomlValue v;
    char c = cur.peek();
    if (c == '"') {
        v.kind = TomlValue::Kind::String;
        v.str = parse_quoted(cur);
        return v;
    }
    if (c == '[') {
        ++cur.pos;
        v.kind = TomlValue::Kind::StringArray;
        cur.skip_ws();
        if (!cur.done() && cur.peek() == ']') {
            ++cur.pos;
            return v;
        }
        while (true) {
            cur.skip_ws();
            v.array.push_back(parse_quoted(cur));
            cur.skip_ws();
            if (cur.done()) cur.fail("unterminated array");
            char d = cur.text[cur.pos++];
            if (d == ']') return v;
            if (d != ',') cur.fail("expected ',' or ']' in array");
        }
    }
    // bare scalar: bool, integer, or float
    size_t start = cur.pos;
    while (!cur.done() && cur.peek() != ' ' && cur.peek() != '\t' &&
           cur.peek() != '#')
        ++cur.pos;
    std::string token = cur.text.substr(start, cur.pos - start);
    if (token == "true" || token == "false") {
        v.kind = TomlValue::Kind::Boolean;
        v.boolean = token == "true";
        return v;
    }
    bool floaty = token.find_first_of(".eE") != std::string::npos &&
                  token.find("0x") != 0;
    if (!floaty) {
        int64_t n = 0;
        auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), n);
        if (ec == std::errc() && p == token.data() + token.size()) {
            v.kind = TomlValue::Kind::Integer;
            v.integer = n;
            return v;
        }
    }
    try {
        size_t used = 0;
        double d = std::stod(token, &used);
        if (used == token.size()) {
            v.kind = TomlValue::Kind::Float;
            v.real = d;
            return v;
        }
    } catch (const std::exception&) {
    }
    cur.fail("cannot parse value '" + token + "'");
}

}  // namespace

std::map<std::string, TomlValue> parse_toml(const std::string& text,
                                            const std::string& origin) {
    std::map<std::string, TomlValue> out;
    std::istringstream in(text);
    std::string raw;
    size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        // strip comments outside quotes
        bool quoted = false, escaped = false;
        std::string line;
        for (char c : raw) {
            if (escaped) {
                line += c;
                escaped = false;
                continue;
            }
            if (quoted && c == '\\') escaped = true;
            if (c == '"') quoted = !quoted;
            if (!quoted && c == '#') break;
            line += c;
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line[0] == '[')
            throw ParseError(origin, lineno,
                             "tables are not supported in this config format");
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(origin, lineno, "expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ParseError(origin, lineno, "empty key");
        for (char c : key)
            if (!is_bare_key_char(c))
                throw ParseError(origin, lineno, "invalid key '" + key + "'");
        if (out.count(key))
            throw ParseError(origin, lineno, "duplicate key '" + key + "'");
        std::string rest = line.substr(eq + 1);
        Cursor cur{rest, 0, origin, lineno};
        TomlValue value = parse_value(cur);
        cur.skip_ws();
        if (!cur.done())
            throw ParseError(origin, lineno, "trailing content after value");
        out.emplace(std::move(key), std::move(value));
    }
    return out;
}

std::map<std::string, TomlValue> load_toml(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read config file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return parse_toml(text, path);
}

namespace {

const char* kind_name(TomlValue::Kind k) {
    switch (k) {
        case TomlValue::Kind::String: return "string";
        case TomlValue::Kind::Integer: return "integer";
        case TomlValue::Kind::Float: return "float";
        case TomlValue::Kind::Boolean: return "boolean";
        case TomlValue::Kind::StringArray: return "string array";
    }
    return "?";
}

struct Applier {
    const std::string& origin;

    [[noreturn]] void mismatch(const std::string& key, const TomlValue& v,
                               const char* wanted) const {
        throw ValidationError(origin + ": key '" + key + "' wants a " + wanted +
                              ", got a " + kind_name(v.kind));
    }

    void str(const std::string& key, const TomlValue& v, std::string& out) const {
        if (v.kind != TomlValue::Kind::String) mismatch(key, v, "string");
        out = v.str;
    }
    void integer(const std::string& key, const TomlValue& v, int& out) const {
        if (v.kind != TomlValue::Kind::Integer) mismatch(key, v, "integer");
        out = static_cast<int>(v.integer);
    }
    void real(const std::string& key, const TomlValue& v, double& out) const {
        if (v.kind == TomlValue::Kind::Integer)
            out = static_cast<double>(v.integer);
        else if (v.kind == TomlValue::Kind::Float)
            out = v.real;
        else
            mismatch(key, v, "float");
    }
    void boolean(const std::string& key, const TomlValue& v, bool& out) const {
        if (v.kind != TomlValue::Kind::Boolean) mismatch(key, v, "boolean");
        out = v.boolean;
    }
    void strings(const std::string& key, const TomlValue& v,
                 std::vector<std::string>& out) const {
        if (v.kind != TomlValue::Kind::StringArray) mismatch(key, v, "string array");
        out = v.array;
    }
    void seed(const std::string& key, const TomlValue& v,
              std::optional<uint64_t>& out) const {
        if (v.kind != TomlValue::Kind::Integer || v.integer < 0)
            mismatch(key, v, "non-negative integer");
        out = static_cast<uint64_t>(v.integer);
    }
};

}  // namespace

void apply_toml(RunConfig& c, const std::map<std::string, TomlValue>& values,
                const std::string& origin) {
    Applier a{origin};
    for (const auto& [key, v] : values) {
        if (key == "channels") a.str(key, v, c.channels);
        else if (key == "videos") a.str(key, v, c.videos);
        else if (key == "comments") a.str(key, v, c.comments);
        else if (key == "labels") a.str(key, v, c.labels);
        else if (key == "annotations") a.str(key, v, c.annotations);
        else if (key == "category_split") a.str(key, v, c.category_split);
        else if (key == "lexicon") a.str(key, v, c.lexicon);
        else if (key == "predictions") a.str(key, v, c.predictions);
        else if (key == "synth_spec") a.str(key, v, c.synth_spec);
        else if (key == "fixtures") a.str(key, v, c.fixtures);
        else if (key == "host") a.str(key, v, c.host);
        else if (key == "out") a.str(key, v, c.out);
        else if (key == "seed") a.seed(key, v, c.seed);
        else if (key == "bins") a.integer(key, v, c.bins);
        else if (key == "trim") a.real(key, v, c.trim);
        else if (key == "cutoff") a.real(key, v, c.cutoff);
        else if (key == "shuffles") a.integer(key, v, c.shuffles);
        else if (key == "sample_size") a.integer(key, v, c.sample_size);
        else if (key == "repetitions") a.integer(key, v, c.repetitions);
        else if (key == "bootstrap") a.boolean(key, v, c.bootstrap);
        else if (key == "group_by") a.str(key, v, c.group_by);
        else if (key == "time_bin") a.str(key, v, c.time_bin);
        else if (key == "per_label") a.boolean(key, v, c.per_label);
        else if (key == "density_bins") a.integer(key, v, c.density_bins);
        else if (key == "constant_label") a.str(key, v, c.constant_label);
        else if (key == "keywords") a.strings(key, v, c.keywords);
        else if (key == "max_depth") a.integer(key, v, c.max_depth);
        else if (key == "max_videos") a.integer(key, v, c.max_videos);
        else if (key == "rate") a.real(key, v, c.rate);
        else if (key == "window_from") a.str(key, v, c.window_from);
        else if (key == "window_to") a.str(key, v, c.window_to);
        else if (key == "annotators") a.integer(key, v, c.annotators);
        else if (key == "redundancy") a.integer(key, v, c.redundancy);
        else if (key == "target_comments") a.integer(key, v, c.target_comments);
        else
            throw ValidationError(origin + ": unknown config key '" + key + "'");
    }
}

namespace {

std::string toml_string(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '"';
    return out;
}

}  // namespace

std::string render_config_toml(const RunConfig& c) {
    std::ostringstream out;
    auto str = [&](const char* key, const std::string& v) {
        out << key << " = " << toml_string(v) << "\n";
    };
    auto num = [&](const char* key, int64_t v) { out << key << " = " << v << "\n"; };
    auto real = [&](const char* key, double v) {
        out << key << " = " << fmt_double(v) << "\n";
    };
    auto boolean = [&](const char* key, bool v) {
        out << key << " = " << (v ? "true" : "false") << "\n";
    };

    str("channels", c.channels);
    str("videos", c.videos);
    str("comments", c.comments);
    str("labels", c.labels);
    str("annotations", c.annotations);
    str("category_split", c.category_split);
    str("lexicon", c.lexicon);
    str("predictions", c.predictions);
    str("synth_spec", c.synth_spec);
    str("fixtures", c.fixtures);
    str("host", c.host);
    // `out` is deliberately left out: the snapshot names the experiment,
    // not where one copy of it landed, so identical runs into different
    // directories stay byte-identical.
    if (c.seed) num("seed", static_cast<int64_t>(*c.seed));
    num("bins", c.bins);
    real("trim", c.trim);
    real("cutoff", c.cutoff);
    num("shuffles", c.shuffles);
    num("sample_size", c.sample_size);
    num("repetitions", c.repetitions);
    boolean("bootstrap", c.bootstrap);
    str("group_by", c.group_by);
    str("time_bin", c.time_bin);
    boolean("per_label", c.per_label);
    num("density_bins", c.density_bins);
    str("constant_label", c.constant_label);
    out << "keywords = [";
    for (size_t i = 0; i < c.keywords.size(); ++i) {
        if (i) out << ", ";
        out << toml_string(c.keywords[i]);
    }
    out << "]\n";
    num("max_depth", c.max_depth);
    num("max_videos", c.max_videos);
    real("rate", c.rate);
    str("window_from", c.window_from);
    str("window_to", c.window_to);
    num("annotators", c.annotators);
    num("redundancy", c.redundancy);
    num("target_comments", c.target_comments);
    return out.str();
}

}  // namespace ctox
