#include <doctest.h>

#include <map>
#include <string>
#include <vector>

#include "commentox/config.hpp"
#include "commentox/errors.hpp"
#include "testutil.hpp"

using namespace ctox;
using testutil::TempDir;

TEST_CASE("toml: scalar kinds and quoting") {
    auto values = parse_toml(
        "name = \"delay report\"\n"
        "escaped = \"a\\\"b\\\\c\\nd\\te\"\n"
        "count = 42\n"
        "negative = -5\n"
        "ratio = 0.25\n"
        "scientific = 1e-3\n"
        "flag = true\n"
        "off = false\n"
        "tags = [\"covid\", \"corona virus\"]\n"
        "empty = []\n",
        "cfg.toml");
    CHECK(values.size() == 10);
    CHECK(values.at("name").kind == TomlValue::Kind::String);
    CHECK(values.at("name").str == "delay report");
    CHECK(values.at("escaped").str == "a\"b\\c\nd\te");
    CHECK(values.at("count").kind == TomlValue::Kind::Integer);
    CHECK(values.at("count").integer == 42);
    CHECK(values.at("negative").integer == -5);
    CHECK(values.at("ratio").kind == TomlValue::Kind::Float);
    CHECK(values.at("ratio").real == 0.25);
    CHECK(values.at("scientific").kind == TomlValue::Kind::Float);
    CHECK(values.at("scientific").real == 0.001);
    CHECK(values.at("flag").kind == TomlValue::Kind::Boolean);
    CHECK(values.at("flag").boolean);
    CHECK(!values.at("off").boolean);
    CHECK(values.at("tags").kind == TomlValue::Kind::StringArray);
    CHECK(values.at("tags").array ==
          std::vector<std::string>{"covid", "corona virus"});
    CHECK(values.at("empty").array.empty());
}

TEST_CASE("toml: comments, blanks, and spacing") {
    auto values = parse_toml(
        "# full-line comment\n"
        "\n"
        "   \t  \n"
        "a=1\n"
        "  b   =   2   # trailing comment\n"
        "hash = \"a#b\" # the quoted hash is content\n",
        "cfg.toml");
    CHECK(values.size() == 3);
    CHECK(values.at("a").integer == 1);
    CHECK(values.at("b").integer == 2);
    CHECK(values.at("hash").str == "a#b");
}

TEST_CASE("toml: parse errors name the line") {
    auto error_contains = [](const std::string& text, const std::string& needle) {
        try {
            (void)parse_toml(text, "cfg.toml");
            FAIL_CHECK("expected ParseError for: " << text);
        } catch (const ParseError& e) {
            CAPTURE(text);
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    error_contains("a = 1\n[section]\n", "cfg.toml:2");
    error_contains("[section]\n", "tables are not supported");
    error_contains("just some words\n", "key = value");
    error_contains(" = 5\n", "empty key");
    error_contains("bad key = 1\n", "invalid key");
    error_contains("a = 1\na = 2\n", "duplicate key");
    error_contains("s = \"unterminated\n", "unterminated string");
    error_contains("s = \"bad\\q\"\n", "escape");
    error_contains("arr = [\"a\", \"b\"\n", "unterminated array");
    error_contains("arr = [\"a\" \"b\"]\n", "','");
    error_contains("v = @nope\n", "cannot parse value");
    error_contains("a = 1 stray\n", "trailing content");
    error_contains("a =\n", "missing value");
    error_contains("arr = [1, 2]\n", "'\"'");  // arrays hold strings only
}

TEST_CASE("toml: apply maps keys onto the run configuration") {
    RunConfig config;
    auto values = parse_toml(
        "channels = \"data/channels.csv\"\n"
        "seed = 7\n"
        "bins = 12\n"
        "trim = 0.1\n"
        "cutoff = 1  # integers promote to floats\n"
        "bootstrap = true\n"
        "group_by = \"label\"\n"
        "keywords = [\"covid\", \"nCov\"]\n"
        "out = \"results\"\n",
        "cfg.toml");
    apply_toml(config, values, "cfg.toml");
    CHECK(config.channels == "data/channels.csv");
    REQUIRE(config.seed.has_value());
    CHECK(*config.seed == 7);
    CHECK(config.bins == 12);
    CHECK(config.trim == 0.1);
    CHECK(config.cutoff == 1.0);
    CHECK(config.bootstrap);
    CHECK(config.group_by == "label");
    CHECK(config.keywords == std::vector<std::string>{"covid", "nCov"});
    CHECK(config.out == "results");
    // untouched fields keep defaults
    CHECK(config.shuffles == 100);
    CHECK(config.time_bin == "week");
    CHECK(!config.per_label);
}

TEST_CASE("toml: apply rejects unknown keys and kind mismatches") {
    RunConfig config;
    auto apply_one = [&](const std::string& text) {
        auto values = parse_toml(text, "cfg.toml");
        apply_toml(config, values, "cfg.toml");
    };
    CHECK_THROWS_WITH_AS(apply_one("no_such_knob = 1\n"),
                         doctest::Contains("unknown config key 'no_such_knob'"),
                         ValidationError);
    CHECK_THROWS_WITH_AS(apply_one("bins = \"many\"\n"),
                         doctest::Contains("'bins'"), ValidationError);
    CHECK_THROWS_WITH_AS(apply_one("channels = 5\n"),
                         doctest::Contains("string"), ValidationError);
    CHECK_THROWS_WITH_AS(apply_one("bootstrap = 1\n"),
                         doctest::Contains("boolean"), ValidationError);
    CHECK_THROWS_WITH_AS(apply_one("keywords = \"covid\"\n"),
                         doctest::Contains("string array"), ValidationError);
    CHECK_THROWS_WITH_AS(apply_one("seed = -1\n"),
                         doctest::Contains("non-negative"), ValidationError);
    CHECK_THROWS_WITH_AS(apply_one("trim = true\n"), doctest::Contains("float"),
                         ValidationError);
}

TEST_CASE("toml: snapshot round trip reproduces the configuration") {
    RunConfig config;
    config.channels = "in/channels.csv";
    config.videos = "in/videos.jsonl";
    config.comments = "in/comments.jsonl";
    config.labels = "in/labels.csv";
    config.lexicon = "lex \"quoted\".txt";
    config.out = "should/not/appear";
    config.seed = 99;
    config.bins = 16;
    config.trim = 0.25;
    config.cutoff = 0.95;
    config.bootstrap = true;
    config.keywords = {"covid", "corona virus", "tab\there"};
    config.per_label = true;
    config.time_bin = "day";

    std::string snapshot = render_config_toml(config);
    CHECK(snapshot.find("out = ") == std::string::npos);
    CHECK(snapshot.find("should/not/appear") == std::string::npos);
    CHECK(snapshot.find("seed = 99\n") != std::string::npos);

    RunConfig rebuilt;
    apply_toml(rebuilt, parse_toml(snapshot, "snapshot"), "snapshot");
    rebuilt.out = config.out;  // the one field the snapshot never carries
    CHECK(render_config_toml(rebuilt) == snapshot);
    CHECK(rebuilt.lexicon == config.lexicon);
    CHECK(rebuilt.keywords == config.keywords);
    CHECK(rebuilt.trim == config.trim);
    REQUIRE(rebuilt.seed.has_value());
    CHECK(*rebuilt.seed == 99);

    SUBCASE("seedless configs leave the seed line out") {
        RunConfig bare;
        std::string text = render_config_toml(bare);
        CHECK(text.find("seed") == std::string::npos);
        RunConfig again;
        apply_toml(again, parse_toml(text, "snapshot"), "snapshot");
        CHECK(!again.seed.has_value());
        CHECK(render_config_toml(again) == text);
    }
}

TEST_CASE("toml: loading from disk") {
    TempDir dir;
    testutil::write_file(dir.file("run.toml"), "bins = 8\ntrim = 0.3\n");
    auto values = load_toml(dir.file("run.toml"));
    CHECK(values.at("bins").integer == 8);

    CHECK_THROWS_WITH_AS((void)load_toml(dir.file("missing.toml")),
                         doctest::Contains("missing.toml"), ValidationError);

    testutil::write_file(dir.file("broken.toml"), "x = 1\ny = [oops\n");
    CHECK_THROWS_WITH_AS((void)load_toml(dir.file("broken.toml")),
                         doctest::Contains("broken.toml:2"), ParseError);
}
