#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "brw/config.hpp"
#include "brw/errors.hpp"

using namespace brw;

TEST_CASE("config text parses keys, comments, and whitespace") {
    const auto cfg = ConfigMap::parse_text(
        "# leading comment\n"
        "experiment = free-energy\n"
        "depth=12\n"
        "  beta  =  0.5  # trailing comment\n"
        "\n"
        "steps_list = 8, 16, 32\n"
        "label = two words\n");
    CHECK(cfg.has("experiment"));
    CHECK(cfg.get_string("experiment") == "free-energy");
    CHECK(cfg.get_int("depth") == 12);
    CHECK(cfg.get_double("beta") == 0.5);
    CHECK(cfg.get_string("label") == "two words");
    CHECK(cfg.get_int_list("steps_list") ==
          std::vector<long long>{8, 16, 32});
    CHECK(cfg.get_double_list("steps_list") ==
          std::vector<double>{8.0, 16.0, 32.0});
    CHECK_FALSE(cfg.has("missing"));
    CHECK(cfg.keys() == std::vector<std::string>{"experiment", "depth", "beta",
                                                 "steps_list", "label"});
}

TEST_CASE("config parse rejects malformed lines") {
    CHECK_THROWS_AS(ConfigMap::parse_text("depth 12\n"), ValidationError);
    CHECK_THROWS_AS(ConfigMap::parse_text("= 12\n"), ValidationError);
    CHECK_THROWS_AS(ConfigMap::parse_text("bad key = 1\n"), ValidationError);
    CHECK_THROWS_AS(ConfigMap::parse_text("k$y = 1\n"), ValidationError);
    // Duplicate keys report the line number.
    CHECK_THROWS_WITH_AS(ConfigMap::parse_text("a = 1\na = 2\n"),
                         "duplicate key 'a' on config line 2", ValidationError);
}

TEST_CASE("typed getters validate and name the key") {
    const auto cfg = ConfigMap::parse_text("depth = twelve\nbeta = 0.5\n");
    CHECK_THROWS_AS(cfg.get_int("depth"), ValidationError);
    CHECK_THROWS_AS(cfg.get_int("absent"), ValidationError);
    CHECK_THROWS_AS(cfg.get_uint("depth"), ValidationError);
    CHECK_THROWS_AS(cfg.get_double("depth"), ValidationError);
    try {
        cfg.get_int("depth");
        FAIL("expected a throw");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("depth") != std::string::npos);
    }
    CHECK(cfg.get_int("missing", 7) == 7);
    CHECK(cfg.get_double("missing", 1.5) == 1.5);
    CHECK(cfg.get_string("missing", "x") == "x");
    CHECK(cfg.get_uint("missing", 3) == 3);
    CHECK(cfg.get_bool("missing", true));

    const auto flags = ConfigMap::parse_text(
        "a = true\nb = false\nc = 1\nd = 0\ne = maybe\n");
    CHECK(flags.get_bool("a", false));
    CHECK_FALSE(flags.get_bool("b", true));
    CHECK(flags.get_bool("c", false));
    CHECK_FALSE(flags.get_bool("d", true));
    CHECK_THROWS_AS(flags.get_bool("e", false), ValidationError);

    const auto neg = ConfigMap::parse_text("n = -4\n");
    CHECK(neg.get_int("n") == -4);
    CHECK_THROWS_AS(neg.get_uint("n"), ValidationError);

    const auto lists = ConfigMap::parse_text("xs = 1, a, 3\n");
    CHECK_THROWS_AS(lists.get_int_list("xs"), ValidationError);
}

TEST_CASE("set inserts or overwrites while keeping order") {
    auto cfg = ConfigMap::parse_text("a = 1\nb = 2\n");
    cfg.set("a", "9");
    cfg.set("c", "3");
    CHECK(cfg.get_int("a") == 9);
    CHECK(cfg.keys() == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("serialize round-trips through the parser") {
    auto cfg = ConfigMap::parse_text("a = 1\nb = text with spaces\n");
    cfg.set("c", "2.5");
    const auto again = ConfigMap::parse_text(cfg.serialize());
    CHECK(again.keys() == cfg.keys());
    CHECK(again.get_string("b") == "text with spaces");
    CHECK(again.get_double("c") == 2.5);
}

TEST_CASE("config files load from disk and missing files throw") {
    const std::string path = "test_config_roundtrip.cfg";
    {
        std::ofstream out(path);
        out << "experiment = ballot\nsteps_list = 4,8\n";
    }
    const auto cfg = ConfigMap::parse_file(path);
    CHECK(cfg.get_string("experiment") == "ballot");
    std::remove(path.c_str());
    CHECK_THROWS_AS(ConfigMap::parse_file("no_such_file.cfg"), ValidationError);
}
