#include <string>

#include "doctest.h"
#include "shoeprint/config.hpp"
#include "shoeprint/error.hpp"

using namespace shoeprint;

TEST_CASE("config parsing handles comments, blanks, and whitespace") {
  const auto config = parse_config(
      "# header comment\n"
      "\n"
      "train.epochs = 10\n"
      "  train.lr=0.001  # inline comment\n"
      "synth.out = runs/demo\n");
  CHECK(config.get_int("train.epochs") == 10);
  CHECK(config.get_double("train.lr") == 0.001);
  CHECK(config.get("synth.out") == "runs/demo");
  CHECK(config.values.size() == 3);
}

TEST_CASE("config parse errors carry the line number") {
  CHECK_THROWS_WITH_AS(parse_config("a = 1\nbroken line\n"), doctest::Contains("line 2"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("a = 1\n\n = orphan\n"), doctest::Contains("line 3"),
                       ConfigError);
}

TEST_CASE("config getters validate types and presence") {
  const auto config = parse_config("n = 12\nx = 1.5\ns = hello\n");
  CHECK(config.get_int("n") == 12);
  CHECK(config.get_double("x") == 1.5);
  CHECK(config.get_double("n") == 12.0);
  CHECK_THROWS_AS(config.get("missing"), ConfigError);
  CHECK_THROWS_AS(config.get_int("s"), ConfigError);
  CHECK_THROWS_AS(config.get_double("s"), ConfigError);
  CHECK_THROWS_AS(config.get_int("x"), ConfigError);
  CHECK(config.get_or("missing", "fallback") == "fallback");
  CHECK(config.get_int_or("missing", 7) == 7);
  CHECK(config.get_double_or("missing", 2.5) == 2.5);
}

TEST_CASE("config serialization round-trips and stays sorted") {
  ConfigMap config;
  config.set("zeta.key", "last");
  config.set_int("alpha.count", 42);
  config.set_double("mid.rate", 0.125);
  const std::string text = serialize_config(config);
  CHECK(text == "alpha.count = 42\nmid.rate = 0.125\nzeta.key = last\n");
  const auto parsed = parse_config(text);
  CHECK(parsed.values == config.values);
}

TEST_CASE("double serialization survives a round trip at full precision") {
  ConfigMap config;
  config.set_double("x", 0.1);
  config.set_double("y", 1.0 / 3.0);
  const auto parsed = parse_config(serialize_config(config));
  CHECK(parsed.get_double("x") == 0.1);
  CHECK(parsed.get_double("y") == 1.0 / 3.0);
}

TEST_CASE("missing config files raise io errors") {
  CHECK_THROWS_AS(read_config_file("/nonexistent/path/config.txt"), IoError);
}
