#include <doctest.h>

#include "fixtures.hpp"
#include "quadsieve/errors.hpp"
#include "quadsieve/stage_config.hpp"

using namespace quadsieve;
using quadsieve::config::parse_stages;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_stages(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("bundled stages") {
  const auto specs = fixtures::bundled_specs();
  REQUIRE(specs.size() == 4);
  CHECK(specs[0].label == "chi1");
  CHECK(specs[0].conductor == 175);
  CHECK(specs[0].target_prime == 61);
  REQUIRE(specs[0].components.size() == 2);
  CHECK(specs[0].components[1].modulus == 7);
  CHECK(specs[0].components[1].generator == 3);
  CHECK(specs[0].components[1].image == 47);
  REQUIRE(specs[0].root.has_value());
  CHECK(specs[0].root->residue == 10);
  CHECK(specs[0].root->order == 60);
  CHECK(specs[3].ideal == "(41, i*x - 33)");
  CHECK(specs[3].root->order == 20);
}

TEST_CASE("minimal block, comments and blank lines") {
  const auto specs = parse_stages(
      "# leading comment\n\n"
      "[stage]\n"
      "label = mod3   # trailing\n"
      "q = 3\n"
      "r = 5\n"
      "component = 3 2 4\n");
  REQUIRE(specs.size() == 1);
  CHECK(specs[0].label == "mod3");
  CHECK_FALSE(specs[0].root.has_value());
  CHECK(specs[0].components[0].image == 4);
}

TEST_CASE("errors carry line numbers") {
  CHECK(error_of("label = x\n").find("line 1") != std::string::npos);
  CHECK(error_of("[stage]\nlabel = a\nq = abc\n").find("line 3") != std::string::npos);
  CHECK(error_of("[stage]\nlabel = a\nq = 3\nr = 5\ncomponent = 3 2\n").find("line 5") != std::string::npos);
  CHECK(error_of("[stage]\nbogus = 1\n").find("line 2") != std::string::npos);
  CHECK(error_of("[other]\n").find("line 1") != std::string::npos);
  CHECK(error_of("[stage]\nlabel\n").find("line 2") != std::string::npos);
  CHECK(error_of("[stage]\nlabel = a\nr = 5\ncomponent = 3 2 4\n").find("missing q") != std::string::npos);
  CHECK(error_of("[stage]\nlabel = a\nq = 3\nr = 5\n").find("no components") != std::string::npos);
}

TEST_CASE("missing file") {
  CHECK_THROWS_AS(config::resolve_config_path("/nonexistent/nothing.cfg"), ConfigError);
  CHECK_THROWS_AS(config::read_file("/nonexistent/nothing.cfg"), ConfigError);
}

}  // TEST_SUITE
