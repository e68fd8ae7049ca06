#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "quadsieve/charmod.hpp"
#include "quadsieve/sieve.hpp"
#include "quadsieve/stage_config.hpp"

namespace fixtures {

inline std::vector<quadsieve::charmod::CharacterSpec> bundled_specs() {
  using namespace quadsieve::config;
  return parse_stages(read_file(resolve_config_path("appendix_a.cfg")));
}

inline std::vector<quadsieve::sieve::SieveStage> bundled_stages() {
  const auto specs = bundled_specs();
  return quadsieve::sieve::make_stages(specs);
}

inline std::string golden(const std::string& name) {
  std::ifstream in(std::string(QUADSIEVE_GOLDEN_DIR) + "/" + name, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace fixtures
