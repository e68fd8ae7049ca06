#include "quadsieve/stage_config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "quadsieve/errors.hpp"

namespace quadsieve::config {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

// Drops a trailing '#' comment that is not inside double quotes.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::vector<std::int64_t> parse_ints(const std::string& value, std::size_t expected, int line_no) {
  std::istringstream ss(value);
  std::vector<std::int64_t> out;
  std::string token;
  while (ss >> token) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stoll(token, &pos));
      if (pos != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw ConfigError("line " + std::to_string(line_no) + ": not an integer: '" + token + "'");
    }
  }
  if (out.size() != expected) {
    throw ConfigError("line " + std::to_string(line_no) + ": expected " + std::to_string(expected) +
                      " integers, got " + std::to_string(out.size()));
  }
  return out;
}

}  // namespace

std::vector<charmod::CharacterSpec> parse_stages(std::istream& in) {
  std::vector<charmod::CharacterSpec> stages;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line == "[stage]") {
      stages.emplace_back();
      continue;
    }
    if (line.front() == '[') throw ConfigError("line " + std::to_string(line_no) + ": unknown section " + line);
    if (stages.empty()) throw ConfigError("line " + std::to_string(line_no) + ": key outside a [stage] block");
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    auto& stage = stages.back();
    if (key == "label") {
      stage.label = value;
    } else if (key == "q") {
      stage.conductor = parse_ints(value, 1, line_no)[0];
    } else if (key == "r") {
      stage.target_prime = parse_ints(value, 1, line_no)[0];
    } else if (key == "ideal") {
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
      stage.ideal = value;
    } else if (key == "component") {
      const auto v = parse_ints(value, 3, line_no);
      stage.components.push_back({v[0], v[1], v[2]});
    } else if (key == "root") {
      const auto v = parse_ints(value, 2, line_no);
      stage.root = charmod::RootOfUnityImage{v[0], v[1]};
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const auto& s = stages[i];
    const std::string which = "stage " + std::to_string(i + 1);
    if (s.label.empty()) throw ConfigError(which + ": missing label");
    if (s.conductor == 0) throw ConfigError(which + " (" + s.label + "): missing q");
    if (s.target_prime == 0) throw ConfigError(which + " (" + s.label + "): missing r");
    if (s.components.empty()) throw ConfigError(which + " (" + s.label + "): no components");
  }
  return stages;
}

std::vector<charmod::CharacterSpec> parse_stages(const std::string& text) {
  std::istringstream in(text);
  return parse_stages(in);
}

std::filesystem::path resolve_config_path(const std::string& path) {
  namespace fs = std::filesystem;
  if (fs::is_regular_file(path)) return path;
  if (const char* dirs = std::getenv("QUADSIEVE_CONFIG_DIR"); dirs != nullptr && fs::path(path).is_relative()) {
    std::istringstream ss(dirs);
    std::string dir;
    while (std::getline(ss, dir, ':')) {
      if (dir.empty()) continue;
      fs::path candidate = fs::path(dir) / path;
      if (fs::is_regular_file(candidate)) return candidate;
    }
  }
#ifdef QUADSIEVE_CONFIG_DIR
  if (fs::path(path).is_relative()) {
    const fs::path candidate = fs::path(QUADSIEVE_CONFIG_DIR) / path;
    if (fs::is_regular_file(candidate)) return candidate;
  }
#endif
  throw ConfigError("config file not found: " + path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace quadsieve::config
