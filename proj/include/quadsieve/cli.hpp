#pragma once

// Command-line front end. `run` is the whole program minus process setup so
// tests can drive it with in-memory streams.

#include <iosfwd>
#include <string>
#include <vector>

namespace quadsieve::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kVerificationFailed = 1,
  kUsageError = 2,
};

/// Record of one run, written as manifest.json next to emitted files.
struct RunManifest {
  std::string command_line;
  std::string config_hash;  // sha256 hex of the stage config, empty if none
  std::string tool_version = kVersion;
  std::vector<std::string> outputs;

  std::string to_json() const;
};

/// SHA-256 of `bytes` as lowercase hex.
std::string sha256_hex(const std::string& bytes);

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace quadsieve::cli
