#pragma once

// Line-oriented stage configuration:
//
//   [stage]
//   label = chi1
//   q = 175
//   r = 61
//   ideal = "(61, i*w*x - 10)"      # documentation only
//   component = 25 2 8              # modulus generator image
//   component = 7 3 47
//   root = 10 60                    # optional: root of unity residue, order

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "quadsieve/charmod.hpp"

namespace quadsieve::config {

/// Parses every [stage] block. Throws ConfigError with a line number.
std::vector<charmod::CharacterSpec> parse_stages(std::istream& in);
std::vector<charmod::CharacterSpec> parse_stages(const std::string& text);

/// Resolves `path` directly, then against each entry of QUADSIEVE_CONFIG_DIR
/// (':'-separated), then against the bundled configs directory. Throws
/// ConfigError if nothing matches.
std::filesystem::path resolve_config_path(const std::string& path);

std::string read_file(const std::filesystem::path& path);

}  // namespace quadsieve::config
