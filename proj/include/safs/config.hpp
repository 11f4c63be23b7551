#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "safs/pipeline.hpp"

namespace safs {

/// Flat `key = value` text: one pair per line, '#' comments, lists
/// comma-separated. Duplicate keys are an error.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text);

/// Pipeline settings plus input/output locations.
struct RunConfig {
  std::filesystem::path input_csv;
  std::optional<std::filesystem::path> schema_path;
  std::optional<std::string> target_name;
  std::filesystem::path output_dir = "safs_out";
  std::size_t max_levels = 10;
  std::string missing;
  PipelineConfig pipeline;
};

/// Relative paths are resolved against `base_dir`. Unknown keys and
/// unparsable values throw ConfigError.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Parses `a,b,c` and `lo..hi` / `lo..hi:step` ranges (mixable).
std::vector<std::size_t> parse_size_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);
std::size_t parse_size(const std::string& text);
bool parse_bool(const std::string& text);

}  // namespace safs
