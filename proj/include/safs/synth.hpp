#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "safs/config.hpp"

namespace safs {

enum class Link { Linear, Quadratic, Interaction };

Link parse_link(const std::string& text);
const char* to_string(Link link);

/// Synthetic regression table with known relevant features.
///
/// Continuous column j is uniform on [lo_j, lo_j + width_j] with lo_j drawn
/// from U(-50, 50) and width_j from U(5, 15). With u_j = 2(x_j - lo_j)/width_j - 1
/// and R the sorted relevant set, the noiseless target is
///   linear:      sum_{j in R} x_j
///   quadratic:   sum_{j in R} 10 u_j^2
///   interaction: sum_{j in R} 5 u_j + sum over cyclically adjacent pairs (a, b) of R of 10 u_a u_b
/// and y adds Normal(0, noise_std). Categorical columns are uniform over their
/// levels and carry no signal.
struct SynthSpec {
  std::size_t m = 300;
  std::size_t p_cont = 20;
  std::size_t p_cat = 0;
  /// One level count per categorical column, or a single count for all.
  std::vector<std::size_t> levels{3};
  std::size_t k_relevant = 5;
  Link link = Link::Linear;
  double noise_std = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t levels_of(std::size_t cat_index) const;
};

SynthSpec parse_synth_spec(const KeyValues& kv);

struct SynthData {
  std::string csv;
  std::string schema;
  std::vector<std::string> relevant;
  std::vector<std::string> continuous_names;
};

SynthData generate_synth(const SynthSpec& spec);

/// Writes data.csv, schema.txt and truth.txt into `dir` (created if absent).
void write_synth(const SynthSpec& spec, const std::filesystem::path& dir);

}  // namespace safs
