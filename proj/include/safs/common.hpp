#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace safs {

/// Input data or arguments that violate a documented precondition.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Purpose tags for seed derivation. Every random stream in the library is
// derived from one user seed plus a tag, so partial reruns reproduce the
// same streams as full runs.
enum class SeedTag : std::uint64_t {
  kAutoencoderStage = 1,
  kArchitecture = 2,
  kCvSplit = 3,
  kModel = 4,
  kForestTree = 5,
  kSynth = 6,
  kFinalFit = 7,
};

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, SeedTag tag, std::uint64_t a = 0,
                                    std::uint64_t b = 0) {
  std::uint64_t h = mix64(seed ^ mix64(static_cast<std::uint64_t>(tag)));
  h = mix64(h ^ mix64(a + 0x632be59bd9b4e019ULL));
  return mix64(h ^ mix64(b + 0x8cb92ba72f3d8dd7ULL));
}

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Strict full-string parse; throws DataError on failure.
double parse_double(std::string_view text);
bool try_parse_double(std::string_view text, double& out);

std::string_view trim(std::string_view s);

}  // namespace safs
