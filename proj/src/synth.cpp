#include "safs/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "safs/common.hpp"

namespace safs {

Link parse_link(const std::string& text) {
  if (text == "linear") return Link::Linear;
  if (text == "quadratic") return Link::Quadratic;
  if (text == "interaction") return Link::Interaction;
  throw ConfigError("unknown link '" + text + "' (linear|quadratic|interaction)");
}

const char* to_string(Link link) {
  switch (link) {
    case Link::Linear: return "linear";
    case Link::Quadratic: return "quadratic";
    case Link::Interaction: return "interaction";
  }
  return "linear";
}

void SynthSpec::validate() const {
  if (m == 0) throw ConfigError("synth: m must be at least 1");
  if (p_cont == 0 && p_cat == 0) throw ConfigError("synth: at least one feature required");
  if (k_relevant > p_cont) throw ConfigError("synth: k_relevant exceeds p_cont");
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) throw ConfigError("synth: noise_std must be non-negative");
  if (p_cat > 0) {
    if (levels.size() != 1 && levels.size() != p_cat) {
      throw ConfigError("synth: levels must hold one count or one per categorical column");
    }
    for (std::size_t l : levels) {
      if (l == 0) throw ConfigError("synth: level counts must be at least 1");
    }
  }
}

std::size_t SynthSpec::levels_of(std::size_t cat_index) const {
  return levels.size() == 1 ? levels[0] : levels[cat_index];
}

SynthSpec parse_synth_spec(const KeyValues& kv) {
  SynthSpec spec;
  for (const auto& [key, value] : kv) {
    try {
      if (key == "m") {
        spec.m = parse_size(value);
      } else if (key == "p_cont") {
        spec.p_cont = parse_size(value);
      } else if (key == "p_cat") {
        spec.p_cat = parse_size(value);
      } else if (key == "levels") {
        spec.levels = parse_size_list(value);
      } else if (key == "k_relevant") {
        spec.k_relevant = parse_size(value);
      } else if (key == "link") {
        spec.link = parse_link(value);
      } else if (key == "noise_std") {
        double v = 0.0;
        if (!try_parse_double(value, v)) throw ConfigError("expected a number");
        spec.noise_std = v;
      } else if (key == "seed") {
        spec.seed = parse_size(value);
      } else {
        throw ConfigError("unknown key");
      }
    } catch (const ConfigError& e) {
      throw ConfigError("synth key '" + key + "': " + e.what());
    }
  }
  spec.validate();
  return spec;
}

namespace {

std::string padded_name(const char* prefix, std::size_t index, std::size_t count) {
  const std::size_t digits = std::to_string(count).size();
  std::string num = std::to_string(index + 1);
  return prefix + std::string(digits - std::min(digits, num.size()), '0') + num;
}

}  // namespace

SynthData generate_synth(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(derive_seed(spec.seed, SeedTag::kSynth));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<std::size_t> order(spec.p_cont);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> relevant(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(spec.k_relevant));
  std::sort(relevant.begin(), relevant.end());

  std::vector<double> lo(spec.p_cont), width(spec.p_cont);
  for (std::size_t j = 0; j < spec.p_cont; ++j) {
    lo[j] = -50.0 + 100.0 * unit(rng);
    width[j] = 5.0 + 10.0 * unit(rng);
  }

  SynthData out;
  std::vector<std::string> cat_names;
  for (std::size_t j = 0; j < spec.p_cont; ++j) out.continuous_names.push_back(padded_name("x", j, spec.p_cont));
  for (std::size_t j = 0; j < spec.p_cat; ++j) cat_names.push_back(padded_name("c", j, spec.p_cat));
  for (std::size_t j : relevant) out.relevant.push_back(out.continuous_names[j]);

  std::ostringstream csv;
  for (const auto& n : out.continuous_names) csv << n << ',';
  for (const auto& n : cat_names) csv << n << ',';
  csv << "y\n";

  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> x(spec.p_cont), u(spec.p_cont);
  for (std::size_t i = 0; i < spec.m; ++i) {
    for (std::size_t j = 0; j < spec.p_cont; ++j) {
      x[j] = lo[j] + width[j] * unit(rng);
      u[j] = 2.0 * (x[j] - lo[j]) / width[j] - 1.0;
    }
    std::vector<std::size_t> cat(spec.p_cat);
    for (std::size_t j = 0; j < spec.p_cat; ++j) {
      std::uniform_int_distribution<std::size_t> pick(0, spec.levels_of(j) - 1);
      cat[j] = pick(rng);
    }
    double y = 0.0;
    switch (spec.link) {
      case Link::Linear:
        for (std::size_t j : relevant) y += x[j];
        break;
      case Link::Quadratic:
        for (std::size_t j : relevant) y += 10.0 * u[j] * u[j];
        break;
      case Link::Interaction:
        for (std::size_t j : relevant) y += 5.0 * u[j];
        if (relevant.size() == 2) {
          y += 10.0 * u[relevant[0]] * u[relevant[1]];
        } else if (relevant.size() > 2) {
          for (std::size_t r = 0; r < relevant.size(); ++r) {
            y += 10.0 * u[relevant[r]] * u[relevant[(r + 1) % relevant.size()]];
          }
        }
        break;
    }
    // Drawn unconditionally so the feature stream does not depend on noise_std.
    const double z = noise(rng);
    y += spec.noise_std * z;

    for (std::size_t j = 0; j < spec.p_cont; ++j) csv << format_double(x[j]) << ',';
    for (std::size_t j = 0; j < spec.p_cat; ++j) csv << 'L' << (cat[j] + 1) << ',';
    csv << format_double(y) << '\n';
  }
  out.csv = csv.str();

  std::ostringstream schema;
  for (const auto& n : out.continuous_names) schema << n << ": continuous\n";
  for (const auto& n : cat_names) schema << n << ": categorical\n";
  schema << "y: target\n";
  out.schema = schema.str();
  return out;
}

void write_synth(const SynthSpec& spec, const std::filesystem::path& dir) {
  const auto data = generate_synth(spec);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + dir.string() + "': " + ec.message());
  const auto write = [](const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
  };
  write(dir / "data.csv", data.csv);
  write(dir / "schema.txt", data.schema);
  std::string truth;
  for (const auto& n : data.relevant) truth += n + "\n";
  write(dir / "truth.txt", truth);
}

}  // namespace safs
