#include "safs/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "safs/common.hpp"

namespace safs {

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key(trim(s.substr(0, eq)));
    std::string value(trim(s.substr(eq + 1)));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, value).second) {
      throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  return kv;
}

std::size_t parse_size(const std::string& text) {
  const auto t = trim(text);
  if (t.empty() || t.front() == '-') throw ConfigError("expected a non-negative integer, got '" + text + "'");
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(std::string(t), &pos);
  } catch (const std::exception&) {
    throw ConfigError("expected a non-negative integer, got '" + text + "'");
  }
  if (pos != t.size()) throw ConfigError("expected a non-negative integer, got '" + text + "'");
  return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& text) {
  const auto t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("expected a boolean, got '" + text + "'");
}

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, ',')) {
    const auto t = trim(cur);
    if (t.empty()) throw ConfigError("empty list element in '" + text + "'");
    out.emplace_back(t);
  }
  return out;
}

double parse_config_double(const std::string& text) {
  double v = 0.0;
  if (!try_parse_double(text, v) || !std::isfinite(v)) throw ConfigError("expected a number, got '" + text + "'");
  return v;
}

}  // namespace

std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(text)) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_size(item));
      continue;
    }
    const std::size_t lo = parse_size(item.substr(0, dots));
    std::string rest = item.substr(dots + 2);
    std::size_t step = 1;
    if (const auto colon = rest.find(':'); colon != std::string::npos) {
      step = parse_size(rest.substr(colon + 1));
      rest = rest.substr(0, colon);
    }
    const std::size_t hi = parse_size(rest);
    if (step == 0 || hi < lo) throw ConfigError("bad range '" + item + "'");
    for (std::size_t v = lo; v <= hi; v += step) out.push_back(v);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_config_double(item));
  return out;
}

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  auto& p = cfg.pipeline;
  const auto resolve = [&](const std::string& v) {
    std::filesystem::path path(v);
    return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
  };
  bool have_input = false;
  for (const auto& [key, value] : parse_key_values(text)) {
    try {
      if (key == "input_csv") {
        cfg.input_csv = resolve(value);
        have_input = true;
      } else if (key == "schema_path") {
        cfg.schema_path = resolve(value);
      } else if (key == "target_name") {
        cfg.target_name = value;
      } else if (key == "output_dir") {
        cfg.output_dir = resolve(value);
      } else if (key == "max_levels") {
        cfg.max_levels = parse_size(value);
      } else if (key == "missing") {
        cfg.missing = value;
      } else if (key == "n_grid") {
        p.n_grid = parse_size_list(value);
      } else if (key == "selector") {
        if (value == "random_forest" || value == "rf") {
          p.selector = SelectorKind::RandomForest;
        } else if (value == "lasso") {
          p.selector = SelectorKind::Lasso;
        } else {
          throw ConfigError("unknown selector '" + value + "' (random_forest|lasso)");
        }
      } else if (key == "n_trees") {
        p.n_trees = parse_size_list(value);
      } else if (key == "lambdas") {
        p.lambdas = value == "auto" ? std::vector<double>{} : parse_double_list(value);
      } else if (key == "lambda_count") {
        p.lambda_count = parse_size(value);
      } else if (key == "mtry") {
        p.selector_options.mtry = parse_size(value);
      } else if (key == "min_leaf") {
        p.selector_options.min_leaf = parse_size(value);
      } else if (key == "refit_top_k") {
        p.selector_options.refit_top_k = parse_size(value);
      } else if (key == "learning_rate") {
        p.train.learning_rate = parse_config_double(value);
      } else if (key == "epochs") {
        p.train.epochs = parse_size(value);
      } else if (key == "batch_size") {
        p.train.batch_size = parse_size(value);
      } else if (key == "weight_init_scale") {
        p.train.weight_init_scale = parse_config_double(value);
      } else if (key == "cv_folds") {
        p.cv_folds = parse_size(value);
      } else if (key == "repeats") {
        p.repeats = parse_size(value);
      } else if (key == "top_k") {
        p.top_k = parse_size(value);
      } else if (key == "seed") {
        p.seed = parse_size(value);
      } else if (key == "strict") {
        p.strict = parse_bool(value);
      } else if (key == "sae_per_fold") {
        p.sae_per_fold = parse_bool(value);
      } else if (key == "threads") {
        p.threads = static_cast<int>(parse_size(value));
      } else {
        throw ConfigError("unknown key");
      }
    } catch (const ConfigError& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }
  if (!have_input) throw ConfigError("config: 'input_csv' is required");
  if (!cfg.schema_path && !cfg.target_name) {
    throw ConfigError("config: a target is required ('target_name' or a schema with a target line)");
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path.parent_path());
}

}  // namespace safs
