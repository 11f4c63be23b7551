#pragma once

#include "safs/dataset.hpp"
#include "safs/synth.hpp"

namespace testutil {

inline safs::Dataset synth_dataset(const safs::SynthSpec& spec) {
  const auto data = safs::generate_synth(spec);
  safs::CsvOptions o;
  o.schema = safs::parse_schema(data.schema);
  return safs::parse_csv(data.csv, o);
}

inline safs::SynthSpec small_spec(std::uint64_t seed = 1) {
  safs::SynthSpec s;
  s.m = 60;
  s.p_cont = 6;
  s.p_cat = 2;
  s.levels = {3};
  s.k_relevant = 2;
  s.link = safs::Link::Linear;
  s.seed = seed;
  return s;
}

inline safs::PipelineConfig quick_config() {
  safs::PipelineConfig c;
  c.n_grid = {2, 4};
  c.n_trees = {10};
  c.cv_folds = 3;
  c.repeats = 1;
  c.train.epochs = 15;
  c.top_k = 5;
  c.seed = 9;
  return c;
}

}  // namespace testutil
