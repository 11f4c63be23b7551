#pragma once

// Single-threaded reference versions of the OpenMP kernels. They share no
// loop code with the parallel paths and exist so tests and benchmarks can
// check that parallel results are identical and measure the speedup.

#include <span>
#include <vector>

#include "safs/autoencoder.hpp"
#include "safs/dataset.hpp"
#include "safs/forest.hpp"
#include "safs/pipeline.hpp"

namespace safs::serial {

Matrix represent(const StackedAutoencoder& sae, const Matrix& data);

RandomForest fit_random_forest(const Matrix& x, std::span<const double> y, const ForestParams& params);

std::vector<double> rf_predict(const RandomForest& forest, const Matrix& x);

/// evaluate_architecture for every n in the grid, in order.
std::vector<EvaluationResult> sweep(const Dataset& d, const PipelineConfig& cfg);

}  // namespace safs::serial
