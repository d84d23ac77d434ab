#pragma once

#include "fluidbeam/geometry.hpp"

#include <Eigen/Dense>

#include <vector>

namespace fluidbeam
{

/// Diagnostics for one greedy step.
struct SelectionStep
{
  PortIndex port = 0;
  double max_correlation = 0.0; // |<D_j, e>| of the chosen port, after column normalization
  double residual_norm = 0.0;   // ||e|| after the step's residual update
};

/// Activated ports in selection order with their complex weights.
struct Selection
{
  std::vector<PortIndex> support;
  Eigen::VectorXcd weights;
  std::vector<SelectionStep> trace;
};

} // namespace fluidbeam
