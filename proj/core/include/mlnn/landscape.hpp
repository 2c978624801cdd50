#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "mlnn/dataset.hpp"
#include "mlnn/network.hpp"

namespace mlnn {

/// `steps` evenly spaced values from lo to hi inclusive (just lo when steps == 1).
struct AxisRange {
  double lo = -1.0;
  double hi = 1.0;
  std::size_t steps = 50;

  std::vector<double> values() const;
};

/// Toy network for cost-surface probes: scalar input, one hidden unit, four
/// outputs, zero biases. Output weights 2..4 are pinned to `c`.
struct LandscapeFixture {
  double x = 1.0;
  LabelSet y{4, {0, 2}};
  double c = 0.0;
};

/// cost[i * w2.size() + j] is J at (w1_values[i], w2_values[j]).
struct LandscapeGrid {
  std::vector<double> w1_values;
  std::vector<double> w2_values;
  std::vector<double> cost;

  double at(std::size_t i, std::size_t j) const { return cost[i * w2_values.size() + j]; }
};

/// Throws ConfigError on an empty range (steps == 0 or lo > hi) or a fixture
/// whose label set does not have four labels.
LandscapeGrid landscape_grid(const AxisRange& w1_range, const AxisRange& w2_range, const LossConfig& loss,
                             Activation hidden_act, const LandscapeFixture& fixture = {});

/// `w1,w2,cost` header then one row per cell, w1 varying slowest.
void write_landscape_csv(std::ostream& out, const LandscapeGrid& grid);

struct PlateauScan {
  std::size_t plateau_cells = 0;
  std::size_t regions = 0;  // 4-connected components of plateau cells
  double min_cost = 0.0;
  std::vector<bool> is_plateau;  // same layout as LandscapeGrid::cost
};

/// Marks cells whose finite-difference partials along both axes are below
/// `gradient_tol` in magnitude while the cost exceeds the grid minimum by more
/// than `cost_margin`.
PlateauScan find_plateaus(const LandscapeGrid& grid, double gradient_tol = 1e-3, double cost_margin = 0.1);

}  // namespace mlnn
