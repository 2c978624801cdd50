#include "mlnn/landscape.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "mlnn/errors.hpp"

namespace mlnn {

std::vector<double> AxisRange::values() const {
  if (steps == 0 || !(lo <= hi)) throw ConfigError(fmt::format("empty range [{}, {}] x {}", lo, hi, steps));
  std::vector<double> out(steps);
  if (steps == 1) {
    out[0] = lo;
    return out;
  }
  const double step = (hi - lo) / static_cast<double>(steps - 1);
  for (std::size_t i = 0; i < steps; ++i) out[i] = lo + step * static_cast<double>(i);
  out.back() = hi;
  return out;
}

LandscapeGrid landscape_grid(const AxisRange& w1_range, const AxisRange& w2_range, const LossConfig& loss,
                             Activation hidden_act, const LandscapeFixture& fixture) {
  if (fixture.y.label_count() != 4) throw ConfigError("landscape fixture needs exactly four labels");
  LandscapeGrid grid;
  grid.w1_values = w1_range.values();
  grid.w2_values = w2_range.values();
  grid.cost.reserve(grid.w1_values.size() * grid.w2_values.size());

  NetworkParams params = NetworkParams::zeros({1, 1, 4});
  params.w2 = {0.0, fixture.c, fixture.c, fixture.c};
  const SparseVector x = fixture.x == 0.0 ? SparseVector(1) : SparseVector(1, {{0, fixture.x}});

  for (double w1 : grid.w1_values) {
    params.w1[0] = w1;
    for (double w2 : grid.w2_values) {
      params.w2[0] = w2;
      const ForwardTrace trace = forward(params, x, hidden_act, loss.output_activation());
      const auto cost = evaluate_loss(loss, trace.o, fixture.y);
      if (!cost) throw ConfigError("landscape fixture label set leaves the loss undefined");
      grid.cost.push_back(*cost);
    }
  }
  return grid;
}

void write_landscape_csv(std::ostream& out, const LandscapeGrid& grid) {
  out << "w1,w2,cost\n";
  std::string line;
  for (std::size_t i = 0; i < grid.w1_values.size(); ++i) {
    for (std::size_t j = 0; j < grid.w2_values.size(); ++j) {
      line.clear();
      fmt::format_to(std::back_inserter(line), "{},{},{}\n", grid.w1_values[i], grid.w2_values[j], grid.at(i, j));
      out << line;
    }
  }
}

namespace {

double partial(const std::vector<double>& axis, std::size_t k, double prev, double here, double next) {
  const std::size_t n = axis.size();
  if (n < 2) return 0.0;
  if (k == 0) return (next - here) / (axis[1] - axis[0]);
  if (k == n - 1) return (here - prev) / (axis[n - 1] - axis[n - 2]);
  return (next - prev) / (axis[k + 1] - axis[k - 1]);
}

}  // namespace

PlateauScan find_plateaus(const LandscapeGrid& grid, double gradient_tol, double cost_margin) {
  const std::size_t rows = grid.w1_values.size();
  const std::size_t cols = grid.w2_values.size();
  PlateauScan scan;
  scan.is_plateau.assign(rows * cols, false);
  if (grid.cost.empty()) return scan;
  scan.min_cost = grid.cost.front();
  for (double c : grid.cost) scan.min_cost = std::min(scan.min_cost, c);

  auto cost = [&](std::size_t i, std::size_t j) { return grid.at(i, j); };
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double here = cost(i, j);
      const double d1 = partial(grid.w1_values, i, i > 0 ? cost(i - 1, j) : here, here,
                                i + 1 < rows ? cost(i + 1, j) : here);
      const double d2 = partial(grid.w2_values, j, j > 0 ? cost(i, j - 1) : here, here,
                                j + 1 < cols ? cost(i, j + 1) : here);
      if (std::abs(d1) < gradient_tol && std::abs(d2) < gradient_tol && here > scan.min_cost + cost_margin) {
        scan.is_plateau[i * cols + j] = true;
        ++scan.plateau_cells;
      }
    }
  }

  std::vector<bool> seen(rows * cols, false);
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < rows * cols; ++start) {
    if (!scan.is_plateau[start] || seen[start]) continue;
    ++scan.regions;
    stack.push_back(start);
    seen[start] = true;
    while (!stack.empty()) {
      const std::size_t cell = stack.back();
      stack.pop_back();
      const std::size_t i = cell / cols, j = cell % cols;
      auto visit = [&](std::size_t ni, std::size_t nj) {
        const std::size_t n = ni * cols + nj;
        if (scan.is_plateau[n] && !seen[n]) {
          seen[n] = true;
          stack.push_back(n);
        }
      };
      if (i > 0) visit(i - 1, j);
      if (i + 1 < rows) visit(i + 1, j);
      if (j > 0) visit(i, j - 1);
      if (j + 1 < cols) visit(i, j + 1);
    }
  }
  return scan;
}

}  // namespace mlnn
