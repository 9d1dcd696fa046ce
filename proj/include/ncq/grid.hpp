#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "ncq/errors.hpp"

namespace ncq {

/// One sampled coordinate. `var` indexes the four phase-space slots of the
/// operator being evaluated (0..3).
struct Axis {
  std::string name;
  int var = 0;
  double min = 0.0;
  double max = 1.0;
  int count = 2;

  double spacing() const { return (max - min) / (count - 1); }
  /// Endpoint-exact sample positions.
  double at(int i) const {
    if (i == count - 1) return max;
    return min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
};

/// Tensor-product grid; unsampled slots are held at `base`.
struct Grid {
  std::vector<Axis> axes;
  std::array<double, 4> base{0.0, 0.0, 0.0, 0.0};

  void validate() const {
    if (axes.empty()) throw GridError("grid has no axes");
    for (const auto& a : axes) {
      if (a.count < 2) throw GridError("axis '" + a.name + "' needs at least 2 points");
      if (!(a.min < a.max)) throw GridError("axis '" + a.name + "' needs min < max");
      if (a.var < 0 || a.var > 3) throw GridError("axis '" + a.name + "' has invalid slot");
    }
  }

  std::size_t size() const {
    std::size_t n = 1;
    for (const auto& a : axes) n *= static_cast<std::size_t>(a.count);
    return axes.empty() ? 0 : n;
  }

  /// Multi-index of a flat index; the last axis varies fastest.
  std::vector<int> indices(std::size_t flat) const {
    std::vector<int> idx(axes.size());
    for (std::size_t k = axes.size(); k-- > 0;) {
      idx[k] = static_cast<int>(flat % static_cast<std::size_t>(axes[k].count));
      flat /= static_cast<std::size_t>(axes[k].count);
    }
    return idx;
  }

  std::array<double, 4> point(std::size_t flat) const {
    std::array<double, 4> p = base;
    const auto idx = indices(flat);
    for (std::size_t k = 0; k < axes.size(); ++k) p[axes[k].var] = axes[k].at(idx[k]);
    return p;
  }

  std::vector<double> coordinates(std::size_t flat) const {
    const auto idx = indices(flat);
    std::vector<double> c(axes.size());
    for (std::size_t k = 0; k < axes.size(); ++k) c[k] = axes[k].at(idx[k]);
    return c;
  }

  /// Volume element used by discrete L2 norms.
  double cellVolume() const {
    double v = 1.0;
    for (const auto& a : axes) v *= a.spacing();
    return v;
  }
};

inline Grid makeGrid1(const std::string& name, int var, double min, double max, int count) {
  return Grid{{Axis{name, var, min, max, count}}, {}};
}

}  // namespace ncq
