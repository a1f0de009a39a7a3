// Copyright 2026 The ratio-mc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RATIO_MC_DIAGNOSTICS_QUADRATURE_HPP
#define RATIO_MC_DIAGNOSTICS_QUADRATURE_HPP

#include <ratio_mc/core/linalg.hpp>
#include <ratio_mc/errors.hpp>

#include <functional>
#include <vector>

namespace ratio_mc {

/// Regular tensor grid over a box, for trapezoidal quadrature in one or two dimensions.
class Grid {
 public:
  struct Axis {
    double lo;
    double hi;
    std::size_t n_nodes;
  };

  explicit Grid(std::vector<Axis> axes) : axes_{std::move(axes)} {
    if (axes_.empty() || axes_.size() > 2) {
      throw InvalidArgument("grid: quadrature supports 1 or 2 dimensions");
    }
    for (const auto& a : axes_) {
      if (!(a.lo < a.hi) || a.n_nodes < 2) {
        throw InvalidArgument("grid: need lo < hi and at least 2 nodes per axis");
      }
    }
  }

  static Grid line(double lo, double hi, std::size_t n) { return Grid{{{lo, hi, n}}}; }
  static Grid square(double lo, double hi, std::size_t n) { return Grid{{{lo, hi, n}, {lo, hi, n}}}; }

  [[nodiscard]] const std::vector<Axis>& axes() const noexcept { return axes_; }
  [[nodiscard]] std::size_t dim() const noexcept { return axes_.size(); }

  [[nodiscard]] std::size_t size() const noexcept {
    std::size_t n = 1;
    for (const auto& a : axes_) {
      n *= a.n_nodes;
    }
    return n;
  }

  [[nodiscard]] static double node(const Axis& a, std::size_t i) {
    if (i + 1 == a.n_nodes) {
      return a.hi;
    }
    return a.lo + (a.hi - a.lo) * static_cast<double>(i) / static_cast<double>(a.n_nodes - 1);
  }

  [[nodiscard]] static double trapezoid_weight(const Axis& a, std::size_t i) {
    const double h = (a.hi - a.lo) / static_cast<double>(a.n_nodes - 1);
    return (i == 0 || i + 1 == a.n_nodes) ? 0.5 * h : h;
  }

  /// Visits every node with its tensor-product trapezoid weight; the last axis varies fastest.
  template <class Visitor>
  void for_each(Visitor&& visit) const {
    Vec x(static_cast<Eigen::Index>(dim()));
    if (dim() == 1) {
      for (std::size_t i = 0; i < axes_[0].n_nodes; ++i) {
        x[0] = node(axes_[0], i);
        visit(x, trapezoid_weight(axes_[0], i));
      }
      return;
    }
    for (std::size_t i = 0; i < axes_[0].n_nodes; ++i) {
      x[0] = node(axes_[0], i);
      const double wi = trapezoid_weight(axes_[0], i);
      for (std::size_t j = 0; j < axes_[1].n_nodes; ++j) {
        x[1] = node(axes_[1], j);
        visit(x, wi * trapezoid_weight(axes_[1], j));
      }
    }
  }

  [[nodiscard]] double integrate(const std::function<double(const Vec&)>& f) const {
    double acc = 0.0;
    for_each([&](const Vec& x, double w) { acc += w * f(x); });
    return acc;
  }

 private:
  std::vector<Axis> axes_;
};

}  // namespace ratio_mc

#endif
