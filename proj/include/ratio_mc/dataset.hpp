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

#ifndef RATIO_MC_DATASET_HPP
#define RATIO_MC_DATASET_HPP

#include <ratio_mc/core/linalg.hpp>
#include <ratio_mc/core/rng.hpp>
#include <ratio_mc/distributions.hpp>
#include <ratio_mc/errors.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

/**
 * \file
 * \brief The labeled dataset: points with binary labels, CSV persistence and stratified splits.
 *
 * Label 1 marks draws from the target P1, label 0 draws from the instrumental P0.
 */

namespace ratio_mc {

class LabeledDataset {
 public:
  LabeledDataset() = default;

  explicit LabeledDataset(Eigen::Index dim) : dim_{dim} {}

  LabeledDataset(Points points, std::vector<std::uint8_t> labels) : points_{std::move(points)}, labels_{std::move(labels)} {
    if (points_.size() != labels_.size()) {
      throw DimensionMismatch("dataset: points and labels differ in length");
    }
    dim_ = points_.empty() ? 0 : points_.front().size();
    for (std::size_t i = 0; i < points_.size(); ++i) {
      check(points_[i], labels_[i]);
      labels_[i] == 1 ? ++n1_ : ++n0_;
    }
  }

  void push_back(Vec x, std::uint8_t label) {
    if (dim_ == 0) {
      dim_ = x.size();
    }
    check(x, label);
    points_.push_back(std::move(x));
    labels_.push_back(label);
    label == 1 ? ++n1_ : ++n0_;
  }

  [[nodiscard]] const Points& points() const noexcept { return points_; }
  [[nodiscard]] const std::vector<std::uint8_t>& labels() const noexcept { return labels_; }
  [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
  [[nodiscard]] bool empty() const noexcept { return points_.empty(); }
  [[nodiscard]] std::size_t n0() const noexcept { return n0_; }
  [[nodiscard]] std::size_t n1() const noexcept { return n1_; }
  [[nodiscard]] Eigen::Index dim() const noexcept { return dim_; }

  /// Points carrying the given label, in dataset order.
  [[nodiscard]] Points points_with_label(std::uint8_t label) const {
    Points out;
    for (std::size_t i = 0; i < size(); ++i) {
      if (labels_[i] == label) {
        out.push_back(points_[i]);
      }
    }
    return out;
  }

  friend bool operator==(const LabeledDataset& a, const LabeledDataset& b) {
    if (a.dim_ != b.dim_ || a.labels_ != b.labels_) {
      return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a.points_[i] != b.points_[i]) {
        return false;
      }
    }
    return true;
  }

 private:
  void check(const Vec& x, std::uint8_t label) const {
    if (x.size() != dim_) {
      throw DimensionMismatch("dataset: point dimension " + std::to_string(x.size()) + " != " + std::to_string(dim_));
    }
    if (label > 1) {
      throw InvalidArgument("dataset: labels must be 0 or 1");
    }
  }

  Points points_;
  std::vector<std::uint8_t> labels_;
  Eigen::Index dim_ = 0;
  std::size_t n0_ = 0;
  std::size_t n1_ = 0;
};

/// Labels `target` points 1 and `instrumental` points 0, then shuffles the rows with `rng`.
inline LabeledDataset assemble_dataset(Points target, Points instrumental, RngStream& rng) {
  if (target.empty() || instrumental.empty()) {
    throw TooFewSamples("assemble_dataset: need at least one sample per class");
  }
  std::vector<std::pair<Vec, std::uint8_t>> rows;
  rows.reserve(target.size() + instrumental.size());
  for (auto& x : target) {
    rows.emplace_back(std::move(x), 1);
  }
  for (auto& x : instrumental) {
    rows.emplace_back(std::move(x), 0);
  }
  shuffle(rows, rng);
  LabeledDataset ds{rows.front().first.size()};
  for (auto& [x, k] : rows) {
    ds.push_back(std::move(x), k);
  }
  return ds;
}

/// Draws `n1` target points (label 1) and `n0` instrumental points (label 0), then shuffles.
inline LabeledDataset build_dataset(const Distribution& p1, const Distribution& p0, std::size_t n1, std::size_t n0,
                                    RngStream& rng) {
  if (n1 == 0 || n0 == 0) {
    throw TooFewSamples("build_dataset: need at least one sample per class");
  }
  if (p1.dim() != p0.dim()) {
    throw DimensionMismatch("build_dataset: target and instrumental dimensions differ");
  }
  auto target = p1.sample(n1, rng);
  auto instrumental = p0.sample(n0, rng);
  return assemble_dataset(std::move(target), std::move(instrumental), rng);
}

/// Shortest-safe decimal form: 17 significant digits always round-trips a double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(std::begin(buf), std::end(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline void write_dataset_csv(std::ostream& os, const LabeledDataset& ds) {
  for (Eigen::Index j = 0; j < ds.dim(); ++j) {
    os << 'x' << j << ',';
  }
  os << "label\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (Eigen::Index j = 0; j < ds.dim(); ++j) {
      os << format_double(ds.points()[i][j]) << ',';
    }
    os << static_cast<int>(ds.labels()[i]) << '\n';
  }
}

inline void save_csv(const LabeledDataset& ds, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  write_dataset_csv(os, ds);
  if (!os) {
    throw IoError("write failed: " + path.string());
  }
}

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    fields.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) {
      break;
    }
    start = pos + 1;
  }
  return fields;
}

inline double parse_double(std::string_view field, std::size_t line_no) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size() || !std::isfinite(v)) {
    throw ParseError(line_no, "not a finite number: '" + std::string(field) + "'");
  }
  return v;
}

inline void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
}

}  // namespace detail

/// Parses the `x0,...,x{d-1},label` format.
inline LabeledDataset read_dataset_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) {
    throw ParseError(1, "missing header");
  }
  detail::strip_cr(line);
  const auto header = detail::split_commas(line);
  if (header.size() < 2 || header.back() != "label") {
    throw ParseError(1, "header must be x0,...,x{d-1},label");
  }
  const auto dim = static_cast<Eigen::Index>(header.size() - 1);
  for (Eigen::Index j = 0; j < dim; ++j) {
    if (header[static_cast<std::size_t>(j)] != "x" + std::to_string(j)) {
      throw ParseError(1, "unexpected column name '" + std::string(header[static_cast<std::size_t>(j)]) + "'");
    }
  }
  LabeledDataset ds{dim};
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) {
      continue;
    }
    const auto fields = detail::split_commas(line);
    if (static_cast<Eigen::Index>(fields.size()) != dim + 1) {
      throw DimensionMismatch("line " + std::to_string(line_no) + ": expected " + std::to_string(dim + 1) +
                              " fields, found " + std::to_string(fields.size()));
    }
    Vec x(dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
      x[j] = detail::parse_double(fields[static_cast<std::size_t>(j)], line_no);
    }
    const auto label_field = fields.back();
    if (label_field != "0" && label_field != "1") {
      throw ParseError(line_no, "label must be 0 or 1, found '" + std::string(label_field) + "'");
    }
    ds.push_back(std::move(x), label_field == "1" ? 1 : 0);
  }
  return ds;
}

inline LabeledDataset load_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw IoError("cannot open " + path.string());
  }
  return read_dataset_csv(is);
}

struct DatasetSplit {
  LabeledDataset train;
  LabeledDataset validation;
  double split_fraction = 0.0;
};

/// Per-class split; each class sends floor(fraction * count) points to train, the rest to validation.
/**
 * Within each class the order is a seeded permutation, then both parts are reshuffled so
 * classes interleave. Throws `TooFewSamples` when a class has fewer than two points or when
 * either side of a class would be empty.
 */
inline DatasetSplit stratified_split(const LabeledDataset& ds, double fraction, RngStream& rng) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw InvalidArgument("stratified_split: fraction must lie in (0, 1)");
  }
  std::vector<std::pair<Vec, std::uint8_t>> train_rows;
  std::vector<std::pair<Vec, std::uint8_t>> val_rows;
  for (std::uint8_t label : {std::uint8_t{0}, std::uint8_t{1}}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (ds.labels()[i] == label) {
        idx.push_back(i);
      }
    }
    if (idx.size() < 2) {
      throw TooFewSamples("stratified_split: class " + std::to_string(label) + " has fewer than 2 points");
    }
    const auto n_train = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(idx.size()) + 1e-9));
    if (n_train == 0 || n_train == idx.size()) {
      throw TooFewSamples("stratified_split: class " + std::to_string(label) + " leaves an empty side");
    }
    shuffle(idx, rng);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      auto& dest = j < n_train ? train_rows : val_rows;
      dest.emplace_back(ds.points()[idx[j]], label);
    }
  }
  shuffle(train_rows, rng);
  shuffle(val_rows, rng);
  DatasetSplit split{LabeledDataset{ds.dim()}, LabeledDataset{ds.dim()}, fraction};
  for (auto& [x, k] : train_rows) {
    split.train.push_back(std::move(x), k);
  }
  for (auto& [x, k] : val_rows) {
    split.validation.push_back(std::move(x), k);
  }
  return split;
}

}  // namespace ratio_mc

#endif
