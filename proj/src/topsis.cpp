#include "specnego/topsis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "specnego/error.hpp"

namespace specnego::mcdm {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw StructuralError("matrix data size does not match dimensions");
  }
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  const std::size_t cols = rows.front().size();
  std::vector<double> data;
  data.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw StructuralError("ragged matrix rows");
    data.insert(data.end(), r.begin(), r.end());
  }
  return Matrix(rows.size(), cols, std::move(data));
}

void DecisionMatrix::check() const {
  const std::size_t m = scores.rows();
  const std::size_t n = scores.cols();
  if (m == 0 || n == 0) throw StructuralError("decision matrix must be at least 1x1");
  if (alternatives.size() != m) {
    throw StructuralError("alternative label count does not match score rows");
  }
  if (criteria.size() != n) {
    throw StructuralError("criterion label count does not match score columns");
  }
  if (weights.size() != n) throw StructuralError("weight count does not match criteria");
  if (senses.size() != n) throw StructuralError("sense count does not match criteria");
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(weights[j]) || weights[j] <= 0.0) {
      std::ostringstream os;
      os << "weight of criterion '" << criteria[j] << "' must be finite and > 0";
      throw StructuralError(os.str());
    }
  }
  for (double x : scores.values()) {
    if (!std::isfinite(x)) throw StructuralError("decision matrix contains a non-finite score");
  }
}

Matrix normalize(const Matrix& scores) {
  Matrix out(scores.rows(), scores.cols());
  for (std::size_t j = 0; j < scores.cols(); ++j) {
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < scores.rows(); ++i) sum_sq += scores(i, j) * scores(i, j);
    const double norm = std::sqrt(sum_sq);
    if (norm == 0.0) continue;
    for (std::size_t i = 0; i < scores.rows(); ++i) out(i, j) = scores(i, j) / norm;
  }
  return out;
}

Matrix normalize(const DecisionMatrix& matrix) {
  matrix.check();
  return normalize(matrix.scores);
}

Matrix apply_weights(const Matrix& normalized, std::span<const double> weights) {
  if (weights.size() != normalized.cols()) {
    throw StructuralError("weight count does not match grid columns");
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw StructuralError("weights must sum to a positive value");
  Matrix out(normalized.rows(), normalized.cols());
  for (std::size_t i = 0; i < normalized.rows(); ++i) {
    for (std::size_t j = 0; j < normalized.cols(); ++j) {
      out(i, j) = (weights[j] / total) * normalized(i, j);
    }
  }
  return out;
}

ReferencePoints ideal_solutions(const Matrix& weighted,
                                std::span<const CriterionSense> senses) {
  if (weighted.rows() == 0) throw StructuralError("weighted grid is empty");
  if (senses.size() != weighted.cols()) {
    throw StructuralError("sense count does not match grid columns");
  }
  ReferencePoints ref;
  ref.ideal.resize(weighted.cols());
  ref.anti_ideal.resize(weighted.cols());
  for (std::size_t j = 0; j < weighted.cols(); ++j) {
    double lo = weighted(0, j);
    double hi = weighted(0, j);
    for (std::size_t i = 1; i < weighted.rows(); ++i) {
      lo = std::min(lo, weighted(i, j));
      hi = std::max(hi, weighted(i, j));
    }
    const bool benefit = senses[j] == CriterionSense::Benefit;
    ref.ideal[j] = benefit ? hi : lo;
    ref.anti_ideal[j] = benefit ? lo : hi;
  }
  return ref;
}

namespace {

double distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace

Separations separations(const Matrix& weighted, std::span<const double> ideal,
                        std::span<const double> anti_ideal) {
  if (ideal.size() != weighted.cols() || anti_ideal.size() != weighted.cols()) {
    throw StructuralError("reference point length does not match grid columns");
  }
  Separations sep;
  sep.to_ideal.reserve(weighted.rows());
  sep.to_anti_ideal.reserve(weighted.rows());
  for (std::size_t i = 0; i < weighted.rows(); ++i) {
    sep.to_ideal.push_back(distance(weighted.row(i), ideal));
    sep.to_anti_ideal.push_back(distance(weighted.row(i), anti_ideal));
  }
  return sep;
}

Ranking closeness_and_rank(std::span<const double> sep_ideal,
                           std::span<const double> sep_anti) {
  if (sep_ideal.size() != sep_anti.size()) {
    throw StructuralError("separation vectors differ in length");
  }
  Ranking out;
  out.closeness.reserve(sep_ideal.size());
  for (std::size_t i = 0; i < sep_ideal.size(); ++i) {
    const double denom = sep_ideal[i] + sep_anti[i];
    out.closeness.push_back(denom == 0.0 ? 1.0 : sep_anti[i] / denom);
  }
  out.order.resize(out.closeness.size());
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  std::stable_sort(out.order.begin(), out.order.end(), [&](std::size_t a, std::size_t b) {
    return out.closeness[a] > out.closeness[b];
  });
  return out;
}

TopsisResult topsis(const DecisionMatrix& matrix) {
  matrix.check();
  TopsisResult res;
  res.normalized = normalize(matrix.scores);
  res.weighted = apply_weights(res.normalized, matrix.weights);
  auto ref = ideal_solutions(res.weighted, matrix.senses);
  res.ideal = std::move(ref.ideal);
  res.anti_ideal = std::move(ref.anti_ideal);
  auto sep = separations(res.weighted, res.ideal, res.anti_ideal);
  res.sep_ideal = std::move(sep.to_ideal);
  res.sep_anti = std::move(sep.to_anti_ideal);
  auto rank = closeness_and_rank(res.sep_ideal, res.sep_anti);
  res.closeness = std::move(rank.closeness);
  res.ranking = std::move(rank.order);
  return res;
}

}  // namespace specnego::mcdm
