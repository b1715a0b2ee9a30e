#pragma once

// TOPSIS: ranks alternatives by their relative closeness to an ideal and
// away from an anti-ideal reference point in weighted, vector-normalized
// criterion space.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace specnego::mcdm {

enum class CriterionSense { Benefit, Cost };

/// Dense row-major m x n grid of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  /// Builds from nested rows; all rows must have equal length.
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> values() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct DecisionMatrix {
  std::vector<std::string> alternatives;
  std::vector<std::string> criteria;
  Matrix scores;
  std::vector<double> weights;
  std::vector<CriterionSense> senses;

  /// Throws StructuralError unless m, n >= 1, labels/weights/senses match the
  /// grid, every score is finite and every weight is finite and > 0.
  void check() const;
};

struct ReferencePoints {
  std::vector<double> ideal;
  std::vector<double> anti_ideal;
};

struct Separations {
  std::vector<double> to_ideal;
  std::vector<double> to_anti_ideal;
};

struct Ranking {
  std::vector<double> closeness;
  /// Alternative indices, best first. Ties keep ascending index order.
  std::vector<std::size_t> order;
};

struct TopsisResult {
  Matrix normalized;
  Matrix weighted;
  std::vector<double> ideal;
  std::vector<double> anti_ideal;
  std::vector<double> sep_ideal;
  std::vector<double> sep_anti;
  std::vector<double> closeness;
  std::vector<std::size_t> ranking;
};

/// Divides each column by its Euclidean norm. Zero-norm columns map to 0.
Matrix normalize(const Matrix& scores);
Matrix normalize(const DecisionMatrix& matrix);

/// v_ij = (w_j / sum w) * r_ij.
Matrix apply_weights(const Matrix& normalized, std::span<const double> weights);

/// Per column: best value (max for Benefit, min for Cost) and worst value.
ReferencePoints ideal_solutions(const Matrix& weighted,
                                std::span<const CriterionSense> senses);

Separations separations(const Matrix& weighted, std::span<const double> ideal,
                        std::span<const double> anti_ideal);

/// C_i = S'_i / (S*_i + S'_i); a zero denominator yields 1.
Ranking closeness_and_rank(std::span<const double> sep_ideal,
                           std::span<const double> sep_anti);

TopsisResult topsis(const DecisionMatrix& matrix);

}  // namespace specnego::mcdm
