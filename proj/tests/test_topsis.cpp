#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "car_example.hpp"
#include "random_matrix.hpp"
#include "specnego/error.hpp"
#include "specnego/topsis.hpp"
#include "topsis_oracle.hpp"

using namespace specnego;
using namespace specnego::mcdm;

namespace {

DecisionMatrix single_column(std::vector<double> col, CriterionSense sense = CriterionSense::Benefit) {
  DecisionMatrix dm;
  for (std::size_t i = 0; i < col.size(); ++i) dm.alternatives.push_back("a" + std::to_string(i));
  dm.criteria = {"c"};
  const std::size_t m = col.size();
  dm.scores = Matrix(m, 1, std::move(col));
  dm.weights = {1.0};
  dm.senses = {sense};
  return dm;
}

}  // namespace

TEST_CASE("normalize divides by the column norm") {
  const auto r = normalize(car::matrix());
  // Style column (7, 8, 9, 6), norm sqrt(230).
  const double expect[] = {0.46, 0.53, 0.59, 0.40};
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(r(i, 0) - expect[i]) < 0.005);
  CHECK(r(0, 0) == doctest::Approx(7.0 / std::sqrt(230.0)));
}

TEST_CASE("normalize edge cases") {
  CHECK(normalize(single_column({5.0}))(0, 0) == 1.0);
  const auto z = normalize(single_column({0.0, 0.0}));
  CHECK(z(0, 0) == 0.0);
  CHECK(z(1, 0) == 0.0);
}

TEST_CASE("apply_weights on the car example") {
  const auto v = apply_weights(normalize(car::matrix()), car::kWeights);
  // Full precision from the raw scores; the printed table rounds r first.
  CHECK(v(car::Civic, 0) == doctest::Approx(0.1 * 7 / std::sqrt(230.0)).epsilon(1e-12));
  CHECK(v(car::Civic, 3) == doctest::Approx(0.106).epsilon(0.005));

  const auto printed = apply_weights(Matrix::from_rows(car::kPrintedNormalized), car::kWeights);
  const double civic[] = {0.046, 0.244, 0.162, 0.106};
  for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(printed(car::Civic, j) - civic[j]) < 1e-12);
}

TEST_CASE("apply_weights normalizes weights internally") {
  const auto r = normalize(car::matrix());
  const auto a = apply_weights(r, std::vector<double>{2, 8, 6, 4});
  const auto b = apply_weights(r, std::vector<double>{0.1, 0.4, 0.3, 0.2});
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(a(i, j) == doctest::Approx(b(i, j)).epsilon(1e-14));

  const auto id = apply_weights(Matrix(2, 1, {1.0, 0.8}), std::vector<double>{1.0});
  CHECK(id(0, 0) == 1.0);
  CHECK(id(1, 0) == 0.8);

  CHECK_THROWS_AS(apply_weights(r, std::vector<double>{1, 1}), StructuralError);
}

TEST_CASE("ideal_solutions respects senses") {
  const auto ref = ideal_solutions(Matrix::from_rows(car::kPrintedWeighted),
                                   std::vector<CriterionSense>(4, CriterionSense::Benefit));
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(ref.ideal[j] == doctest::Approx(car::kPrintedIdeal[j]));
    CHECK(ref.anti_ideal[j] == doctest::Approx(car::kPrintedAntiIdeal[j]));
  }

  const auto one = ideal_solutions(Matrix(1, 2, {0.3, 0.7}),
                                   std::vector{CriterionSense::Benefit, CriterionSense::Cost});
  CHECK(one.ideal == std::vector{0.3, 0.7});
  CHECK(one.anti_ideal == std::vector{0.3, 0.7});

  const auto mixed = ideal_solutions(Matrix::from_rows({{1, 1}, {2, 2}}),
                                     std::vector{CriterionSense::Benefit, CriterionSense::Cost});
  CHECK(mixed.ideal == std::vector{2.0, 1.0});
  CHECK(mixed.anti_ideal == std::vector{1.0, 2.0});
}

TEST_CASE("separations") {
  const auto v = Matrix::from_rows(car::kPrintedWeighted);
  const auto sep = separations(v, car::kPrintedIdeal, car::kPrintedAntiIdeal);
  CHECK(sep.to_ideal[car::Civic] == doctest::Approx(car::kPrintedCivicSepIdeal).epsilon(1e-3));

  // Full-precision anti-ideal distance for Civic.
  const auto res = topsis(car::matrix());
  CHECK(std::abs(res.sep_anti[car::Civic] - 0.0881) < 0.001);

  const auto at_ideal = separations(Matrix(1, 2, {0.2, 0.4}), std::vector{0.2, 0.4},
                                    std::vector{0.0, 0.0});
  CHECK(at_ideal.to_ideal[0] == 0.0);
}

TEST_CASE("closeness_and_rank") {
  const auto deg = closeness_and_rank(std::vector{0.0}, std::vector{0.0});
  CHECK(deg.closeness == std::vector{1.0});
  CHECK(deg.order == std::vector<std::size_t>{0});

  const auto tie = closeness_and_rank(std::vector{0.5, 0.2, 0.5}, std::vector{0.5, 0.8, 0.5});
  CHECK(tie.order == std::vector<std::size_t>{1, 0, 2});
}

TEST_CASE("car example end to end") {
  const auto res = topsis(car::matrix());
  CHECK(res.ranking.front() == car::Civic);
  CHECK(res.ranking.back() == car::Mazda);

  // Frozen from the long-double oracle (and cross-checked in numpy).
  const double frozen[] = {0.82533717, 0.34190933, 0.34540020, 0.27327358};
  const auto o = oracle::topsis(car::kScores, car::kWeights, std::vector<bool>(4, true));
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::abs(res.closeness[i] - static_cast<double>(o.closeness[i])) < 1e-9);
    CHECK(std::abs(res.closeness[i] - frozen[i]) < 1e-7);
  }
}

TEST_CASE("degenerate inputs") {
  const auto one = topsis(single_column({3.0}));
  CHECK(one.ranking == std::vector<std::size_t>{0});
  CHECK(one.closeness == std::vector{1.0});

  auto twins = single_column({4.0, 4.0});
  const auto t = topsis(twins);
  CHECK(t.closeness[0] == t.closeness[1]);
  CHECK(t.ranking == std::vector<std::size_t>{0, 1});
}

TEST_CASE("structural errors") {
  auto dm = car::matrix();
  dm.weights[1] = 0.0;
  CHECK_THROWS_AS(topsis(dm), StructuralError);

  dm = car::matrix();
  dm.senses.pop_back();
  CHECK_THROWS_AS(topsis(dm), StructuralError);

  dm = car::matrix();
  dm.scores(0, 0) = std::nan("");
  CHECK_THROWS_AS(topsis(dm), StructuralError);

  dm = car::matrix();
  dm.alternatives.pop_back();
  CHECK_THROWS_AS(topsis(dm), StructuralError);
}

TEST_CASE("property: oracle equivalence and closeness range") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const auto s = gen::sample(rng);
    const auto res = topsis(s.decision());
    const auto o = oracle::topsis(s.rows, s.weights, s.benefit);
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
      REQUIRE(std::abs(res.closeness[i] - static_cast<double>(o.closeness[i])) < 1e-9);
      REQUIRE(res.closeness[i] >= 0.0);
      REQUIRE(res.closeness[i] <= 1.0);
    }
    for (std::size_t k = 1; k < res.ranking.size(); ++k) {
      const auto a = res.ranking[k - 1], b = res.ranking[k];
      REQUIRE(res.closeness[a] >= res.closeness[b]);
      if (res.closeness[a] == res.closeness[b]) REQUIRE(a < b);
    }
  }
}

TEST_CASE("property: scale invariances") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    auto s = gen::sample(rng);
    const auto base = topsis(s.decision());

    auto scaled = s;
    const std::size_t col = rng() % s.weights.size();
    const double c = 0.01 + static_cast<double>(rng() % 1000);
    for (auto& row : scaled.rows) row[col] *= c;
    const auto sc = topsis(scaled.decision());
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
      for (std::size_t j = 0; j < s.weights.size(); ++j) {
        REQUIRE(std::abs(sc.normalized(i, j) - base.normalized(i, j)) < 1e-12);
      }
      REQUIRE(std::abs(sc.closeness[i] - base.closeness[i]) < 1e-9);
    }

    auto reweighted = s;
    for (auto& w : reweighted.weights) w *= 3.7;
    const auto rw = topsis(reweighted.decision());
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
      REQUIRE(std::abs(rw.closeness[i] - base.closeness[i]) < 1e-12);
    }
  }
}

TEST_CASE("property: permutation equivariance") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 300; ++trial) {
    const auto s = gen::sample(rng);
    std::vector<std::size_t> perm(s.rows.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    auto p = s;
    for (std::size_t i = 0; i < perm.size(); ++i) p.rows[i] = s.rows[perm[i]];

    const auto a = topsis(s.decision());
    const auto b = topsis(p.decision());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      REQUIRE(std::abs(b.closeness[i] - a.closeness[perm[i]]) < 1e-12);
    }
  }
}

TEST_CASE("dominating and dominated rows hit the closeness bounds") {
  DecisionMatrix dm;
  dm.alternatives = {"mid", "best", "worst", "other"};
  dm.criteria = {"b", "c"};
  dm.scores = Matrix::from_rows({{5, 5}, {9, 1}, {1, 9}, {6, 3}});
  dm.weights = {1, 1};
  dm.senses = {CriterionSense::Benefit, CriterionSense::Cost};
  const auto r = topsis(dm);
  CHECK(r.closeness[1] == doctest::Approx(1.0));
  CHECK(r.closeness[2] == doctest::Approx(0.0));
  CHECK(r.ranking.front() == 1);
  CHECK(r.ranking.back() == 2);
}
