#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>

#include "slnp/errors.hpp"
#include "slnp/similarity.hpp"
#include "support/oracles.hpp"

using namespace slnp;

namespace {

NeighborRow row_from(std::vector<double> sorted) {
  NeighborRow row;
  row.source_indices.resize(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    row.source_indices[i] = static_cast<int>(i);
  row.sorted_sq_dists = std::move(sorted);
  return row;
}

}  // namespace

TEST_CASE("pairwise squared distances are exact, symmetric, zero-diagonal") {
  Eigen::MatrixXd y(2, 3);
  y << 0, 3, 0,
       0, 4, 1;
  const Eigen::MatrixXd d = pairwise_sq_dists(y);
  CHECK(d(0, 0) == 0);
  CHECK(d(1, 1) == 0);
  CHECK(d(0, 1) == doctest::Approx(25).epsilon(1e-15));
  CHECK(d(0, 2) == doctest::Approx(1).epsilon(1e-15));
  CHECK(d(1, 2) == doctest::Approx(18).epsilon(1e-15));
  CHECK((d - d.transpose()).cwiseAbs().maxCoeff() == 0);

  y(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(pairwise_sq_dists(y), NonFiniteInput);
}

TEST_CASE("neighbor candidates sort ascending with index tie-breaks") {
  Eigen::VectorXd dist(4);
  dist << 0.0, 2.0, 1.0, 2.0;

  const NeighborRow with_self = neighbor_row(dist, 0, 2, true);
  CHECK(with_self.source_indices == std::vector<int>{0, 2, 1, 3});
  CHECK(with_self.sorted_sq_dists == std::vector<double>{0, 1, 2, 2});
  REQUIRE(with_self.self_position.has_value());
  CHECK(*with_self.self_position == 0);

  const NeighborRow without_self = neighbor_row(dist, 0, 2, false);
  CHECK(without_self.source_indices == std::vector<int>{2, 1, 3});
  CHECK_FALSE(without_self.self_position.has_value());

  CHECK_THROWS_AS(neighbor_row(dist, 0, 5, true), KTooLarge);
  CHECK_THROWS_AS(neighbor_row(dist, 0, 4, false), KTooLarge);
}

TEST_CASE("regularizer closed form on known rows") {
  // k=2 over distances [1, 2]: (1/2) * sqrt(5)
  CHECK(gamma_star(row_from({1, 2}), 2) ==
        doctest::Approx(1.118034).epsilon(1e-6));
  // k=3 over [2, 2, 2]: sqrt(12)
  CHECK(gamma_star(row_from({2, 2, 2, 9}), 3) ==
        doctest::Approx(3.464102).epsilon(1e-6));
  // all-zero head vanishes
  CHECK(gamma_star(row_from({0, 0, 5}), 2) == 0);
  CHECK_THROWS_AS(gamma_star(row_from({1}), 2), KTooLarge);
}

TEST_CASE("regularizer matches extended-precision recomputation") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 20);
    const NeighborRow row = reference::random_neighbor_row(rng, n);
    for (int k = 2; k <= n; ++k) {
      const double expected = reference::gamma_star_extended(row, k);
      CHECK(gamma_star(row, k) ==
            doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("support bounds bracket the k-nearest support window") {
  const GammaBounds b = gamma_bounds(row_from({1, 2, 10}), 2);
  CHECK(b.low == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(b.high == doctest::Approx(8.5).epsilon(1e-15));

  // Equal distances collapse the low bound to zero.
  CHECK(gamma_bounds(row_from({3, 3, 3}), 2).low == doctest::Approx(0.0));

  // Without a (k+1)-th candidate the window is unbounded above.
  CHECK(std::isinf(gamma_bounds(row_from({1, 2}), 2).high));
}

TEST_CASE("closed-form regularizer never falls below the support low bound") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 30);
    const NeighborRow row = reference::random_neighbor_row(rng, n);
    const int k = 2 + static_cast<int>(rng() % (n - 1));
    CHECK(gamma_star(row, k) >= gamma_bounds(row, k).low - 1e-12);
  }
}

TEST_CASE("offset value on a known row") {
  // k=3, d=[2,2,2], gamma=2*sqrt(3): (6/(4 sqrt 3) + 1)/3
  const double g = 2.0 * std::sqrt(3.0);
  CHECK(eta(row_from({2, 2, 2}), 3, g) ==
        doctest::Approx(0.622008).epsilon(1e-6));
  CHECK_THROWS_AS(eta(row_from({1, 2}), 2, 0.0), GammaZero);
}

TEST_CASE("similarity rows on known inputs") {
  // k=2, d=[1,2]: weights (0.723607, 0.276393)
  const Eigen::VectorXd s = similarity_row(row_from({1, 2}), 2, 3);
  CHECK(s[0] == doctest::Approx(0.723607).epsilon(1e-6));
  CHECK(s[1] == doctest::Approx(0.276393).epsilon(1e-6));
  CHECK(s[2] == 0);
  CHECK(s.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("self distance zero takes the largest weight") {
  // With k=2 and the self distance at zero the regularizer sits exactly on
  // the low support bound, so the second weight is exactly zero.
  NeighborRow row = row_from({0, 4});
  row.self_position = 0;
  const Eigen::VectorXd s = similarity_row(row, 2, 2);
  CHECK(s[0] > s[1]);
  CHECK(s[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s[1] >= 0);
  CHECK(s.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("all-equal distances fall back to the uniform row") {
  // gamma_star > 0 here, but the solution is uniform by symmetry.
  const Eigen::VectorXd s = similarity_row(row_from({3, 3, 3}), 3, 3);
  for (int i = 0; i < 3; ++i)
    CHECK(s[i] == doctest::Approx(1.0 / 3).epsilon(1e-12));

  // gamma_star == 0 (coincident points) takes the explicit uniform path.
  const Eigen::VectorXd z = similarity_row(row_from({0, 0, 7}), 2, 3);
  CHECK(z[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(z[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(z[2] == 0);
}

TEST_CASE("similarity rows are simplex-feasible and distance-monotone") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 12);
    const NeighborRow row = reference::random_neighbor_row(rng, n);
    const int k = 2 + static_cast<int>(rng() % (n - 1));
    const Eigen::VectorXd s = similarity_row(row, k, n);

    CHECK(s.minCoeff() >= 0);
    CHECK(s.sum() == doctest::Approx(1.0).epsilon(1e-10));
    for (int i = k; i < n; ++i) CHECK(s[row.source_indices[i]] == 0);
    // Closer candidates never get less weight.
    for (int i = 0; i + 1 < k; ++i)
      CHECK(s[row.source_indices[i]] >= s[row.source_indices[i + 1]] - 1e-12);
  }
}

TEST_CASE("similarity rows are invariant to distance scaling") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 4 + static_cast<int>(rng() % 8);
    const NeighborRow row = reference::random_neighbor_row(rng, n);
    NeighborRow scaled = row;
    for (double& d : scaled.sorted_sq_dists) d *= 7.5;

    const int k = 2 + static_cast<int>(rng() % (n - 1));
    CHECK(gamma_star(scaled, k) ==
          doctest::Approx(7.5 * gamma_star(row, k)).epsilon(1e-12));
    const Eigen::VectorXd a = similarity_row(row, k, n);
    const Eigen::VectorXd b = similarity_row(scaled, k, n);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("simplex projection handles vertex and interior cases") {
  Eigen::VectorXd q(3);
  q << -1, 0, 0;  // projects v = (1, 0, 0)
  const Eigen::VectorXd vertex = simplex_project_oracle(q);
  CHECK(vertex[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(vertex[1] == doctest::Approx(0.0));
  CHECK(vertex[2] == doctest::Approx(0.0));

  q << 0, 0, 0;  // equidistant: uniform
  const Eigen::VectorXd uniform = simplex_project_oracle(q);
  for (int i = 0; i < 3; ++i)
    CHECK(uniform[i] == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("simplex projection matches exhaustive support enumeration") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    Eigen::VectorXd q(5);
    for (int i = 0; i < 5; ++i) q[i] = unit(rng);
    const Eigen::VectorXd fast = simplex_project_oracle(q);
    const Eigen::VectorXd slow = reference::simplex_project_enumerate(-q);
    REQUIRE(slow.size() == 5);
    CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("similarity row equals the simplex projection when the support fits") {
  std::mt19937_64 rng(53);
  int matched = 0;
  for (int trial = 0; trial < 20000 && matched < 500; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 10);
    const NeighborRow row = reference::random_neighbor_row(rng, n);
    const int k = 2 + static_cast<int>(rng() % (n - 1));
    const double gamma = gamma_star(row, k);
    if (gamma == 0) continue;

    Eigen::VectorXd q(n);
    for (int i = 0; i < n; ++i) q[i] = row.sorted_sq_dists[i] / (2.0 * gamma);
    const Eigen::VectorXd projected = simplex_project_oracle(q);

    // Condition on the full projection living inside the k nearest slots.
    bool support_fits = true;
    for (int i = k; i < n; ++i)
      if (projected[i] != 0) support_fits = false;
    if (!support_fits) continue;

    const Eigen::VectorXd s = similarity_row(row, k, n);
    for (int i = 0; i < n; ++i)
      CHECK(s[row.source_indices[i]] ==
            doctest::Approx(projected[i]).epsilon(1e-9));
    ++matched;
  }
  CHECK(matched == 500);
}

TEST_CASE("similarity row beats any random row on the same support") {
  // With the closed-form regularizer the clamp never fires, so the row is
  // the exact minimizer of sum_i d_i s_i + gamma sum_i s_i^2 over simplex
  // rows supported on the k nearest candidates.
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 10);
    const NeighborRow row = reference::random_neighbor_row(rng, n);
    const int k = 2 + static_cast<int>(rng() % (n - 1));
    const double gamma = gamma_star(row, k);
    if (gamma == 0) continue;

    const Eigen::VectorXd s = similarity_row(row, k, n);
    auto value = [&](const Eigen::VectorXd& cand) {
      double v = 0;
      for (int i = 0; i < n; ++i) {
        const double si = cand[row.source_indices[i]];
        v += row.sorted_sq_dists[i] * si + gamma * si * si;
      }
      return v;
    };

    for (int probe = 0; probe < 20; ++probe) {
      Eigen::VectorXd other = Eigen::VectorXd::Zero(n);
      double total = 0;
      for (int i = 0; i < k; ++i) {
        const double u = uniform(rng);
        other[row.source_indices[i]] = u;
        total += u;
      }
      if (total == 0) continue;
      other /= total;
      CHECK(value(s) <= value(other) + 1e-12 * (1 + std::abs(value(other))));
    }
  }
}

TEST_CASE("full similarity update is deterministic and feasible per class") {
  std::mt19937_64 rng(61);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<Eigen::MatrixXd> y_by_class;
  for (int c = 0; c < 3; ++c) {
    Eigen::MatrixXd y(2, 5 + c);
    for (int i = 0; i < y.size(); ++i) y.data()[i] = unit(rng);
    y_by_class.push_back(y);
  }

  const SStepResult a = s_step(y_by_class, 3, true);
  const SStepResult b = s_step(y_by_class, 3, true);
  REQUIRE(a.similarities.blocks.size() == 3);
  for (int c = 0; c < 3; ++c) {
    CHECK(a.similarities.blocks[c] == b.similarities.blocks[c]);
    CHECK(a.regularization.gammas[c] == b.regularization.gammas[c]);
    const auto& block = a.similarities.blocks[c];
    for (int j = 0; j < block.rows(); ++j) {
      CHECK(block.row(j).sum() == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(block.row(j).minCoeff() >= 0);
      CHECK(a.regularization.gammas[c][j] >= 0);
    }
  }

  CHECK_THROWS_AS(s_step(y_by_class, 6, true), KTooLarge);
}
