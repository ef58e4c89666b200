#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "slnp/types.hpp"

namespace slnp {

// One sample's within-class neighbor candidates, sorted by ascending
// squared embedded distance with ties broken by ascending source index.
// source_indices maps each sorted slot back to the within-class index it
// came from. self_position is the sorted slot holding the sample itself
// (present only when the sample was a candidate).
struct NeighborRow {
  std::vector<double> sorted_sq_dists;
  std::vector<int> source_indices;
  std::optional<int> self_position;

  int count() const { return static_cast<int>(sorted_sq_dists.size()); }
};

// All pairwise squared Euclidean distances between columns of y (d x N).
// Exactly symmetric with a zero diagonal by construction. Throws
// NonFiniteInput when y has non-finite entries.
Eigen::MatrixXd pairwise_sq_dists(const Eigen::MatrixXd& y);

// Builds the sorted candidate row for sample self_index from its distance
// row (length N_c). include_self keeps the zero self-distance as a
// candidate. Throws KTooLarge when fewer than k candidates exist.
NeighborRow neighbor_row(const Eigen::VectorXd& dist_row, int self_index,
                         int k, bool include_self);

// Closed-form adaptive regularizer: (k - 1)/2 times the Euclidean norm of
// the k smallest squared distances. Zero exactly when those distances are
// all zero.
double gamma_star(const NeighborRow& row, int k);

// Interval of regularizer values for which the similarity row's support is
// exactly the k nearest candidates:
//   low  = (k/2) d_(k)   - sum_{i<=k} d_(i) / 2
//   high = (k/2) d_(k+1) - sum_{i<=k} d_(i) / 2  (+inf without a k+1-th).
struct GammaBounds {
  double low = 0;
  double high = 0;
};
GammaBounds gamma_bounds(const NeighborRow& row, int k);

// Lagrange offset eta = (sum_{i<=k} d_(i) / (2 gamma) + 1) / k making the
// unclamped k-support row sum to 1. Throws GammaZero when gamma == 0; the
// caller must fall back to the uniform row instead.
double eta(const NeighborRow& row, int k, double gamma);

// Similarity row for one sample, scattered back to within-class indices
// (length class_size, zeros outside the k nearest). Entries are
// max(0, -d_(i)/(2 gamma) + eta) renormalized to sum exactly 1, with the
// uniform 1/k fallback when gamma == 0. similarity_row uses gamma_star;
// the _with_gamma form takes the regularizer as given.
Eigen::VectorXd similarity_row(const NeighborRow& row, int k, int class_size);
Eigen::VectorXd similarity_row_with_gamma(const NeighborRow& row, int k,
                                          int class_size, double gamma);

// Exact Euclidean projection of (-q) onto the probability simplex by the
// sort-and-threshold method, with the KKT conditions checked on the way
// out (nonnegativity, unit sum, complementary slackness within 1e-10).
Eigen::VectorXd simplex_project_oracle(const Eigen::VectorXd& q);

// One full similarity update: for every class c (embedded as y_by_class[c],
// a d x N_c matrix) and every sample, recompute neighbor candidates, the
// adaptive regularizer, and the similarity row. Returns the new blocks and
// regularizers; deterministic given inputs.
struct SStepResult {
  SimilarityBlocks similarities;
  RegularizationMatrix regularization;
};
SStepResult s_step(const std::vector<Eigen::MatrixXd>& y_by_class, int k,
                   bool include_self);

}  // namespace slnp
