#pragma once

#include <Eigen/Dense>
#include <optional>

#include "slnp/types.hpp"

namespace slnp {

enum class AffinityMode { dense, knn };

// Heat-kernel affinity parameters for lpp_fit/lfda_fit. heat_t unset means
// self-tuning: the median pairwise squared distance of the data at hand.
// knn sparsification keeps s_ij only when i and j are mutually among each
// other's knn_k nearest samples (diagonal always kept).
struct AffinityParams {
  std::optional<double> heat_t;
  AffinityMode mode = AffinityMode::dense;
  int knn_k = 7;
};

// Dense heat-kernel affinities s_ij = exp(-||x_i - x_j||^2 / t) between
// columns of x; t as in AffinityParams (resolved value returned through
// t_used when non-null).
Eigen::MatrixXd heat_affinities(const Eigen::MatrixXd& x,
                                const AffinityParams& params,
                                double* t_used = nullptr);

// Within-class scatter sum_c sum_{i in c} (x_i - mean_c)(x_i - mean_c)^T
// and between-class scatter sum_c N_c (mean_c - mean)(mean_c - mean)^T.
// Exposed for cross-checking against their pairwise-difference forms.
Eigen::MatrixXd lda_within_scatter(const LabeledDataset& ds);
Eigen::MatrixXd lda_between_scatter(const LabeledDataset& ds);

// Fisher discriminant directions: the d largest eigenvectors of
// S_b w = lambda (S_w + ridge) w, columns normalized to unit Euclidean
// length, descending eigenvalue order.
ProjectionModel lda_fit(const LabeledDataset& ds, int d, double ridge = 1e-8);

// Locality-preserving projection: low-end eigenvectors of
// (X L X^T) w = lambda (X D X^T + ridge) w for the heat-kernel affinity
// graph, satisfying W^T (X D X^T) W = I.
ProjectionModel lpp_fit(const LabeledDataset& ds, int d,
                        const AffinityParams& params = {},
                        double ridge = 1e-8);

// Local Fisher discriminant: pairwise scatters with locality-modulated
// weights (same class: within s_ij/N_c, between s_ij (1/N - 1/N_c);
// different class: between 1/N), solved like lda_fit, unit columns.
ProjectionModel lfda_fit(const LabeledDataset& ds, int d,
                         const AffinityParams& params = {},
                         double ridge = 1e-8);

// The locality-weighted scatters used by lfda_fit, exposed for the same
// dual-route checks as the LDA scatters.
Eigen::MatrixXd lfda_within_scatter(const LabeledDataset& ds,
                                    const Eigen::MatrixXd& affinity);
Eigen::MatrixXd lfda_between_scatter(const LabeledDataset& ds,
                                     const Eigen::MatrixXd& affinity);

}  // namespace slnp
