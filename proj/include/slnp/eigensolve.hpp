#pragma once

#include <Eigen/Dense>
#include <utility>

#include "slnp/types.hpp"

namespace slnp {

// Symmetric positive semidefinite scatter with the absolute ridge that was
// added to it. matrix already includes the ridge.
struct ScatterMatrix {
  Eigen::MatrixXd matrix;
  double ridge_applied = 0;
};

enum class EigNormalization { unit, b_orthonormal };

// Eigenpairs in ascending eigenvalue order. vectors' columns follow the
// fixed sign convention: the largest-magnitude component of each column is
// positive (first such component when magnitudes tie).
struct EigenResult {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  EigNormalization normalization = EigNormalization::unit;
};

// B + ridge * scale * I with scale = trace(B)/dim, falling back to 1 when
// the trace vanishes so a zero matrix still ridges to a definite one.
// Returns the absolute amount added.
double add_ridge(Eigen::MatrixXd& b, double ridge);

// Total scatter sum_i (x_i - mean)(x_i - mean)^T of the dataset's feature
// columns, plus the trace-scaled ridge. Throws SingleSample when N < 2.
// Invariant under sample reordering and feature translation.
ScatterMatrix total_scatter(const LabeledDataset& ds, double ridge);

// Full symmetric eigendecomposition (ascending). Throws NotSymmetric when
// a differs from its transpose beyond tolerance, NoConvergence on solver
// failure. Unit-norm vectors under the sign convention.
EigenResult sym_eig(const Eigen::MatrixXd& a);

// The d smallest eigenpairs of A w = lambda B w for symmetric A and
// positive definite B, via B = L L^T and the symmetric reduction
// C = L^-1 A L^-T. Vectors are B-orthonormal (W^T B W = I) under the sign
// convention. Throws NotPositiveDefinite when B has no Cholesky factor,
// DimensionTooLarge when d exceeds the problem size.
EigenResult generalized_eig_smallest(const Eigen::MatrixXd& a,
                                     const Eigen::MatrixXd& b, int d);

// The d largest eigenpairs of the same pencil, descending, B-orthonormal.
EigenResult generalized_eig_largest(const Eigen::MatrixXd& a,
                                    const Eigen::MatrixXd& b, int d);

// PCA by the top-d_out eigenvectors of the (1/N) covariance of ds. The
// returned model centers at the data mean and projects with orthonormal
// columns in descending-variance order. Throws DimensionTooLarge when
// d_out > D.
ProjectionModel pca_fit(const LabeledDataset& ds, int d_out);

// Convenience pairing of pca_fit with its application: the reduced dataset
// (d_out x N, same labels/partition) plus the fitted model.
std::pair<LabeledDataset, ProjectionModel> pca_reduce(const LabeledDataset& ds,
                                                      int d_out);

}  // namespace slnp
