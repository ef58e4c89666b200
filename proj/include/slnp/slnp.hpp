#pragma once

#include <Eigen/Dense>
#include <optional>
#include <tuple>
#include <vector>

#include "slnp/similarity.hpp"
#include "slnp/types.hpp"

namespace slnp {

// Per-class graph Laplacians L_c = D_c - sym(S_c) built from symmetrized
// similarity blocks sym(S) = (S + S^T)/2, with D_c the diagonal of
// sym(S_c)'s row sums. Each block is symmetric PSD with zero row sums.
struct LaplacianBundle {
  std::vector<Eigen::MatrixXd> blocks;
};

LaplacianBundle build_laplacian(const SimilarityBlocks& s,
                                const LabeledDataset& ds);

// Assembles the N x N block-diagonal Laplacian in class-sorted sample
// order (classes ascending, class_index order within each class).
Eigen::MatrixXd global_laplacian(const LaplacianBundle& l,
                                 const LabeledDataset& ds);

// The joint objective and its two parts, evaluated at (s, w, r) on ds:
//   embed   = sum_c sum_jk s_cjk ||W^T x_cj - W^T x_ck||^2
//   penalty = sum_c sum_jk gamma_cj s_cjk^2
// Throws ShapeMismatch on inconsistent shapes.
struct ObjectiveValue {
  double total = 0;
  double embed = 0;
  double penalty = 0;
};
ObjectiveValue objective(const SimilarityBlocks& s, const Eigen::MatrixXd& w,
                         const RegularizationMatrix& r,
                         const LabeledDataset& ds);

// Projection update: the d smallest generalized eigenvectors of
// (X L X^T) w = lambda S_t w with L the block-diagonal Laplacian of s and
// S_t the ridged total scatter of ds. Result satisfies W^T S_t W = I.
Eigen::MatrixXd w_step(const LabeledDataset& ds, const SimilarityBlocks& s,
                       int d, double ridge);

struct FitResult {
  ProjectionModel model;
  SimilarityBlocks similarities;
  RegularizationMatrix regularization;
  TrainTrace trace;
};

// Which (class, sample) to snapshot per iteration in the returned trace.
struct WatchSpec {
  int class_id = 0;
  int sample_id = 0;
};

// Alternating training: uniform similarity start, then per iteration a
// projection update, a regularizer update, and a similarity update, with
// the objective recorded after each full pass. Stops when the relative
// objective change falls below cfg.rel_tol or after cfg.max_iters.
// When cfg.d_pca is set the data is PCA-reduced first and the returned
// model composes both stages.
FitResult fit(const LabeledDataset& ds, const TrainConfig& cfg,
              std::optional<WatchSpec> watch = std::nullopt);

// Embeds query columns: composed^T (x - mean) for each column of x.
// Throws ShapeMismatch when x's row count differs from the model's input
// dimension.
Eigen::MatrixXd transform(const ProjectionModel& model,
                          const Eigen::MatrixXd& x);

}  // namespace slnp
