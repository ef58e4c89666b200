#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slnp/dataset.hpp"

namespace slnp {

// Per-class within-class similarity blocks. blocks[c] is N_c x N_c; row j
// holds sample j's similarity row over its class, nonnegative and summing
// to 1. Rows are generally asymmetric (neighborship is directed).
struct SimilarityBlocks {
  std::vector<Eigen::MatrixXd> blocks;
};

// Per-sample adaptive regularization weights, one vector per class,
// aligned with class_index order. All entries >= 0.
struct RegularizationMatrix {
  std::vector<Eigen::VectorXd> gammas;
};

// Uniform rows 1/N_c (self included), the fixed starting point of training.
SimilarityBlocks uniform_similarity(const LabeledDataset& ds);

// Throws ShapeMismatch or a value error when blocks are inconsistent with
// ds or violate row-stochastic nonnegativity within tol.
void validate_similarity(const SimilarityBlocks& s, const LabeledDataset& ds,
                         double tol = 1e-8);

enum class Method { slnp, pca, lda, lpp, lfda };

std::string method_name(Method m);
Method parse_method(const std::string& name);  // throws UsageError

struct TrainConfig {
  int k = 5;                  // neighbor count, >= 2
  int d = 2;                  // embedded dimension, >= 1
  std::optional<int> d_pca;   // pre-reduction dimension, d <= d_pca <= D
  int max_iters = 30;
  double rel_tol = 1e-6;      // relative objective-change stop threshold
  double ridge = 1e-8;        // scatter regularizer, scaled by trace/dim at use
  bool include_self = true;   // sample counts as its own neighbor candidate
  std::uint64_t seed = 0;     // split seed recorded alongside results
};

// Throws on the first violated constraint: d >= 1 and d <= d_pca <= D
// (DimensionTooLarge), k >= 2 and k <= min_c N_c - (include_self ? 0 : 1)
// (KTooLarge), max_iters >= 1 (NoIterations), rel_tol/ridge >= 0.
void validate_config(const TrainConfig& cfg, const LabeledDataset& ds);

// A fitted linear embedding. w_pca (D x D_pca) is present when the method
// ran on PCA-reduced inputs; w_slnp is the method's own projection in that
// reduced space (or in the raw space when w_pca is absent); composed is the
// end-to-end D x d map. mean is subtracted before projecting (zero when no
// centering stage was fitted).
struct ProjectionModel {
  Method method = Method::slnp;
  std::optional<Eigen::MatrixXd> w_pca;
  Eigen::VectorXd mean;
  Eigen::MatrixXd w_slnp;
  Eigen::MatrixXd composed;
  TrainConfig config;
};

struct TraceRecord {
  int iter = 0;           // 1-based full-iteration counter
  double objective = 0;   // embed_term + penalty_term
  double embed_term = 0;
  double penalty_term = 0;
  double gamma_mean = 0;
  double gamma_min = 0;
  double gamma_max = 0;
  double seconds = 0;     // wall time of this iteration
};

// Optional per-iteration similarity watch for one (class, sample):
// snapshots[p] is the sample's similarity row after iteration p
// (snapshots[0] is the uniform initialization), and heat_row holds the
// fixed heat-kernel similarities of the same sample in the original
// feature space for ordering comparisons against the learned rows.
struct WatchTrace {
  int class_id = 0;
  int sample_id = 0;
  std::vector<Eigen::VectorXd> snapshots;
  Eigen::VectorXd heat_row;
};

struct TrainTrace {
  std::vector<TraceRecord> records;
  std::optional<WatchTrace> watch;
  bool converged = false;  // stopped on rel_tol rather than max_iters
};

// CSV with header iter,objective,embed_term,penalty_term,gamma_mean,
// gamma_min,gamma_max,seconds; one row per recorded iteration. The JSON
// form carries the same records plus any watch payload.
std::string trace_to_csv(const TrainTrace& trace);
std::string trace_to_json(const TrainTrace& trace);

// Deterministic double formatting shared by every CSV/JSON writer.
std::string format_double(double v);

}  // namespace slnp
