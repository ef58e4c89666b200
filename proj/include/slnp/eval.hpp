#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "slnp/slnp.hpp"
#include "slnp/types.hpp"

namespace slnp {

// Nearest-neighbor labels for each query column under squared Euclidean
// distance in the embedded space; distance ties resolve to the lowest
// training index. Throws EmptyTrainSet or ShapeMismatch.
std::vector<int> knn_classify(const Eigen::MatrixXd& train_embedded,
                              const std::vector<int>& train_labels,
                              const Eigen::MatrixXd& query_embedded);

// Percentage of agreeing entries, in [0, 100]. Throws LengthMismatch or
// Empty.
double recognition_rate(const std::vector<int>& predicted,
                        const std::vector<int>& truth);

// Mean adaptive regularizer of one class. Throws UnknownClass.
double average_gamma(const RegularizationMatrix& r, int class_id);

// Aggregated multi-seed experiment result. per_class_rate pools correct
// counts across seeds; classes that never appear in a test split get NaN.
struct ExperimentReport {
  std::string method;
  int n_per_class = 0;
  int k = 0;
  int d_pca = 0;  // 0 when no pre-reduction
  int d = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> per_seed_rate;
  double mean_rate = 0;
  double std_rate = 0;  // population standard deviation
  std::vector<double> per_class_rate;
  double seconds = 0;
  std::string trace_ref;  // path of an emitted trace, when any
};

// One seeded protocol run per seed: balanced subsample, fit the method on
// the train split (PCA pre-reduction per cfg.d_pca for every method except
// pca itself; lda's embedded dimension additionally capped at C-1), embed
// both splits, 1-NN classify the held-out samples, aggregate rates.
ExperimentReport run_experiment(const LabeledDataset& ds, Method method,
                                const TrainConfig& cfg, int n_per_class,
                                const std::vector<std::uint64_t>& seeds);

// Fits one method on a training split per the experiment protocol.
ProjectionModel fit_method(const LabeledDataset& train, Method method,
                           const TrainConfig& cfg);

enum class SweepAxis { k, d, n_per_class };

SweepAxis parse_sweep_axis(const std::string& name);  // throws UsageError

// run_experiment once per value of the swept parameter, all other settings
// and the seed list held fixed (so splits are identical across k/d
// values). Throws Empty when values is empty.
std::vector<ExperimentReport> sweep(const LabeledDataset& ds, Method method,
                                    const TrainConfig& cfg, int n_per_class,
                                    SweepAxis axis,
                                    const std::vector<int>& values,
                                    const std::vector<std::uint64_t>& seeds);

// CSV rows: method,n_per_class,k,d_pca,d,seed_count,mean_rate,std_rate,
// seconds. JSON carries per-seed and per-class rates as well.
std::string reports_to_csv(const std::vector<ExperimentReport>& reports);
std::string reports_to_json(const std::vector<ExperimentReport>& reports);

}  // namespace slnp
