#pragma once

#include <Eigen/Dense>
#include <vector>

namespace slnp {

// A labeled sample collection. Samples are columns: features is D x N with
// feature dimension D and sample count N. Labels are dense class ids in
// [0, num_classes). class_index partitions 0..N-1 by class, each list in
// ascending sample order.
struct LabeledDataset {
  Eigen::MatrixXd features;
  std::vector<int> labels;
  int num_classes = 0;
  std::vector<std::vector<int>> class_index;

  int dim() const { return static_cast<int>(features.rows()); }
  int size() const { return static_cast<int>(features.cols()); }
  int class_size(int c) const { return static_cast<int>(class_index[c].size()); }
  int min_class_size() const;

  // Columns of one class in class_index order, as a D x N_c matrix.
  Eigen::MatrixXd class_features(int c) const;
};

// Assembles a dataset and rebuilds class_index from the labels. When
// num_classes < 0 it is inferred as the number of distinct labels, so
// non-dense label sets fail validation rather than silently widening the
// class range. allow_empty permits classes with no samples (used for
// held-out splits where a class was fully consumed by training).
LabeledDataset make_dataset(Eigen::MatrixXd features, std::vector<int> labels,
                            int num_classes = -1, bool allow_empty = false);

// Checks every dataset invariant and throws on the first violation:
// LabelOutOfRange, EmptyClass, NonFiniteFeature (all with the offending
// index in the message), or PartitionMismatch. Returns its argument so
// loaders can validate-and-return; validation is idempotent.
const LabeledDataset& validate_dataset(const LabeledDataset& ds);

// Rebuilds class_index from labels (ascending within each class).
std::vector<std::vector<int>> build_class_index(const std::vector<int>& labels,
                                                int num_classes);

}  // namespace slnp
