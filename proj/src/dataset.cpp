#include "slnp/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "slnp/errors.hpp"

namespace slnp {

int LabeledDataset::min_class_size() const {
  int m = size();
  for (const auto& idx : class_index) m = std::min(m, static_cast<int>(idx.size()));
  return m;
}

Eigen::MatrixXd LabeledDataset::class_features(int c) const {
  const auto& idx = class_index[c];
  Eigen::MatrixXd out(features.rows(), idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(j) = features.col(idx[j]);
  return out;
}

std::vector<std::vector<int>> build_class_index(const std::vector<int>& labels,
                                                int num_classes) {
  std::vector<std::vector<int>> index(num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int c = labels[i];
    if (c >= 0 && c < num_classes) index[c].push_back(static_cast<int>(i));
  }
  return index;
}

LabeledDataset make_dataset(Eigen::MatrixXd features, std::vector<int> labels,
                            int num_classes, bool allow_empty) {
  if (static_cast<std::size_t>(features.cols()) != labels.size())
    throw PartitionMismatch("label count " + std::to_string(labels.size()) +
                            " does not match sample count " +
                            std::to_string(features.cols()));
  if (num_classes < 0) {
    std::set<int> distinct(labels.begin(), labels.end());
    num_classes = static_cast<int>(distinct.size());
  }

  LabeledDataset ds;
  ds.features = std::move(features);
  ds.labels = std::move(labels);
  ds.num_classes = num_classes;
  ds.class_index = build_class_index(ds.labels, num_classes);

  for (std::size_t i = 0; i < ds.labels.size(); ++i)
    if (ds.labels[i] < 0 || ds.labels[i] >= num_classes)
      throw LabelOutOfRange("label " + std::to_string(ds.labels[i]) +
                            " at sample " + std::to_string(i) +
                            " outside [0, " + std::to_string(num_classes) + ")");
  if (!allow_empty)
    for (int c = 0; c < num_classes; ++c)
      if (ds.class_index[c].empty())
        throw EmptyClass("class " + std::to_string(c) + " has no samples");
  return ds;
}

const LabeledDataset& validate_dataset(const LabeledDataset& ds) {
  const int n = ds.size();
  if (static_cast<int>(ds.labels.size()) != n)
    throw PartitionMismatch("label count " + std::to_string(ds.labels.size()) +
                            " does not match sample count " + std::to_string(n));
  for (int i = 0; i < n; ++i)
    if (ds.labels[i] < 0 || ds.labels[i] >= ds.num_classes)
      throw LabelOutOfRange("label " + std::to_string(ds.labels[i]) +
                            " at sample " + std::to_string(i) + " outside [0, " +
                            std::to_string(ds.num_classes) + ")");

  if (static_cast<int>(ds.class_index.size()) != ds.num_classes)
    throw PartitionMismatch("class_index has " +
                            std::to_string(ds.class_index.size()) +
                            " lists for " + std::to_string(ds.num_classes) +
                            " classes");
  int covered = 0;
  for (int c = 0; c < ds.num_classes; ++c) {
    const auto& idx = ds.class_index[c];
    if (idx.empty()) throw EmptyClass("class " + std::to_string(c) + " has no samples");
    for (int i : idx) {
      if (i < 0 || i >= n || ds.labels[i] != c)
        throw PartitionMismatch("class_index entry " + std::to_string(i) +
                                " inconsistent with labels for class " +
                                std::to_string(c));
    }
    covered += static_cast<int>(idx.size());
  }
  if (covered != n)
    throw PartitionMismatch("class_index covers " + std::to_string(covered) +
                            " of " + std::to_string(n) + " samples");

  for (int j = 0; j < n; ++j)
    for (int i = 0; i < ds.dim(); ++i)
      if (!std::isfinite(ds.features(i, j)))
        throw NonFiniteFeature("non-finite feature at row " + std::to_string(i) +
                               ", sample " + std::to_string(j));
  return ds;
}

}  // namespace slnp
