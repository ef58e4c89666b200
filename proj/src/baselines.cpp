#include "slnp/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "slnp/eigensolve.hpp"
#include "slnp/errors.hpp"
#include "slnp/similarity.hpp"

namespace slnp {

namespace {

double median_off_diagonal(const Eigen::MatrixXd& dists) {
  std::vector<double> vals;
  vals.reserve(dists.rows() * (dists.rows() - 1) / 2);
  for (int i = 0; i < dists.rows(); ++i)
    for (int j = i + 1; j < dists.cols(); ++j) vals.push_back(dists(i, j));
  if (vals.empty()) return 1.0;
  const std::size_t mid = vals.size() / 2;
  std::nth_element(vals.begin(), vals.begin() + mid, vals.end());
  double m = vals[mid];
  if (vals.size() % 2 == 0) {
    const double lower = *std::max_element(vals.begin(), vals.begin() + mid);
    m = 0.5 * (m + lower);
  }
  return m > 0 ? m : 1.0;
}

void mutual_knn_sparsify(Eigen::MatrixXd& s, const Eigen::MatrixXd& dists,
                         int knn_k) {
  const int n = static_cast<int>(s.rows());
  const int k = std::min(knn_k, n - 1);
  // near(i, j) marks j among i's k nearest (ties by ascending index).
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> near(n, n);
  near.setConstant(false);
  std::vector<int> order;
  order.reserve(n);
  for (int i = 0; i < n; ++i) {
    order.clear();
    for (int j = 0; j < n; ++j)
      if (j != i) order.push_back(j);
    std::partial_sort(order.begin(), order.begin() + k, order.end(),
                      [&](int a, int b) {
                        if (dists(i, a) != dists(i, b))
                          return dists(i, a) < dists(i, b);
                        return a < b;
                      });
    for (int j = 0; j < k; ++j) near(i, order[j]) = true;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && !(near(i, j) && near(j, i))) s(i, j) = 0;
}

}  // namespace

Eigen::MatrixXd heat_affinities(const Eigen::MatrixXd& x,
                                const AffinityParams& params, double* t_used) {
  if (params.heat_t && !(*params.heat_t > 0))
    throw DataError("heat bandwidth must be > 0");
  const Eigen::MatrixXd dists = pairwise_sq_dists(x);
  const double t = params.heat_t ? *params.heat_t : median_off_diagonal(dists);
  if (t_used) *t_used = t;
  Eigen::MatrixXd s = (-dists / t).array().exp();
  if (params.mode == AffinityMode::knn) mutual_knn_sparsify(s, dists, params.knn_k);
  return s;
}

Eigen::MatrixXd lda_within_scatter(const LabeledDataset& ds) {
  Eigen::MatrixXd sw = Eigen::MatrixXd::Zero(ds.dim(), ds.dim());
  for (int c = 0; c < ds.num_classes; ++c) {
    const Eigen::MatrixXd xc = ds.class_features(c);
    const Eigen::VectorXd mean_c = xc.rowwise().mean();
    const Eigen::MatrixXd centered = xc.colwise() - mean_c;
    sw += centered * centered.transpose();
  }
  return 0.5 * (sw + sw.transpose());
}

Eigen::MatrixXd lda_between_scatter(const LabeledDataset& ds) {
  const Eigen::VectorXd mean = ds.features.rowwise().mean();
  Eigen::MatrixXd sb = Eigen::MatrixXd::Zero(ds.dim(), ds.dim());
  for (int c = 0; c < ds.num_classes; ++c) {
    const Eigen::VectorXd diff =
        ds.class_features(c).rowwise().mean() - mean;
    sb += ds.class_size(c) * diff * diff.transpose();
  }
  return 0.5 * (sb + sb.transpose());
}

namespace {

// Shared top-d Fisher-style solve: largest eigenpairs of
// between w = lambda (within + ridge) w, columns rescaled to unit length.
Eigen::MatrixXd fisher_directions(const Eigen::MatrixXd& between,
                                  Eigen::MatrixXd within, int d, double ridge) {
  add_ridge(within, ridge);
  Eigen::MatrixXd w = generalized_eig_largest(between, within, d).vectors;
  for (int j = 0; j < w.cols(); ++j) {
    const double norm = w.col(j).norm();
    if (norm > 0) w.col(j) /= norm;
  }
  return w;
}

ProjectionModel make_model(Method method, Eigen::MatrixXd w, int d) {
  ProjectionModel model;
  model.method = method;
  model.mean = Eigen::VectorXd::Zero(w.rows());
  model.w_slnp = std::move(w);
  model.composed = model.w_slnp;
  model.config.d = d;
  return model;
}

}  // namespace

ProjectionModel lda_fit(const LabeledDataset& ds, int d, double ridge) {
  validate_dataset(ds);
  if (d < 1 || d > ds.dim())
    throw DimensionTooLarge("d " + std::to_string(d) + " outside [1, " +
                            std::to_string(ds.dim()) + "]");
  return make_model(
      Method::lda,
      fisher_directions(lda_between_scatter(ds), lda_within_scatter(ds), d, ridge),
      d);
}

ProjectionModel lpp_fit(const LabeledDataset& ds, int d,
                        const AffinityParams& params, double ridge) {
  validate_dataset(ds);
  if (d < 1 || d > ds.dim())
    throw DimensionTooLarge("d " + std::to_string(d) + " outside [1, " +
                            std::to_string(ds.dim()) + "]");
  const Eigen::MatrixXd s = heat_affinities(ds.features, params);
  const Eigen::VectorXd degree = s.rowwise().sum();
  Eigen::MatrixXd lap = -s;
  lap.diagonal() += degree;
  lap = 0.5 * (lap + lap.transpose());

  const Eigen::MatrixXd& x = ds.features;
  Eigen::MatrixXd a = x * lap * x.transpose();
  a = 0.5 * (a + a.transpose());
  Eigen::MatrixXd b = x * degree.asDiagonal() * x.transpose();
  b = 0.5 * (b + b.transpose());
  add_ridge(b, ridge);

  return make_model(Method::lpp, generalized_eig_smallest(a, b, d).vectors, d);
}

Eigen::MatrixXd lfda_within_scatter(const LabeledDataset& ds,
                                    const Eigen::MatrixXd& affinity) {
  // Pairwise weights: s_ij / N_c on same-class pairs, 0 otherwise. Summed
  // via the weighted Laplacian identity
  //   1/2 sum_ij w_ij (x_i - x_j)(x_i - x_j)^T = X (diag(W 1) - W) X^T.
  const int n = ds.size();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (ds.labels[i] == ds.labels[j])
        w(i, j) = affinity(i, j) / ds.class_size(ds.labels[i]);
  Eigen::MatrixXd lap = -w;
  lap.diagonal() += w.rowwise().sum();
  Eigen::MatrixXd sw = ds.features * lap * ds.features.transpose();
  return 0.5 * (sw + sw.transpose());
}

Eigen::MatrixXd lfda_between_scatter(const LabeledDataset& ds,
                                     const Eigen::MatrixXd& affinity) {
  const int n = ds.size();
  Eigen::MatrixXd w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      w(i, j) = ds.labels[i] == ds.labels[j]
                    ? affinity(i, j) *
                          (1.0 / n - 1.0 / ds.class_size(ds.labels[i]))
                    : 1.0 / n;
  Eigen::MatrixXd lap = -w;
  lap.diagonal() += w.rowwise().sum();
  Eigen::MatrixXd sb = ds.features * lap * ds.features.transpose();
  return 0.5 * (sb + sb.transpose());
}

ProjectionModel lfda_fit(const LabeledDataset& ds, int d,
                         const AffinityParams& params, double ridge) {
  validate_dataset(ds);
  if (d < 1 || d > ds.dim())
    throw DimensionTooLarge("d " + std::to_string(d) + " outside [1, " +
                            std::to_string(ds.dim()) + "]");
  const Eigen::MatrixXd affinity = heat_affinities(ds.features, params);
  return make_model(Method::lfda,
                    fisher_directions(lfda_between_scatter(ds, affinity),
                                      lfda_within_scatter(ds, affinity), d, ridge),
                    d);
}

}  // namespace slnp
