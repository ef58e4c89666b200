#include "slnp/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "slnp/errors.hpp"

namespace slnp {

Eigen::MatrixXd pairwise_sq_dists(const Eigen::MatrixXd& y) {
  if (!y.allFinite()) throw NonFiniteInput("non-finite embedded coordinates");
  const int n = static_cast<int>(y.cols());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      const double v = (y.col(j) - y.col(k)).squaredNorm();
      d(j, k) = v;
      d(k, j) = v;
    }
  return d;
}

NeighborRow neighbor_row(const Eigen::VectorXd& dist_row, int self_index, int k,
                         bool include_self) {
  const int n = static_cast<int>(dist_row.size());
  for (int i = 0; i < n; ++i)
    if (!std::isfinite(dist_row[i]))
      throw NonFiniteInput("non-finite distance at index " + std::to_string(i));

  std::vector<int> order;
  order.reserve(n);
  for (int i = 0; i < n; ++i)
    if (include_self || i != self_index) order.push_back(i);
  if (k > static_cast<int>(order.size()))
    throw KTooLarge("k " + std::to_string(k) + " exceeds " +
                    std::to_string(order.size()) + " neighbor candidates");

  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (dist_row[a] != dist_row[b]) return dist_row[a] < dist_row[b];
    return a < b;
  });

  NeighborRow row;
  row.sorted_sq_dists.reserve(order.size());
  row.source_indices = std::move(order);
  for (int i : row.source_indices) row.sorted_sq_dists.push_back(dist_row[i]);
  if (include_self) {
    const auto it = std::find(row.source_indices.begin(),
                              row.source_indices.end(), self_index);
    row.self_position = static_cast<int>(it - row.source_indices.begin());
  }
  return row;
}

namespace {

void require_k(const NeighborRow& row, int k) {
  if (k < 1 || k > row.count())
    throw KTooLarge("k " + std::to_string(k) + " outside the row's " +
                    std::to_string(row.count()) + " candidates");
}

}  // namespace

double gamma_star(const NeighborRow& row, int k) {
  require_k(row, k);
  double sum_sq = 0;
  for (int i = 0; i < k; ++i)
    sum_sq += row.sorted_sq_dists[i] * row.sorted_sq_dists[i];
  return 0.5 * (k - 1) * std::sqrt(sum_sq);
}

GammaBounds gamma_bounds(const NeighborRow& row, int k) {
  require_k(row, k);
  double head_sum = 0;
  for (int i = 0; i < k; ++i) head_sum += row.sorted_sq_dists[i];
  GammaBounds b;
  b.low = 0.5 * k * row.sorted_sq_dists[k - 1] - 0.5 * head_sum;
  b.high = k < row.count()
               ? 0.5 * k * row.sorted_sq_dists[k] - 0.5 * head_sum
               : std::numeric_limits<double>::infinity();
  return b;
}

double eta(const NeighborRow& row, int k, double gamma) {
  require_k(row, k);
  if (gamma == 0)
    throw GammaZero("eta undefined at gamma = 0; use the uniform fallback");
  double head_sum = 0;
  for (int i = 0; i < k; ++i) head_sum += row.sorted_sq_dists[i];
  return (head_sum / (2.0 * gamma) + 1.0) / k;
}

Eigen::VectorXd similarity_row_with_gamma(const NeighborRow& row, int k,
                                          int class_size, double gamma) {
  require_k(row, k);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(class_size);
  if (gamma == 0) {
    for (int i = 0; i < k; ++i) out[row.source_indices[i]] = 1.0 / k;
    return out;
  }
  const double offset = eta(row, k, gamma);
  double sum = 0;
  std::vector<double> vals(k);
  for (int i = 0; i < k; ++i) {
    vals[i] = std::max(0.0, -row.sorted_sq_dists[i] / (2.0 * gamma) + offset);
    sum += vals[i];
  }
  for (int i = 0; i < k; ++i) out[row.source_indices[i]] = vals[i] / sum;
  return out;
}

Eigen::VectorXd similarity_row(const NeighborRow& row, int k, int class_size) {
  return similarity_row_with_gamma(row, k, class_size, gamma_star(row, k));
}

Eigen::VectorXd simplex_project_oracle(const Eigen::VectorXd& q) {
  const int n = static_cast<int>(q.size());
  if (n == 0) throw Empty("cannot project an empty vector");
  if (!q.allFinite()) throw NonFiniteInput("non-finite projection input");

  // Project v = -q: sort descending, find the largest support whose
  // running threshold keeps its smallest kept entry positive.
  Eigen::VectorXd v = -q;
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double running = 0, theta = 0;
  int support = 0;
  for (int i = 0; i < n; ++i) {
    running += u[i];
    const double t = (1.0 - running) / (i + 1);
    if (u[i] + t > 0) {
      support = i + 1;
      theta = t;
    }
  }
  Eigen::VectorXd s(n);
  for (int i = 0; i < n; ++i) s[i] = std::max(0.0, v[i] + theta);

  // KKT: feasibility plus complementary slackness of the zero entries.
  const double kkt_tol = 1e-10;
  double sum = s.sum();
  if (std::abs(sum - 1.0) > kkt_tol)
    throw NumericError("simplex projection sum " + std::to_string(sum));
  for (int i = 0; i < n; ++i) {
    if (s[i] < 0) throw NumericError("negative simplex coordinate");
    if (s[i] == 0 && v[i] + theta > kkt_tol)
      throw NumericError("simplex projection dropped a positive coordinate");
  }
  (void)support;
  return s;
}

SStepResult s_step(const std::vector<Eigen::MatrixXd>& y_by_class, int k,
                   bool include_self) {
  SStepResult result;
  result.similarities.blocks.reserve(y_by_class.size());
  result.regularization.gammas.reserve(y_by_class.size());
  for (std::size_t c = 0; c < y_by_class.size(); ++c) {
    const int nc = static_cast<int>(y_by_class[c].cols());
    Eigen::MatrixXd dists;
    try {
      dists = pairwise_sq_dists(y_by_class[c]);
    } catch (const NonFiniteInput&) {
      throw NonFiniteInput("non-finite embedding for class " + std::to_string(c));
    }
    Eigen::MatrixXd block(nc, nc);
    Eigen::VectorXd gammas(nc);
    for (int j = 0; j < nc; ++j) {
      NeighborRow row;
      try {
        row = neighbor_row(dists.row(j), j, k, include_self);
      } catch (const KTooLarge& e) {
        throw KTooLarge(std::string(e.what()) + " (class " + std::to_string(c) +
                        ", sample " + std::to_string(j) + ")");
      }
      gammas[j] = gamma_star(row, k);
      block.row(j) = similarity_row_with_gamma(row, k, nc, gammas[j]).transpose();
    }
    result.similarities.blocks.push_back(std::move(block));
    result.regularization.gammas.push_back(std::move(gammas));
  }
  return result;
}

}  // namespace slnp
