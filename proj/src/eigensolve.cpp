#include "slnp/eigensolve.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "slnp/errors.hpp"

namespace slnp {

namespace {

// Flip each column so its largest-magnitude component is positive (first
// such component when magnitudes tie), making eigenvector signs
// reproducible across runs and scalings.
void fix_signs(Eigen::MatrixXd& vectors) {
  for (int j = 0; j < vectors.cols(); ++j) {
    int pivot = 0;
    double best = -1;
    for (int i = 0; i < vectors.rows(); ++i) {
      const double mag = std::abs(vectors(i, j));
      if (mag > best) {
        best = mag;
        pivot = i;
      }
    }
    if (vectors(pivot, j) < 0) vectors.col(j) = -vectors.col(j);
  }
}

}  // namespace

double add_ridge(Eigen::MatrixXd& b, double ridge) {
  if (ridge == 0) return 0;
  const double tr = b.trace();
  const double scale = tr > 0 ? tr / b.rows() : 1.0;
  const double amount = ridge * scale;
  b.diagonal().array() += amount;
  return amount;
}

ScatterMatrix total_scatter(const LabeledDataset& ds, double ridge) {
  const int n = ds.size();
  if (n < 2)
    throw SingleSample("total scatter needs at least 2 samples, got " +
                       std::to_string(n));
  const Eigen::VectorXd mean = ds.features.rowwise().mean();
  const Eigen::MatrixXd centered = ds.features.colwise() - mean;
  ScatterMatrix s;
  s.matrix = centered * centered.transpose();
  s.matrix = 0.5 * (s.matrix + s.matrix.transpose());
  s.ridge_applied = add_ridge(s.matrix, ridge);
  return s;
}

EigenResult sym_eig(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols())
    throw ShapeMismatch("matrix is " + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()));
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw NotSymmetric("matrix is not symmetric within tolerance");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      0.5 * (a + a.transpose()));
  if (solver.info() != Eigen::Success)
    throw NoConvergence("symmetric eigendecomposition failed");

  EigenResult r;
  r.values = solver.eigenvalues();
  r.vectors = solver.eigenvectors();
  r.normalization = EigNormalization::unit;
  fix_signs(r.vectors);
  return r;
}

EigenResult generalized_eig_smallest(const Eigen::MatrixXd& a,
                                     const Eigen::MatrixXd& b, int d) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n || b.rows() != n || b.cols() != n)
    throw ShapeMismatch("pencil matrices must be square and equally sized");
  if (d < 1 || d > n)
    throw DimensionTooLarge("requested " + std::to_string(d) +
                            " eigenpairs from a " + std::to_string(n) +
                            "-dimensional pencil");

  Eigen::LLT<Eigen::MatrixXd> llt(b);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("constraint matrix has no Cholesky factor");
  const Eigen::MatrixXd l = llt.matrixL();

  // C = L^-1 A L^-T via two triangular solves, symmetrized against rounding.
  const Eigen::MatrixXd t = l.triangularView<Eigen::Lower>().solve(a);
  Eigen::MatrixXd c =
      l.triangularView<Eigen::Lower>().solve(t.transpose()).transpose();
  c = 0.5 * (c + c.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c);
  if (solver.info() != Eigen::Success)
    throw NoConvergence("reduced eigendecomposition failed");

  EigenResult r;
  r.values = solver.eigenvalues().head(d);
  r.vectors = l.transpose()
                  .triangularView<Eigen::Upper>()
                  .solve(solver.eigenvectors().leftCols(d));
  r.normalization = EigNormalization::b_orthonormal;
  fix_signs(r.vectors);
  return r;
}

EigenResult generalized_eig_largest(const Eigen::MatrixXd& a,
                                    const Eigen::MatrixXd& b, int d) {
  EigenResult r = generalized_eig_smallest(-a, b, d);
  r.values = -r.values;
  return r;
}

ProjectionModel pca_fit(const LabeledDataset& ds, int d_out) {
  const int dim = ds.dim();
  if (d_out < 1 || d_out > dim)
    throw DimensionTooLarge("d_pca " + std::to_string(d_out) + " outside [1, " +
                            std::to_string(dim) + "]");
  const Eigen::VectorXd mean = ds.features.rowwise().mean();
  const Eigen::MatrixXd centered = ds.features.colwise() - mean;
  Eigen::MatrixXd cov = centered * centered.transpose() / ds.size();
  cov = 0.5 * (cov + cov.transpose());

  const EigenResult eig = sym_eig(cov);
  Eigen::MatrixXd w(dim, d_out);
  for (int j = 0; j < d_out; ++j) w.col(j) = eig.vectors.col(dim - 1 - j);

  ProjectionModel model;
  model.method = Method::pca;
  model.mean = mean;
  model.w_slnp = w;
  model.composed = std::move(w);
  model.config.d = d_out;
  return model;
}

std::pair<LabeledDataset, ProjectionModel> pca_reduce(const LabeledDataset& ds,
                                                      int d_out) {
  ProjectionModel model = pca_fit(ds, d_out);
  LabeledDataset reduced;
  reduced.features =
      model.composed.transpose() * (ds.features.colwise() - model.mean);
  reduced.labels = ds.labels;
  reduced.num_classes = ds.num_classes;
  reduced.class_index = ds.class_index;
  return {std::move(reduced), std::move(model)};
}

}  // namespace slnp
