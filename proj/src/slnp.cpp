#include "slnp/slnp.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "slnp/baselines.hpp"
#include "slnp/eigensolve.hpp"
#include "slnp/errors.hpp"

namespace slnp {

LaplacianBundle build_laplacian(const SimilarityBlocks& s,
                                const LabeledDataset& ds) {
  validate_similarity(s, ds);
  LaplacianBundle l;
  l.blocks.reserve(s.blocks.size());
  for (const auto& block : s.blocks) {
    const Eigen::MatrixXd sym = 0.5 * (block + block.transpose());
    Eigen::MatrixXd lap = -sym;
    lap.diagonal() += sym.rowwise().sum();
    l.blocks.push_back(std::move(lap));
  }
  return l;
}

Eigen::MatrixXd global_laplacian(const LaplacianBundle& l,
                                 const LabeledDataset& ds) {
  const int n = ds.size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  int offset = 0;
  for (int c = 0; c < ds.num_classes; ++c) {
    const int nc = ds.class_size(c);
    out.block(offset, offset, nc, nc) = l.blocks[c];
    offset += nc;
  }
  return out;
}

ObjectiveValue objective(const SimilarityBlocks& s, const Eigen::MatrixXd& w,
                         const RegularizationMatrix& r,
                         const LabeledDataset& ds) {
  if (w.rows() != ds.dim())
    throw ShapeMismatch("projection has " + std::to_string(w.rows()) +
                        " rows for dimension " + std::to_string(ds.dim()));
  if (static_cast<int>(s.blocks.size()) != ds.num_classes ||
      static_cast<int>(r.gammas.size()) != ds.num_classes)
    throw ShapeMismatch("similarity/regularization class count mismatch");

  ObjectiveValue v;
  for (int c = 0; c < ds.num_classes; ++c) {
    const int nc = ds.class_size(c);
    if (s.blocks[c].rows() != nc || s.blocks[c].cols() != nc ||
        r.gammas[c].size() != nc)
      throw ShapeMismatch("block shapes inconsistent with class " +
                          std::to_string(c));
    const Eigen::MatrixXd y = w.transpose() * ds.class_features(c);
    const Eigen::MatrixXd dists = pairwise_sq_dists(y);
    for (int j = 0; j < nc; ++j)
      for (int k = 0; k < nc; ++k) {
        const double sjk = s.blocks[c](j, k);
        v.embed += sjk * dists(j, k);
        v.penalty += r.gammas[c][j] * sjk * sjk;
      }
  }
  v.total = v.embed + v.penalty;
  return v;
}

Eigen::MatrixXd w_step(const LabeledDataset& ds, const SimilarityBlocks& s,
                       int d, double ridge) {
  const LaplacianBundle lap = build_laplacian(s, ds);
  const ScatterMatrix st = total_scatter(ds, ridge);

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(ds.dim(), ds.dim());
  for (int c = 0; c < ds.num_classes; ++c) {
    const Eigen::MatrixXd xc = ds.class_features(c);
    a += xc * lap.blocks[c] * xc.transpose();
  }
  a = 0.5 * (a + a.transpose());

  return generalized_eig_smallest(a, st.matrix, d).vectors;
}

namespace {

// Heat-kernel similarities of one sample against its class in the original
// feature space, kept alongside the learned rows for ordering comparisons.
Eigen::VectorXd watch_heat_row(const LabeledDataset& ds, int class_id,
                               int sample_id) {
  const Eigen::MatrixXd xc = ds.class_features(class_id);
  const Eigen::MatrixXd heat = heat_affinities(xc, AffinityParams{});
  return heat.row(sample_id);
}

}  // namespace

FitResult fit(const LabeledDataset& ds, const TrainConfig& cfg,
              std::optional<WatchSpec> watch) {
  validate_dataset(ds);
  validate_config(cfg, ds);
  if (watch) {
    if (watch->class_id < 0 || watch->class_id >= ds.num_classes)
      throw UnknownClass("watched class " + std::to_string(watch->class_id));
    if (watch->sample_id < 0 || watch->sample_id >= ds.class_size(watch->class_id))
      throw NoWatchedSample("watched sample " + std::to_string(watch->sample_id) +
                            " outside class of size " +
                            std::to_string(ds.class_size(watch->class_id)));
  }

  // Optional PCA stage; training then runs entirely in the reduced space.
  LabeledDataset reduced;
  std::optional<ProjectionModel> pca;
  if (cfg.d_pca) {
    auto [r, m] = pca_reduce(ds, *cfg.d_pca);
    reduced = std::move(r);
    pca = std::move(m);
  } else {
    reduced = ds;
  }

  FitResult result;
  result.similarities = uniform_similarity(reduced);
  if (watch) {
    WatchTrace wt;
    wt.class_id = watch->class_id;
    wt.sample_id = watch->sample_id;
    wt.snapshots.push_back(
        result.similarities.blocks[watch->class_id].row(watch->sample_id));
    wt.heat_row = watch_heat_row(ds, watch->class_id, watch->sample_id);
    result.trace.watch = std::move(wt);
  }

  Eigen::MatrixXd w;
  double prev_objective = std::numeric_limits<double>::quiet_NaN();
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    const auto started = std::chrono::steady_clock::now();

    w = w_step(reduced, result.similarities, cfg.d, cfg.ridge);

    std::vector<Eigen::MatrixXd> y_by_class;
    y_by_class.reserve(reduced.num_classes);
    for (int c = 0; c < reduced.num_classes; ++c)
      y_by_class.push_back(w.transpose() * reduced.class_features(c));

    SStepResult step = s_step(y_by_class, cfg.k, cfg.include_self);
    result.similarities = std::move(step.similarities);
    result.regularization = std::move(step.regularization);

    const ObjectiveValue obj =
        objective(result.similarities, w, result.regularization, reduced);
    if (!std::isfinite(obj.total))
      throw NoConvergence("objective became non-finite at iteration " +
                          std::to_string(iter));

    TraceRecord rec;
    rec.iter = iter;
    rec.objective = obj.total;
    rec.embed_term = obj.embed;
    rec.penalty_term = obj.penalty;
    double gsum = 0;
    int gcount = 0;
    rec.gamma_min = std::numeric_limits<double>::infinity();
    rec.gamma_max = -std::numeric_limits<double>::infinity();
    for (const auto& g : result.regularization.gammas) {
      for (int j = 0; j < g.size(); ++j) {
        gsum += g[j];
        rec.gamma_min = std::min(rec.gamma_min, g[j]);
        rec.gamma_max = std::max(rec.gamma_max, g[j]);
        ++gcount;
      }
    }
    rec.gamma_mean = gsum / gcount;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                started)
                      .count();
    result.trace.records.push_back(rec);
    if (result.trace.watch)
      result.trace.watch->snapshots.push_back(
          result.similarities.blocks[result.trace.watch->class_id].row(
              result.trace.watch->sample_id));

    if (iter > 1) {
      const double denom = std::max(std::abs(prev_objective),
                                    std::numeric_limits<double>::min());
      if (std::abs(obj.total - prev_objective) <= cfg.rel_tol * denom) {
        result.trace.converged = true;
        break;
      }
    }
    prev_objective = obj.total;
  }

  ProjectionModel model;
  model.method = Method::slnp;
  model.config = cfg;
  model.w_slnp = std::move(w);
  if (pca) {
    model.w_pca = pca->composed;
    model.mean = pca->mean;
    model.composed = *model.w_pca * model.w_slnp;
  } else {
    model.mean = Eigen::VectorXd::Zero(ds.dim());
    model.composed = model.w_slnp;
  }
  result.model = std::move(model);
  return result;
}

Eigen::MatrixXd transform(const ProjectionModel& model,
                          const Eigen::MatrixXd& x) {
  if (x.rows() != model.composed.rows())
    throw ShapeMismatch("query has " + std::to_string(x.rows()) +
                        " rows, model expects " +
                        std::to_string(model.composed.rows()));
  return model.composed.transpose() * (x.colwise() - model.mean);
}

}  // namespace slnp
