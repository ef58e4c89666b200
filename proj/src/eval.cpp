#include "slnp/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <sstream>
#include <string>

#include "slnp/baselines.hpp"
#include "slnp/data_io.hpp"
#include "slnp/eigensolve.hpp"
#include "slnp/errors.hpp"

namespace slnp {

std::vector<int> knn_classify(const Eigen::MatrixXd& train_embedded,
                              const std::vector<int>& train_labels,
                              const Eigen::MatrixXd& query_embedded) {
  const int n_train = static_cast<int>(train_embedded.cols());
  if (n_train == 0) throw EmptyTrainSet("no training samples");
  if (static_cast<int>(train_labels.size()) != n_train)
    throw LengthMismatch(std::to_string(train_labels.size()) + " labels for " +
                         std::to_string(n_train) + " training samples");
  if (query_embedded.rows() != train_embedded.rows())
    throw ShapeMismatch("query dimension " + std::to_string(query_embedded.rows()) +
                        " differs from training dimension " +
                        std::to_string(train_embedded.rows()));

  std::vector<int> predicted(query_embedded.cols());
  for (int q = 0; q < query_embedded.cols(); ++q) {
    int best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int t = 0; t < n_train; ++t) {
      const double dist =
          (train_embedded.col(t) - query_embedded.col(q)).squaredNorm();
      if (dist < best_dist) {
        best_dist = dist;
        best = t;
      }
    }
    predicted[q] = train_labels[best];
  }
  return predicted;
}

double recognition_rate(const std::vector<int>& predicted,
                        const std::vector<int>& truth) {
  if (predicted.size() != truth.size())
    throw LengthMismatch(std::to_string(predicted.size()) + " predictions for " +
                         std::to_string(truth.size()) + " truth labels");
  if (predicted.empty()) throw Empty("no predictions to score");
  int correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    if (predicted[i] == truth[i]) ++correct;
  return 100.0 * correct / predicted.size();
}

double average_gamma(const RegularizationMatrix& r, int class_id) {
  if (class_id < 0 || class_id >= static_cast<int>(r.gammas.size()))
    throw UnknownClass("class " + std::to_string(class_id) + " outside the " +
                       std::to_string(r.gammas.size()) + " stored classes");
  const auto& g = r.gammas[class_id];
  if (g.size() == 0) throw Empty("class has no regularization entries");
  return g.mean();
}

ProjectionModel fit_method(const LabeledDataset& train, Method method,
                           const TrainConfig& cfg) {
  if (method == Method::slnp) return fit(train, cfg).model;
  if (method == Method::pca) return pca_fit(train, cfg.d);

  // Baselines follow the same pre-reduction protocol as the main method;
  // their own projection is fitted in the reduced space and composed.
  LabeledDataset reduced;
  std::optional<ProjectionModel> pca;
  if (cfg.d_pca) {
    auto [r, m] = pca_reduce(train, *cfg.d_pca);
    reduced = std::move(r);
    pca = std::move(m);
  } else {
    reduced = train;
  }

  ProjectionModel model;
  switch (method) {
    case Method::lda: {
      // Discriminant directions beyond C-1 are null-space noise; cap there.
      const int d = std::min(cfg.d, train.num_classes - 1);
      model = lda_fit(reduced, std::max(1, d), cfg.ridge);
      break;
    }
    case Method::lpp:
      model = lpp_fit(reduced, cfg.d, AffinityParams{}, cfg.ridge);
      break;
    case Method::lfda:
      model = lfda_fit(reduced, cfg.d, AffinityParams{}, cfg.ridge);
      break;
    default:
      throw UsageError("unhandled method");
  }
  if (pca) {
    model.w_pca = pca->composed;
    model.mean = pca->mean;
    model.composed = *model.w_pca * model.w_slnp;
  }
  model.config = cfg;
  return model;
}

ExperimentReport run_experiment(const LabeledDataset& ds, Method method,
                                const TrainConfig& cfg, int n_per_class,
                                const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw Empty("experiment needs at least one seed");
  validate_dataset(ds);

  ExperimentReport report;
  report.method = method_name(method);
  report.n_per_class = n_per_class;
  report.k = cfg.k;
  report.d_pca = cfg.d_pca.value_or(0);
  report.d = cfg.d;
  report.seeds = seeds;

  std::vector<long> per_class_correct(ds.num_classes, 0);
  std::vector<long> per_class_total(ds.num_classes, 0);
  const auto started = std::chrono::steady_clock::now();
  for (const std::uint64_t seed : seeds) {
    Split split = subsample_per_class(ds, n_per_class, seed);
    TrainConfig run_cfg = cfg;
    run_cfg.seed = seed;
    const ProjectionModel model = fit_method(split.train, method, run_cfg);
    const Eigen::MatrixXd train_emb = transform(model, split.train.features);
    const Eigen::MatrixXd test_emb = transform(model, split.test.features);
    const std::vector<int> predicted =
        knn_classify(train_emb, split.train.labels, test_emb);
    report.per_seed_rate.push_back(recognition_rate(predicted, split.test.labels));
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      ++per_class_total[split.test.labels[i]];
      if (predicted[i] == split.test.labels[i])
        ++per_class_correct[split.test.labels[i]];
    }
  }
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();

  double sum = 0;
  for (double r : report.per_seed_rate) sum += r;
  report.mean_rate = sum / report.per_seed_rate.size();
  double sq = 0;
  for (double r : report.per_seed_rate) {
    const double dev = r - report.mean_rate;
    sq += dev * dev;
  }
  report.std_rate = std::sqrt(sq / report.per_seed_rate.size());

  report.per_class_rate.resize(ds.num_classes);
  for (int c = 0; c < ds.num_classes; ++c)
    report.per_class_rate[c] =
        per_class_total[c] > 0
            ? 100.0 * per_class_correct[c] / per_class_total[c]
            : std::numeric_limits<double>::quiet_NaN();
  return report;
}

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "k") return SweepAxis::k;
  if (name == "d") return SweepAxis::d;
  if (name == "n-per-class" || name == "n_per_class") return SweepAxis::n_per_class;
  throw UsageError("unknown sweep axis '" + name +
                   "' (expected k, d, or n-per-class)");
}

std::vector<ExperimentReport> sweep(const LabeledDataset& ds, Method method,
                                    const TrainConfig& cfg, int n_per_class,
                                    SweepAxis axis, const std::vector<int>& values,
                                    const std::vector<std::uint64_t>& seeds) {
  if (values.empty()) throw Empty("sweep needs at least one value");
  std::vector<ExperimentReport> reports;
  reports.reserve(values.size());
  for (int v : values) {
    TrainConfig c = cfg;
    int n = n_per_class;
    switch (axis) {
      case SweepAxis::k: c.k = v; break;
      case SweepAxis::d: c.d = v; break;
      case SweepAxis::n_per_class: n = v; break;
    }
    reports.push_back(run_experiment(ds, method, c, n, seeds));
  }
  return reports;
}

std::string reports_to_csv(const std::vector<ExperimentReport>& reports) {
  std::ostringstream out;
  out << "method,n_per_class,k,d_pca,d,seed_count,mean_rate,std_rate,seconds\n";
  for (const auto& r : reports) {
    out << r.method << ',' << r.n_per_class << ',' << r.k << ',' << r.d_pca
        << ',' << r.d << ',' << r.seeds.size() << ','
        << format_double(r.mean_rate) << ',' << format_double(r.std_rate) << ','
        << format_double(r.seconds) << '\n';
  }
  return out.str();
}

std::string reports_to_json(const std::vector<ExperimentReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json j;
    j["method"] = r.method;
    j["n_per_class"] = r.n_per_class;
    j["k"] = r.k;
    j["d_pca"] = r.d_pca;
    j["d"] = r.d;
    j["seeds"] = r.seeds;
    j["per_seed_rate"] = r.per_seed_rate;
    j["mean_rate"] = r.mean_rate;
    j["std_rate"] = r.std_rate;
    j["per_class_rate"] = nlohmann::json::array();
    for (double v : r.per_class_rate) {
      if (std::isnan(v))
        j["per_class_rate"].push_back(nullptr);
      else
        j["per_class_rate"].push_back(v);
    }
    j["seconds"] = r.seconds;
    if (!r.trace_ref.empty()) j["trace_ref"] = r.trace_ref;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

}  // namespace slnp
