#include "slnp/types.hpp"

#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "slnp/errors.hpp"

namespace slnp {

SimilarityBlocks uniform_similarity(const LabeledDataset& ds) {
  SimilarityBlocks s;
  s.blocks.reserve(ds.num_classes);
  for (int c = 0; c < ds.num_classes; ++c) {
    const int nc = ds.class_size(c);
    s.blocks.push_back(Eigen::MatrixXd::Constant(nc, nc, 1.0 / nc));
  }
  return s;
}

void validate_similarity(const SimilarityBlocks& s, const LabeledDataset& ds,
                         double tol) {
  if (static_cast<int>(s.blocks.size()) != ds.num_classes)
    throw ShapeMismatch("similarity has " + std::to_string(s.blocks.size()) +
                        " blocks for " + std::to_string(ds.num_classes) +
                        " classes");
  for (int c = 0; c < ds.num_classes; ++c) {
    const auto& b = s.blocks[c];
    const int nc = ds.class_size(c);
    if (b.rows() != nc || b.cols() != nc)
      throw ShapeMismatch("similarity block " + std::to_string(c) + " is " +
                          std::to_string(b.rows()) + "x" + std::to_string(b.cols()) +
                          ", class has " + std::to_string(nc) + " samples");
    for (int j = 0; j < nc; ++j) {
      double sum = 0;
      for (int k = 0; k < nc; ++k) {
        if (b(j, k) < -tol)
          throw ShapeMismatch("negative similarity at class " + std::to_string(c) +
                              ", row " + std::to_string(j));
        sum += b(j, k);
      }
      if (std::abs(sum - 1.0) > tol)
        throw ShapeMismatch("similarity row sum " + format_double(sum) +
                            " at class " + std::to_string(c) + ", row " +
                            std::to_string(j));
    }
  }
}

std::string method_name(Method m) {
  switch (m) {
    case Method::slnp: return "slnp";
    case Method::pca: return "pca";
    case Method::lda: return "lda";
    case Method::lpp: return "lpp";
    case Method::lfda: return "lfda";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "slnp") return Method::slnp;
  if (name == "pca") return Method::pca;
  if (name == "lda") return Method::lda;
  if (name == "lpp") return Method::lpp;
  if (name == "lfda") return Method::lfda;
  throw UsageError("unknown method '" + name +
                   "' (expected slnp, pca, lda, lpp, or lfda)");
}

void validate_config(const TrainConfig& cfg, const LabeledDataset& ds) {
  if (cfg.d < 1)
    throw DimensionTooLarge("embedded dimension must be >= 1, got " +
                            std::to_string(cfg.d));
  const int dim = ds.dim();
  if (cfg.d_pca) {
    if (*cfg.d_pca < 1 || *cfg.d_pca > dim)
      throw DimensionTooLarge("d_pca " + std::to_string(*cfg.d_pca) +
                              " outside [1, " + std::to_string(dim) + "]");
    if (cfg.d > *cfg.d_pca)
      throw DimensionTooLarge("d " + std::to_string(cfg.d) + " exceeds d_pca " +
                              std::to_string(*cfg.d_pca));
  } else if (cfg.d > dim) {
    throw DimensionTooLarge("d " + std::to_string(cfg.d) +
                            " exceeds feature dimension " + std::to_string(dim));
  }
  if (cfg.k < 2) throw KTooLarge("k must be >= 2, got " + std::to_string(cfg.k));
  const int candidates = ds.min_class_size() - (cfg.include_self ? 0 : 1);
  if (cfg.k > candidates)
    throw KTooLarge("k " + std::to_string(cfg.k) + " exceeds the " +
                    std::to_string(candidates) +
                    " neighbor candidates of the smallest class");
  if (cfg.max_iters < 1)
    throw NoIterations("max_iters must be >= 1, got " +
                       std::to_string(cfg.max_iters));
  if (!(cfg.rel_tol >= 0))
    throw DataError("rel_tol must be >= 0");
  if (!(cfg.ridge >= 0))
    throw DataError("ridge must be >= 0");
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string trace_to_csv(const TrainTrace& trace) {
  std::ostringstream out;
  out << "iter,objective,embed_term,penalty_term,gamma_mean,gamma_min,"
         "gamma_max,seconds\n";
  for (const auto& r : trace.records) {
    out << r.iter << ',' << format_double(r.objective) << ','
        << format_double(r.embed_term) << ',' << format_double(r.penalty_term)
        << ',' << format_double(r.gamma_mean) << ',' << format_double(r.gamma_min)
        << ',' << format_double(r.gamma_max) << ',' << format_double(r.seconds)
        << '\n';
  }
  return out.str();
}

std::string trace_to_json(const TrainTrace& trace) {
  nlohmann::json j;
  j["converged"] = trace.converged;
  j["records"] = nlohmann::json::array();
  for (const auto& r : trace.records) {
    j["records"].push_back({{"iter", r.iter},
                            {"objective", r.objective},
                            {"embed_term", r.embed_term},
                            {"penalty_term", r.penalty_term},
                            {"gamma_mean", r.gamma_mean},
                            {"gamma_min", r.gamma_min},
                            {"gamma_max", r.gamma_max},
                            {"seconds", r.seconds}});
  }
  if (trace.watch) {
    nlohmann::json w;
    w["class_id"] = trace.watch->class_id;
    w["sample_id"] = trace.watch->sample_id;
    w["snapshots"] = nlohmann::json::array();
    for (const auto& snap : trace.watch->snapshots)
      w["snapshots"].push_back(std::vector<double>(snap.data(), snap.data() + snap.size()));
    w["heat_row"] = std::vector<double>(trace.watch->heat_row.data(),
                                        trace.watch->heat_row.data() +
                                            trace.watch->heat_row.size());
    j["watch"] = w;
  }
  return j.dump(2) + "\n";
}

}  // namespace slnp
