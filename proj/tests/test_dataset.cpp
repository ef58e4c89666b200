#include <doctest.h>

#include <Eigen/Dense>
#include <limits>

#include "slnp/dataset.hpp"
#include "slnp/errors.hpp"
#include "slnp/types.hpp"

using namespace slnp;

namespace {

LabeledDataset small_two_class() {
  Eigen::MatrixXd f(2, 4);
  f << 0, 1, 4, 5,
       0, 1, 4, 5;
  return make_dataset(f, {0, 0, 1, 1});
}

}  // namespace

TEST_CASE("dataset construction partitions samples by class") {
  const LabeledDataset ds = small_two_class();
  CHECK(ds.dim() == 2);
  CHECK(ds.size() == 4);
  CHECK(ds.num_classes == 2);
  REQUIRE(ds.class_index.size() == 2);
  CHECK(ds.class_index[0] == std::vector<int>{0, 1});
  CHECK(ds.class_index[1] == std::vector<int>{2, 3});
  CHECK(ds.min_class_size() == 2);
  CHECK(ds.class_features(1)(0, 0) == 4);
}

TEST_CASE("validation accepts a well-formed dataset and is idempotent") {
  const LabeledDataset ds = small_two_class();
  const LabeledDataset& once = validate_dataset(ds);
  const LabeledDataset& twice = validate_dataset(once);
  CHECK(&twice == &ds);
  CHECK(twice.labels == ds.labels);
}

TEST_CASE("labels outside the inferred class range are rejected") {
  Eigen::MatrixXd f(1, 2);
  f << 0, 1;
  // Two distinct labels infer two classes, so the value 2 is out of range.
  CHECK_THROWS_AS(make_dataset(f, {0, 2}), LabelOutOfRange);
}

TEST_CASE("an explicitly empty class is rejected") {
  Eigen::MatrixXd f(1, 2);
  f << 0, 1;
  CHECK_THROWS_AS(make_dataset(f, {0, 0}, 2), EmptyClass);
  CHECK_NOTHROW(make_dataset(f, {0, 0}, 2, /*allow_empty=*/true));
}

TEST_CASE("non-finite features are rejected with their location") {
  LabeledDataset ds = small_two_class();
  ds.features(1, 2) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_WITH_AS(validate_dataset(ds),
                       "non-finite feature at row 1, sample 2",
                       NonFiniteFeature);
  ds.features(1, 2) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(validate_dataset(ds), NonFiniteFeature);
}

TEST_CASE("label list shorter than the sample count is rejected") {
  LabeledDataset ds = small_two_class();
  ds.labels.pop_back();
  CHECK_THROWS_AS(validate_dataset(ds), PartitionMismatch);
}

TEST_CASE("a corrupted class partition is rejected") {
  LabeledDataset ds = small_two_class();
  ds.class_index[0] = {0, 2};  // sample 2 belongs to class 1
  CHECK_THROWS_AS(validate_dataset(ds), PartitionMismatch);

  ds = small_two_class();
  ds.class_index[1] = {2};  // sample 3 uncovered
  CHECK_THROWS_AS(validate_dataset(ds), PartitionMismatch);
}

TEST_CASE("uniform similarity rows are 1/N_c everywhere including self") {
  const LabeledDataset ds = small_two_class();
  const SimilarityBlocks s = uniform_similarity(ds);
  REQUIRE(s.blocks.size() == 2);
  for (const auto& block : s.blocks) {
    CHECK(block.rows() == 2);
    for (int j = 0; j < block.rows(); ++j)
      for (int k = 0; k < block.cols(); ++k)
        CHECK(block(j, k) == doctest::Approx(0.5).epsilon(1e-15));
  }
  CHECK_NOTHROW(validate_similarity(s, ds));
}

TEST_CASE("similarity validation rejects bad shapes and bad rows") {
  const LabeledDataset ds = small_two_class();
  SimilarityBlocks s = uniform_similarity(ds);
  s.blocks[0](0, 0) = 0.9;  // row sum now 1.4
  CHECK_THROWS_AS(validate_similarity(s, ds), ShapeMismatch);

  s = uniform_similarity(ds);
  s.blocks.pop_back();
  CHECK_THROWS_AS(validate_similarity(s, ds), ShapeMismatch);

  s = uniform_similarity(ds);
  s.blocks[1](1, 0) = -0.2;
  s.blocks[1](1, 1) = 1.2;
  CHECK_THROWS_AS(validate_similarity(s, ds), ShapeMismatch);
}

TEST_CASE("train config validation enforces every bound") {
  const LabeledDataset ds = small_two_class();
  TrainConfig cfg;
  cfg.k = 2;
  cfg.d = 1;
  CHECK_NOTHROW(validate_config(cfg, ds));

  TrainConfig bad = cfg;
  bad.d = 0;
  CHECK_THROWS_AS(validate_config(bad, ds), DimensionTooLarge);

  bad = cfg;
  bad.d = 3;  // exceeds the 2 features
  CHECK_THROWS_AS(validate_config(bad, ds), DimensionTooLarge);

  bad = cfg;
  bad.d_pca = 1;
  bad.d = 2;  // d > d_pca
  CHECK_THROWS_AS(validate_config(bad, ds), DimensionTooLarge);

  bad = cfg;
  bad.k = 1;
  CHECK_THROWS_AS(validate_config(bad, ds), KTooLarge);

  bad = cfg;
  bad.k = 3;  // smallest class has only 2 candidates with self included
  CHECK_THROWS_AS(validate_config(bad, ds), KTooLarge);

  bad = cfg;
  bad.include_self = false;  // candidates drop to 1
  CHECK_THROWS_AS(validate_config(bad, ds), KTooLarge);

  bad = cfg;
  bad.max_iters = 0;
  CHECK_THROWS_AS(validate_config(bad, ds), NoIterations);
}

TEST_CASE("method names round-trip and bad names are usage errors") {
  for (Method m : {Method::slnp, Method::pca, Method::lda, Method::lpp,
                   Method::lfda})
    CHECK(parse_method(method_name(m)) == m);
  CHECK_THROWS_AS(parse_method("mfa"), UsageError);
}
