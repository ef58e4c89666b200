#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slnp/dataset.hpp"

namespace slnp {

// Parsed image-list manifest: labeled paths resolved relative to root.
struct ManifestEntry {
  std::string path;
  std::string label;
};
struct DatasetManifest {
  std::string root;
  std::vector<ManifestEntry> entries;
};

// Image geometry reported by image-format loaders.
struct ImageShape {
  int rows = 0;
  int cols = 0;
};

// Loads an images/labels pair in the big-endian IDX format (magic
// 0x00000803 for byte images, 0x00000801 for byte labels). Pixels are
// scaled to [0, 1]; labels are remapped to dense 0..C-1 in ascending
// original order. Throws BadMagic, TruncatedFile, or CountMismatch. The
// image geometry is reported through shape when non-null.
LabeledDataset load_idx(const std::string& images_path,
                        const std::string& labels_path,
                        ImageShape* shape = nullptr);

// Loads a headered CSV, taking label_column (by name) as the class label
// and every other column, in file order, as features. Labels are remapped
// densely. Throws MissingColumn, RaggedRow (with the 1-based line number),
// or NonNumericCell.
LabeledDataset load_csv(const std::string& path,
                        const std::string& label_column = "label");

// Writes features + label as a headered CSV (columns f0..f{D-1},label).
std::string dataset_to_csv(const LabeledDataset& ds);

// Parses a manifest file of "path<TAB>label" lines ('#' starts a comment,
// blank lines ignored); paths are taken relative to the manifest's
// directory.
DatasetManifest parse_manifest(const std::string& manifest_path);

// Loads every entry as a binary (P5) PGM, scaling pixels to [0, 1] by the
// file's maxval. All images must share one geometry unless resize_to is
// given, in which case each image is area-average resampled to it. Labels
// are remapped densely in ascending order of their manifest strings.
// Throws BadPgmHeader, TruncatedFile, or GeometryMismatch.
LabeledDataset load_pgm_manifest(const DatasetManifest& manifest,
                                 std::optional<ImageShape> resize_to = {});

// Exact box-filter resampling of a single row-major image: every output
// pixel is the area-weighted mean of the source rectangle it covers.
std::vector<double> area_resize(const std::vector<double>& pixels,
                                ImageShape from, ImageShape to);

// Area-average pooling of every dataset column viewed as a shape-d image,
// by an integer factor dividing both dimensions. 28x28 inputs pooled by 2
// become 14x14.
LabeledDataset pool_images(const LabeledDataset& ds, ImageShape shape,
                           int factor);

// Seeded balanced split: exactly n samples per class into train, the rest
// into test, both preserving original sample order within each class.
// Throws NotEnoughSamples naming the first class with fewer than n. A
// class drawn in full leaves no test samples of that class.
struct Split {
  LabeledDataset train;
  LabeledDataset test;
};
Split subsample_per_class(const LabeledDataset& ds, int n, std::uint64_t seed);

// Two-class, two-feature synthetic set: feature 0 is shared uniform noise
// on [-10 s, 10 s] for s = noise_scale, feature 1 places class c on the
// unit interval starting at 5 c. The class gap (4) is four times the
// within-class spread, and at any s >= 1 feature 0 carries the larger
// total variance, so a one-dimensional PCA keeps the uninformative axis
// while feature 1 alone classifies perfectly.
LabeledDataset synth_two_feature_toy(int n_per_class, double noise_scale,
                                     std::uint64_t seed);

}  // namespace slnp
