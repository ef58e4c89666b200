#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slnp/types.hpp"

namespace slnp {

enum class OutputFormat { csv, json, both };

// Fully resolved command-line request: one subcommand plus the settings it
// consumes. Defaults mirror the flag defaults; a JSON config file supplies
// values for flags not given on the command line.
struct CliConfig {
  std::string command;            // train | compare | sweep | trace | toy
  std::string dataset;            // kind:spec, see parse_dataset_spec
  std::vector<std::string> methods = {"slnp"};
  TrainConfig train;              // k, d, d_pca, max_iters, rel_tol, include_self
  int n_per_class = 10;
  int seed_count = 5;
  std::uint64_t seed_base = 0;
  std::string out_dir = "out";
  OutputFormat format = OutputFormat::csv;
  // sweep
  std::string axis = "k";
  std::vector<int> values;
  // trace
  int watch_class = 0;
  int watch_sample = 0;
  // toy
  double noise_scale = 1.0;

  std::vector<std::uint64_t> seeds() const;
};

// Loads a dataset from its CLI spec. Kinds:
//   toy[:n_per_class[,noise_scale[,seed]]]
//   csv:path[:label_column]
//   idx:dir_or_stem[:pool<f>]   (expects train-images-idx3-ubyte and
//                                train-labels-idx1-ubyte under a directory)
//   pgm:manifest[:WxH]
// Relative paths are also tried under $SLNP_DATA_DIR.
LabeledDataset parse_dataset_spec(const std::string& spec);

// Writes the per-iteration similarity snapshots of trace.watch as a long
// CSV (iter,neighbor_index,similarity) at out_path, plus the fixed
// heat-kernel row of the watched sample as a companion file at out_path
// with "_heat" inserted before the extension. Throws NoWatchedSample when
// the trace has no watch payload.
void emit_similarity_evolution(const TrainTrace& trace,
                               const std::string& out_path);

// Atomic text write: temp file in the destination directory, then rename.
void write_file_atomic(const std::string& path, const std::string& content);

// Entry point behind the slnp executable. Returns the process exit code:
// 0 success, 1 usage error, 2 data error, 3 numerical failure.
int run_cli(int argc, const char* const* argv);

}  // namespace slnp
