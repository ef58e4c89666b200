#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "slnp/cli.hpp"
#include "slnp/data_io.hpp"
#include "slnp/errors.hpp"

using namespace slnp;
namespace fs = std::filesystem;

namespace {

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"slnp"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("slnp_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(static_cast<bool>(in));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Removes the final comma-separated field of every line (the wall-clock
// column, which legitimately differs between reruns).
std::string drop_last_field(const std::string& text) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t comma = line.rfind(',');
    out << (comma == std::string::npos ? line : line.substr(0, comma)) << '\n';
  }
  return out.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("dataset specs parse sizes, options, and failures") {
  CHECK(parse_dataset_spec("toy").size() == 200);
  const LabeledDataset custom = parse_dataset_spec("toy:12,2.0,5");
  CHECK(custom.size() == 24);
  CHECK(custom.num_classes == 2);

  CHECK_THROWS_AS(parse_dataset_spec("toy:bad"), UsageError);
  CHECK_THROWS_AS(parse_dataset_spec("csv"), UsageError);
  CHECK_THROWS_AS(parse_dataset_spec("idx"), UsageError);
  CHECK_THROWS_AS(parse_dataset_spec("idx:somewhere:wat"), UsageError);
  CHECK_THROWS_AS(parse_dataset_spec("pgm:somewhere:17"), UsageError);
  CHECK_THROWS_AS(parse_dataset_spec("grid:x"), UsageError);
  CHECK_THROWS_AS(parse_dataset_spec("idx:no_such_dir_anywhere"),
                  FileNotFound);
}

TEST_CASE("relative dataset paths fall back to the data directory") {
  const fs::path dir = fresh_dir("datadir");
  Eigen::MatrixXd f(1, 4);
  f << 0, 1, 10, 11;
  write_text(dir / "fallback_fixture.csv",
             dataset_to_csv(make_dataset(f, {0, 0, 1, 1})));

  setenv("SLNP_DATA_DIR", dir.c_str(), 1);
  const LabeledDataset ds = parse_dataset_spec("csv:fallback_fixture.csv");
  unsetenv("SLNP_DATA_DIR");
  CHECK(ds.size() == 4);
  CHECK(ds.num_classes == 2);
}

TEST_CASE("atomic writes create directories and leave no temp files") {
  const fs::path dir = fresh_dir("atomic");
  const fs::path target = dir / "nested" / "out.txt";
  write_file_atomic(target.string(), "first\n");
  CHECK(read_text(target) == "first\n");
  write_file_atomic(target.string(), "second\n");
  CHECK(read_text(target) == "second\n");
  int entries = 0;
  for (const auto& entry : fs::directory_iterator(target.parent_path())) {
    (void)entry;
    ++entries;
  }
  CHECK(entries == 1);
}

TEST_CASE("similarity snapshots emit a long table plus a heat companion") {
  TrainTrace trace;
  WatchTrace watch;
  watch.class_id = 0;
  watch.sample_id = 0;
  Eigen::VectorXd first(2), second(2);
  first << 0.5, 0.5;
  second << 0.8, 0.2;
  watch.snapshots = {first, second};
  watch.heat_row.resize(2);
  watch.heat_row << 1.0, 0.3;
  trace.watch = watch;

  const fs::path dir = fresh_dir("evolution");
  emit_similarity_evolution(trace, (dir / "evo.csv").string());
  CHECK(read_text(dir / "evo.csv") ==
        "iter,neighbor_index,similarity\n"
        "0,0,0.5\n"
        "0,1,0.5\n"
        "1,0,0.8\n"
        "1,1,0.2\n");
  CHECK(read_text(dir / "evo_heat.csv") ==
        "neighbor_index,similarity\n"
        "0,1\n"
        "1,0.3\n");

  TrainTrace unwatched;
  CHECK_THROWS_AS(
      emit_similarity_evolution(unwatched, (dir / "none.csv").string()),
      NoWatchedSample);
}

TEST_CASE("toy command writes a loadable dataset") {
  const fs::path dir = fresh_dir("toy");
  CHECK(run({"toy", "--out", dir.string(), "--n-per-class", "12", "--noise",
             "2.0"}) == 0);
  const LabeledDataset ds = load_csv((dir / "toy.csv").string());
  CHECK(ds.size() == 24);
  CHECK(ds.dim() == 2);
  CHECK(ds.num_classes == 2);
}

TEST_CASE("train command reports a perfect separable run with its trace") {
  const fs::path dir = fresh_dir("train");
  CHECK(run({"train", "--dataset", "toy:40,1.5,3", "--methods", "slnp", "--k",
             "5", "--d", "1", "--n-per-class", "10", "--out", dir.string()}) ==
        0);

  const std::vector<std::string> report = lines_of(read_text(dir / "report.csv"));
  REQUIRE(report.size() == 2);
  CHECK(report[0] ==
        "method,n_per_class,k,d_pca,d,seed_count,mean_rate,std_rate,seconds");
  CHECK(report[1].rfind("slnp,10,5,0,1,1,100,0,", 0) == 0);

  const std::vector<std::string> trace = lines_of(read_text(dir / "trace.csv"));
  REQUIRE(trace.size() >= 2);
  CHECK(trace[0] ==
        "iter,objective,embed_term,penalty_term,gamma_mean,gamma_min,"
        "gamma_max,seconds");
  CHECK(trace[1].rfind("1,", 0) == 0);
}

TEST_CASE("output format selects csv, json, or both") {
  const fs::path dir = fresh_dir("format");
  CHECK(run({"train", "--dataset", "toy:30,1,1", "--methods", "pca", "--d",
             "1", "--n-per-class", "8", "--out", dir.string(), "--format",
             "json"}) == 0);
  CHECK_FALSE(fs::exists(dir / "report.csv"));
  const nlohmann::json parsed =
      nlohmann::json::parse(read_text(dir / "report.json"));
  CHECK(parsed[0]["method"] == "pca");
  CHECK(parsed[0]["seeds"].size() == 1);

  const fs::path both_dir = fresh_dir("format_both");
  CHECK(run({"train", "--dataset", "toy:30,1,1", "--methods", "pca", "--d",
             "1", "--n-per-class", "8", "--out", both_dir.string(), "--format",
             "both"}) == 0);
  CHECK(fs::exists(both_dir / "report.csv"));
  CHECK(fs::exists(both_dir / "report.json"));
}

TEST_CASE("compare command writes one row per method") {
  const fs::path dir = fresh_dir("compare");
  CHECK(run({"compare", "--dataset", "toy:30,1,1", "--methods",
             "slnp,pca,lda", "--k", "3", "--d", "1", "--seeds", "2",
             "--n-per-class", "8", "--max-iters", "6", "--out",
             dir.string()}) == 0);
  const std::vector<std::string> rows = lines_of(read_text(dir / "compare.csv"));
  REQUIRE(rows.size() == 4);
  CHECK(rows[1].rfind("slnp,", 0) == 0);
  CHECK(rows[2].rfind("pca,", 0) == 0);
  CHECK(rows[3].rfind("lda,", 0) == 0);
  // Two seeds ran per method.
  CHECK(rows[1].find(",2,") != std::string::npos);
}

TEST_CASE("sweep command varies the requested axis") {
  const fs::path dir = fresh_dir("sweep");
  CHECK(run({"sweep", "--dataset", "toy:30,1,1", "--methods", "pca", "--d",
             "1", "--axis", "k", "--values", "2..4", "--seeds", "2",
             "--n-per-class", "8", "--out", dir.string()}) == 0);
  const std::vector<std::string> rows = lines_of(read_text(dir / "sweep.csv"));
  REQUIRE(rows.size() == 4);
  for (int i = 0; i < 3; ++i) {
    std::istringstream cells(rows[i + 1]);
    std::string method, n, k;
    std::getline(cells, method, ',');
    std::getline(cells, n, ',');
    std::getline(cells, k, ',');
    CHECK(method == "pca");
    CHECK(k == std::to_string(i + 2));
  }

  CHECK(run({"sweep", "--dataset", "toy:30,1,1", "--methods", "pca", "--out",
             dir.string()}) == 1);  // missing --values
}

TEST_CASE("trace command emits evolution files with a uniform start") {
  const fs::path dir = fresh_dir("trace");
  CHECK(run({"trace", "--dataset", "toy:30,1.5,4", "--methods", "slnp", "--k",
             "4", "--d", "1", "--n-per-class", "12", "--watch-class", "1",
             "--watch-sample", "2", "--max-iters", "6", "--out",
             dir.string()}) == 0);

  CHECK(fs::exists(dir / "trace.csv"));
  const std::vector<std::string> evo =
      lines_of(read_text(dir / "similarity_evolution.csv"));
  REQUIRE(evo.size() >= 1 + 2 * 12);
  CHECK(evo[0] == "iter,neighbor_index,similarity");
  // Iteration 0 is the uniform 1/12 row of the watched class.
  for (int j = 0; j < 12; ++j)
    CHECK(evo[1 + j] == "0," + std::to_string(j) + ",0.08333333333");

  const std::vector<std::string> heat =
      lines_of(read_text(dir / "similarity_evolution_heat.csv"));
  REQUIRE(heat.size() == 1 + 12);
  CHECK(heat[0] == "neighbor_index,similarity");
  CHECK(heat[3] == "2,1");  // the watched sample's self-affinity

  // Out-of-range watches map to the data exit code.
  CHECK(run({"trace", "--dataset", "toy:30,1.5,4", "--methods", "slnp", "--k",
             "4", "--d", "1", "--n-per-class", "12", "--watch-sample", "50",
             "--out", dir.string()}) == 2);
  // Tracing is specific to the learned-similarity method.
  CHECK(run({"trace", "--dataset", "toy:30,1.5,4", "--methods", "pca", "--d",
             "1", "--out", dir.string()}) == 1);
}

TEST_CASE("reruns are byte-identical apart from wall-clock columns") {
  const fs::path a = fresh_dir("repeat_a");
  const fs::path b = fresh_dir("repeat_b");
  const std::vector<std::string> base{
      "trace", "--dataset", "toy:30,1.5,4", "--methods", "slnp",
      "--k",   "4",         "--d",          "1",         "--n-per-class",
      "12",    "--max-iters", "6"};
  std::vector<std::string> first = base;
  first.insert(first.end(), {"--out", a.string()});
  std::vector<std::string> second = base;
  second.insert(second.end(), {"--out", b.string()});
  CHECK(run(first) == 0);
  CHECK(run(second) == 0);

  CHECK(read_text(a / "similarity_evolution.csv") ==
        read_text(b / "similarity_evolution.csv"));
  CHECK(read_text(a / "similarity_evolution_heat.csv") ==
        read_text(b / "similarity_evolution_heat.csv"));
  CHECK(drop_last_field(read_text(a / "trace.csv")) ==
        drop_last_field(read_text(b / "trace.csv")));
}

TEST_CASE("config files seed the defaults and flags override them") {
  const fs::path dir = fresh_dir("config");
  const fs::path cfg_path = dir / "run.json";
  write_text(cfg_path, R"({
    "dataset": "toy:30,1.0,2",
    "k": 3,
    "d": 1,
    "seeds": 2,
    "n_per_class": 8,
    "out": ")" + (dir / "from_config").string() + R"("
  })");

  CHECK(run({"compare", "--config", cfg_path.string(), "--methods", "pca"}) ==
        0);
  const std::vector<std::string> rows =
      lines_of(read_text(dir / "from_config" / "compare.csv"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].rfind("pca,8,3,0,1,2,", 0) == 0);

  // An explicit flag beats the same setting in the file.
  CHECK(run({"compare", "--config", cfg_path.string(), "--methods", "pca",
             "--k", "5", "--out", (dir / "flagged").string()}) == 0);
  const std::vector<std::string> flagged =
      lines_of(read_text(dir / "flagged" / "compare.csv"));
  CHECK(flagged[1].rfind("pca,8,5,0,1,2,", 0) == 0);

  CHECK(run({"compare", "--config", (dir / "absent.json").string(),
             "--methods", "pca"}) == 2);
  write_text(dir / "broken.json", "{not json");
  CHECK(run({"compare", "--config", (dir / "broken.json").string(),
             "--methods", "pca"}) == 1);
}

TEST_CASE("failures map to documented exit codes") {
  const fs::path dir = fresh_dir("exits");

  // Usage: unknown flag, unknown method, missing dataset.
  CHECK(run({"train", "--bogus"}) == 1);
  CHECK(run({"train", "--dataset", "toy", "--methods", "mfa"}) == 1);
  CHECK(run({"train"}) == 1);

  // Data: missing file, k too large for the split.
  CHECK(run({"train", "--dataset", "csv:" + (dir / "missing.csv").string()}) ==
        2);
  CHECK(run({"train", "--dataset", "toy:6,1,0", "--n-per-class", "3", "--k",
             "5", "--out", dir.string()}) == 2);

  // Numeric: a constant feature with the ridge disabled leaves a singular
  // scatter that has no Cholesky factor.
  std::ostringstream csv;
  csv << "f0,f1,label\n";
  for (int i = 0; i < 10; ++i) csv << i << ",0," << i % 2 << '\n';
  write_text(dir / "flat.csv", csv.str());
  write_text(dir / "noridge.json", R"({"ridge": 0.0})");
  CHECK(run({"train", "--dataset", "csv:" + (dir / "flat.csv").string(),
             "--config", (dir / "noridge.json").string(), "--methods", "slnp",
             "--k", "2", "--d", "1", "--n-per-class", "3", "--out",
             dir.string()}) == 3);
}
