#include "slnp/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>

#include "slnp/errors.hpp"
#include "slnp/rng.hpp"
#include "slnp/types.hpp"

namespace slnp {

namespace {

std::string read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFound("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::uint32_t read_u32_be(const std::string& data, std::size_t offset,
                          const std::string& path) {
  if (offset + 4 > data.size())
    throw TruncatedFile(path + " ends inside a header field");
  const auto* p = reinterpret_cast<const unsigned char*>(data.data() + offset);
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
         (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

// Dense remap of arbitrary label values, ascending original order.
template <typename T>
std::vector<int> remap_labels(const std::vector<T>& raw, int* num_classes) {
  std::map<T, int> ids;
  for (const T& v : raw) ids.emplace(v, 0);
  int next = 0;
  for (auto& [value, id] : ids) id = next++;
  std::vector<int> labels;
  labels.reserve(raw.size());
  for (const T& v : raw) labels.push_back(ids.at(v));
  *num_classes = next;
  return labels;
}

}  // namespace

LabeledDataset load_idx(const std::string& images_path,
                        const std::string& labels_path, ImageShape* shape) {
  const std::string img = read_binary(images_path);
  if (read_u32_be(img, 0, images_path) != 0x00000803u)
    throw BadMagic(images_path + " is not an IDX image file");
  const std::uint32_t count = read_u32_be(img, 4, images_path);
  const std::uint32_t rows = read_u32_be(img, 8, images_path);
  const std::uint32_t cols = read_u32_be(img, 12, images_path);
  const std::size_t pixels = std::size_t(rows) * cols;
  if (img.size() < 16 + std::size_t(count) * pixels)
    throw TruncatedFile(images_path + " holds fewer than " +
                        std::to_string(count) + " images");

  const std::string lab = read_binary(labels_path);
  if (read_u32_be(lab, 0, labels_path) != 0x00000801u)
    throw BadMagic(labels_path + " is not an IDX label file");
  const std::uint32_t label_count = read_u32_be(lab, 4, labels_path);
  if (label_count != count)
    throw CountMismatch(std::to_string(count) + " images vs " +
                        std::to_string(label_count) + " labels");
  if (lab.size() < 8 + std::size_t(count))
    throw TruncatedFile(labels_path + " holds fewer than " +
                        std::to_string(count) + " labels");

  Eigen::MatrixXd features(pixels, count);
  const auto* px = reinterpret_cast<const unsigned char*>(img.data() + 16);
  for (std::uint32_t j = 0; j < count; ++j)
    for (std::size_t i = 0; i < pixels; ++i)
      features(i, j) = px[std::size_t(j) * pixels + i] / 255.0;

  std::vector<unsigned char> raw(lab.begin() + 8, lab.begin() + 8 + count);
  int num_classes = 0;
  std::vector<int> labels = remap_labels(raw, &num_classes);

  if (shape) *shape = {static_cast<int>(rows), static_cast<int>(cols)};
  LabeledDataset ds = make_dataset(std::move(features), std::move(labels),
                                   num_classes);
  validate_dataset(ds);
  return ds;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (ch != '\r') {
      cell += ch;
    }
  }
  cells.push_back(cell);
  return cells;
}

double parse_cell(const std::string& cell, int line_no, const std::string& name) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t')) --end;
  double value = 0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw NonNumericCell("non-numeric cell '" + cell + "' in column " + name +
                         " at line " + std::to_string(line_no));
  return value;
}

}  // namespace

LabeledDataset load_csv(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw FileNotFound("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw TruncatedFile(path + " has no header row");
  const std::vector<std::string> header = split_csv_line(line);
  int label_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == label_column) label_col = static_cast<int>(i);
  if (label_col < 0)
    throw MissingColumn("no column named '" + label_column + "' in " + path);

  const int dim = static_cast<int>(header.size()) - 1;
  std::vector<std::vector<double>> columns;
  std::vector<double> raw_labels;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw RaggedRow("line " + std::to_string(line_no) + " has " +
                      std::to_string(cells.size()) + " cells, header has " +
                      std::to_string(header.size()));
    std::vector<double> row;
    row.reserve(dim);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const double v = parse_cell(cells[i], line_no, header[i]);
      if (static_cast<int>(i) == label_col)
        raw_labels.push_back(v);
      else
        row.push_back(v);
    }
    columns.push_back(std::move(row));
  }

  Eigen::MatrixXd features(dim, columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j)
    for (int i = 0; i < dim; ++i) features(i, j) = columns[j][i];

  int num_classes = 0;
  std::vector<int> labels = remap_labels(raw_labels, &num_classes);
  LabeledDataset ds =
      make_dataset(std::move(features), std::move(labels), num_classes);
  validate_dataset(ds);
  return ds;
}

std::string dataset_to_csv(const LabeledDataset& ds) {
  std::ostringstream out;
  for (int i = 0; i < ds.dim(); ++i) out << 'f' << i << ',';
  out << "label\n";
  for (int j = 0; j < ds.size(); ++j) {
    for (int i = 0; i < ds.dim(); ++i)
      out << format_double(ds.features(i, j)) << ',';
    out << ds.labels[j] << '\n';
  }
  return out.str();
}

DatasetManifest parse_manifest(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw FileNotFound("cannot open " + manifest_path);
  DatasetManifest m;
  m.root = std::filesystem::path(manifest_path).parent_path().string();

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' ||
                             line.back() == '\t'))
      line.pop_back();
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw RaggedRow("line " + std::to_string(line_no) +
                      " has no tab separator");
    m.entries.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  return m;
}

namespace {

struct PgmImage {
  ImageShape shape;
  std::vector<double> pixels;  // row-major, scaled to [0, 1]
};

PgmImage load_pgm(const std::string& path) {
  const std::string data = read_binary(path);
  std::size_t pos = 0;
  auto next_token = [&]() -> std::string {
    for (;;) {
      while (pos < data.size() && std::isspace(static_cast<unsigned char>(data[pos])))
        ++pos;
      if (pos < data.size() && data[pos] == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    const std::size_t start = pos;
    while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos])))
      ++pos;
    if (start == pos) throw BadPgmHeader(path + " has a truncated header");
    return data.substr(start, pos - start);
  };

  if (next_token() != "P5") throw BadPgmHeader(path + " is not a binary PGM");
  int width = 0, height = 0, maxval = 0;
  try {
    width = std::stoi(next_token());
    height = std::stoi(next_token());
    maxval = std::stoi(next_token());
  } catch (const std::exception&) {
    throw BadPgmHeader(path + " has a malformed header field");
  }
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535)
    throw BadPgmHeader(path + " has out-of-range header values");
  ++pos;  // single whitespace byte after maxval

  const int bytes_per = maxval > 255 ? 2 : 1;
  const std::size_t need = std::size_t(width) * height * bytes_per;
  if (data.size() < pos + need)
    throw TruncatedFile(path + " is missing pixel data");

  PgmImage img;
  img.shape = {height, width};
  img.pixels.resize(std::size_t(width) * height);
  const auto* p = reinterpret_cast<const unsigned char*>(data.data() + pos);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    const unsigned v = bytes_per == 1
                           ? p[i]
                           : (unsigned(p[2 * i]) << 8) | unsigned(p[2 * i + 1]);
    img.pixels[i] = static_cast<double>(v) / maxval;
  }
  return img;
}

}  // namespace

std::vector<double> area_resize(const std::vector<double>& pixels,
                                ImageShape from, ImageShape to) {
  if (pixels.size() != std::size_t(from.rows) * from.cols)
    throw ShapeMismatch("pixel count does not match the source shape");
  if (to.rows < 1 || to.cols < 1)
    throw ShapeMismatch("target shape must be positive");

  std::vector<double> out(std::size_t(to.rows) * to.cols, 0.0);
  const double ry = static_cast<double>(from.rows) / to.rows;
  const double rx = static_cast<double>(from.cols) / to.cols;
  for (int oy = 0; oy < to.rows; ++oy) {
    const double y0 = oy * ry, y1 = (oy + 1) * ry;
    for (int ox = 0; ox < to.cols; ++ox) {
      const double x0 = ox * rx, x1 = (ox + 1) * rx;
      double acc = 0;
      for (int sy = static_cast<int>(y0); sy < from.rows && sy < y1; ++sy) {
        const double hy = std::min<double>(sy + 1, y1) - std::max<double>(sy, y0);
        for (int sx = static_cast<int>(x0); sx < from.cols && sx < x1; ++sx) {
          const double hx = std::min<double>(sx + 1, x1) - std::max<double>(sx, x0);
          acc += hy * hx * pixels[std::size_t(sy) * from.cols + sx];
        }
      }
      out[std::size_t(oy) * to.cols + ox] = acc / (ry * rx);
    }
  }
  return out;
}

LabeledDataset load_pgm_manifest(const DatasetManifest& manifest,
                                 std::optional<ImageShape> resize_to) {
  if (manifest.entries.empty()) throw Empty("manifest lists no images");

  std::vector<std::vector<double>> images;
  std::vector<std::string> raw_labels;
  std::optional<ImageShape> common;
  for (const auto& entry : manifest.entries) {
    std::filesystem::path p(entry.path);
    if (p.is_relative() && !manifest.root.empty())
      p = std::filesystem::path(manifest.root) / p;
    PgmImage img = load_pgm(p.string());
    if (resize_to) {
      img.pixels = area_resize(img.pixels, img.shape, *resize_to);
      img.shape = *resize_to;
    }
    if (!common) {
      common = img.shape;
    } else if (common->rows != img.shape.rows || common->cols != img.shape.cols) {
      throw GeometryMismatch(entry.path + " is " + std::to_string(img.shape.rows) +
                             "x" + std::to_string(img.shape.cols) +
                             ", expected " + std::to_string(common->rows) + "x" +
                             std::to_string(common->cols));
    }
    images.push_back(std::move(img.pixels));
    raw_labels.push_back(entry.label);
  }

  Eigen::MatrixXd features(images[0].size(), images.size());
  for (std::size_t j = 0; j < images.size(); ++j)
    for (std::size_t i = 0; i < images[j].size(); ++i)
      features(i, j) = images[j][i];

  int num_classes = 0;
  std::vector<int> labels = remap_labels(raw_labels, &num_classes);
  LabeledDataset ds =
      make_dataset(std::move(features), std::move(labels), num_classes);
  validate_dataset(ds);
  return ds;
}

LabeledDataset pool_images(const LabeledDataset& ds, ImageShape shape,
                           int factor) {
  if (factor < 1) throw ShapeMismatch("pooling factor must be >= 1");
  if (shape.rows % factor != 0 || shape.cols % factor != 0)
    throw GeometryMismatch("factor " + std::to_string(factor) +
                           " does not divide " + std::to_string(shape.rows) +
                           "x" + std::to_string(shape.cols));
  if (ds.dim() != shape.rows * shape.cols)
    throw GeometryMismatch("feature dimension " + std::to_string(ds.dim()) +
                           " does not match " + std::to_string(shape.rows) +
                           "x" + std::to_string(shape.cols));
  const ImageShape to{shape.rows / factor, shape.cols / factor};

  Eigen::MatrixXd features(to.rows * to.cols, ds.size());
  std::vector<double> buf(ds.dim());
  for (int j = 0; j < ds.size(); ++j) {
    for (int i = 0; i < ds.dim(); ++i) buf[i] = ds.features(i, j);
    const std::vector<double> pooled = area_resize(buf, shape, to);
    for (std::size_t i = 0; i < pooled.size(); ++i) features(i, j) = pooled[i];
  }
  return make_dataset(std::move(features), ds.labels, ds.num_classes);
}

Split subsample_per_class(const LabeledDataset& ds, int n, std::uint64_t seed) {
  if (n < 1) throw NotEnoughSamples("per-class sample count must be >= 1");
  for (int c = 0; c < ds.num_classes; ++c)
    if (ds.class_size(c) < n)
      throw NotEnoughSamples("class " + std::to_string(c) + " has " +
                             std::to_string(ds.class_size(c)) +
                             " samples, need " + std::to_string(n));

  Rng rng(seed);
  std::vector<int> train_cols, test_cols;
  for (int c = 0; c < ds.num_classes; ++c) {
    std::vector<int> pool = ds.class_index[c];
    rng.shuffle(pool);
    std::vector<int> picked(pool.begin(), pool.begin() + n);
    std::vector<int> rest(pool.begin() + n, pool.end());
    std::sort(picked.begin(), picked.end());
    std::sort(rest.begin(), rest.end());
    train_cols.insert(train_cols.end(), picked.begin(), picked.end());
    test_cols.insert(test_cols.end(), rest.begin(), rest.end());
  }
  std::sort(train_cols.begin(), train_cols.end());
  std::sort(test_cols.begin(), test_cols.end());

  auto take = [&](const std::vector<int>& cols, bool allow_empty) {
    Eigen::MatrixXd f(ds.dim(), cols.size());
    std::vector<int> labels;
    labels.reserve(cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      f.col(j) = ds.features.col(cols[j]);
      labels.push_back(ds.labels[cols[j]]);
    }
    return make_dataset(std::move(f), std::move(labels), ds.num_classes,
                        allow_empty);
  };
  return {take(train_cols, false), take(test_cols, true)};
}

LabeledDataset synth_two_feature_toy(int n_per_class, double noise_scale,
                                     std::uint64_t seed) {
  if (n_per_class < 1) throw NotEnoughSamples("need at least 1 sample per class");
  if (!(noise_scale > 0)) throw DataError("noise_scale must be > 0");

  Rng rng(seed);
  const int n = 2 * n_per_class;
  Eigen::MatrixXd features(2, n);
  std::vector<int> labels(n);
  const double amp = 10.0 * noise_scale;
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < n_per_class; ++i) {
      const int j = c * n_per_class + i;
      features(0, j) = rng.uniform(-amp, amp);
      features(1, j) = 5.0 * c + rng.uniform01();
      labels[j] = c;
    }
  return make_dataset(std::move(features), std::move(labels), 2);
}

}  // namespace slnp
