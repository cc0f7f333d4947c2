#include "msh/dataset_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace msh {
namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& field, int line_no) {
  if (field.empty()) throw ParseError("empty numeric field", line_no);
  char* end = nullptr;
  const double value = std::strtod(field.c_str(), &end);
  if (end != field.c_str() + field.size())
    throw ParseError("invalid number '" + field + "'", line_no);
  return value;
}

int parse_label(const std::string& field, int line_no) {
  if (field.empty()) throw ParseError("empty label field", line_no);
  char* end = nullptr;
  const long value = std::strtol(field.c_str(), &end, 10);
  if (end != field.c_str() + field.size())
    throw ParseError("invalid label '" + field + "'", line_no);
  if (value < 0) throw ParseError("labels must be nonnegative", line_no);
  return static_cast<int>(value);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

const std::vector<std::vector<std::string>>& known_headers() {
  static const std::vector<std::vector<std::string>> headers = {
      {"x", "y"}, {"x", "y", "z"}, {"x1", "y1", "x2", "y2"}};
  return headers;
}

}  // namespace

LabeledDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");

  std::string line;
  int line_no = 0;
  // Header line selects the dimensionality and whether labels are present.
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  ++line_no;
  auto header = split_csv(line);
  for (auto& h : header) h = lower(h);
  bool labeled = !header.empty() && header.back() == "label";
  if (labeled) header.pop_back();
  int dim = -1;
  for (const auto& candidate : known_headers())
    if (header == candidate) dim = static_cast<int>(candidate.size());
  if (dim < 0)
    throw ParseError("unrecognized header (expected x,y | x,y,z | x1,y1,x2,y2 with optional label)",
                     1);

  std::vector<double> values;
  std::vector<int> labels;
  Eigen::Index rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    const size_t expected = static_cast<size_t>(dim) + (labeled ? 1 : 0);
    if (fields.size() != expected)
      throw ParseError("expected " + std::to_string(expected) + " fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    for (int a = 0; a < dim; ++a)
      values.push_back(parse_number(fields[static_cast<size_t>(a)], line_no));
    if (labeled) labels.push_back(parse_label(fields.back(), line_no));
    ++rows;
  }

  LabeledDataset ds;
  ds.points.resize(rows, dim);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (int a = 0; a < dim; ++a)
      ds.points(i, a) = values[static_cast<size_t>(i) * static_cast<size_t>(dim) +
                               static_cast<size_t>(a)];
  ds.gt_labels = std::move(labels);
  ds.provenance = "file:" + path;
  return ds;
}

void save_dataset(const std::string& path, const LabeledDataset& dataset) {
  const Eigen::Index dim = dataset.points.cols();
  if (dim != 2 && dim != 3 && dim != 4)
    throw Error("save_dataset: only 2, 3 or 4 columns are supported");
  if (dataset.has_labels() &&
      static_cast<Eigen::Index>(dataset.gt_labels.size()) != dataset.points.rows())
    throw Error("save_dataset: label count does not match point count");

  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  const char* header = dim == 2 ? "x,y" : dim == 3 ? "x,y,z" : "x1,y1,x2,y2";
  out << header;
  if (dataset.has_labels()) out << ",label";
  out << "\n";
  char buf[32];
  for (Eigen::Index i = 0; i < dataset.points.rows(); ++i) {
    for (Eigen::Index a = 0; a < dim; ++a) {
      std::snprintf(buf, sizeof(buf), "%.17g", dataset.points(i, a));
      if (a > 0) out << ',';
      out << buf;
    }
    if (dataset.has_labels()) out << ',' << dataset.gt_labels[static_cast<size_t>(i)];
    out << "\n";
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::vector<int> load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  if (lower(trim(line)) == "label") {
    std::vector<int> labels;
    int line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      labels.push_back(parse_label(trim(line), line_no));
    }
    return labels;
  }
  in.close();
  const LabeledDataset ds = load_dataset(path);
  if (!ds.has_labels())
    throw Error("'" + path + "' carries no label column");
  return ds.gt_labels;
}

void save_labels(const std::string& path, const std::vector<int>& labels) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "label\n";
  for (int l : labels) out << l << "\n";
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace msh
