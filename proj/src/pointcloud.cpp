#include "reachnav/pointcloud.hpp"

#include "reachnav/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace reachnav {
namespace {

const std::array<std::string_view, 16> kScalarTypes{"char",  "uchar",  "short",  "ushort", "int",     "uint",
                                                    "float", "double", "int8",   "uint8",  "int16",   "uint16",
                                                    "int32", "uint32", "float32", "float64"};

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}
  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    std::size_t end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    line = text_.substr(pos_, end - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = end + 1;
    ++number_;
    return true;
  }
  std::size_t number() const { return number_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t number_ = 0;
};

struct ElementDecl {
  std::string name;
  std::size_t count = 0;
  std::vector<std::string> properties;
};

double parse_number(std::string_view token, std::size_t line) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value))
    throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line) + ": bad number '" + std::string(token) + "'");
  return value;
}

std::string format_g9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

PlyDocument parse_ply(std::string_view text) {
  LineReader reader(text);
  std::string_view line;
  if (!reader.next(line) || split_ws(line) != std::vector<std::string_view>{"ply"})
    throw Error(ErrorCode::MissingHeader, "first line must be 'ply'");

  std::vector<ElementDecl> elements;
  bool have_format = false;
  bool have_end = false;
  while (reader.next(line)) {
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "format") {
      if (tok.size() != 3) throw Error(ErrorCode::MissingHeader, "malformed format line");
      if (tok[1] != "ascii") throw Error(ErrorCode::UnsupportedFormat, "only ASCII PLY is supported, got " + std::string(tok[1]));
      if (tok[2] != "1.0") throw Error(ErrorCode::UnsupportedFormat, "unsupported PLY version " + std::string(tok[2]));
      have_format = true;
    } else if (tok[0] == "element") {
      if (tok.size() != 3) throw Error(ErrorCode::MissingHeader, "malformed element line");
      ElementDecl e;
      e.name = std::string(tok[1]);
      std::size_t count = 0;
      const auto [ptr, ec] = std::from_chars(tok[2].data(), tok[2].data() + tok[2].size(), count);
      if (ec != std::errc() || ptr != tok[2].data() + tok[2].size())
        throw Error(ErrorCode::MissingHeader, "bad element count '" + std::string(tok[2]) + "'");
      e.count = count;
      elements.push_back(std::move(e));
    } else if (tok[0] == "property") {
      if (elements.empty()) throw Error(ErrorCode::MissingHeader, "property before any element");
      if (tok.size() >= 2 && tok[1] == "list") {
        if (elements.back().name == "vertex") throw Error(ErrorCode::UnsupportedFormat, "list property in vertex element");
        elements.back().properties.emplace_back("list");
        continue;
      }
      if (tok.size() != 3 || std::find(kScalarTypes.begin(), kScalarTypes.end(), tok[1]) == kScalarTypes.end())
        throw Error(ErrorCode::MissingHeader, "malformed property line: " + std::string(line));
      elements.back().properties.emplace_back(tok[2]);
    } else if (tok[0] == "end_header") {
      have_end = true;
      break;
    } else {
      throw Error(ErrorCode::MissingHeader, "unexpected header line: " + std::string(line));
    }
  }
  if (!have_end) throw Error(ErrorCode::MissingHeader, "no end_header");
  if (!have_format) throw Error(ErrorCode::MissingHeader, "no format line");

  const auto vit = std::find_if(elements.begin(), elements.end(), [](const ElementDecl& e) { return e.name == "vertex"; });
  if (vit == elements.end()) throw Error(ErrorCode::MissingHeader, "no 'element vertex'");
  std::array<int, 3> xyz{-1, -1, -1};
  PlyDocument doc;
  doc.vertex_count = vit->count;
  for (std::size_t i = 0; i < vit->properties.size(); ++i) {
    const std::string& name = vit->properties[i];
    if (name == "x") xyz[0] = static_cast<int>(i);
    else if (name == "y") xyz[1] = static_cast<int>(i);
    else if (name == "z") xyz[2] = static_cast<int>(i);
    else doc.ignored_properties.push_back(name);
  }
  if (*std::min_element(xyz.begin(), xyz.end()) < 0) throw Error(ErrorCode::MissingHeader, "vertex element lacks x, y, z");

  // Rows of elements declared before the vertex block are skipped.
  for (auto it = elements.begin(); it != vit; ++it)
    for (std::size_t r = 0; r < it->count; ++r)
      if (!reader.next(line)) throw Error(ErrorCode::CountMismatch, "data ended inside element '" + it->name + "'");

  doc.points.reserve(vit->count);
  const std::size_t width = vit->properties.size();
  while (doc.points.size() < vit->count) {
    if (!reader.next(line))
      throw Error(ErrorCode::CountMismatch, "expected " + std::to_string(vit->count) + " vertex rows, found " +
                                                std::to_string(doc.points.size()));
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != width)
      throw Error(ErrorCode::MalformedRow, "line " + std::to_string(reader.number()) + ": expected " +
                                               std::to_string(width) + " values, got " + std::to_string(tok.size()));
    Vec3 p;
    for (int k = 0; k < 3; ++k) p(k) = parse_number(tok[static_cast<std::size_t>(xyz[k])], reader.number());
    for (std::size_t j = 0; j < tok.size(); ++j) parse_number(tok[j], reader.number());
    doc.points.push_back(p);
  }
  return doc;
}

PlyDocument read_ply_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_ply(ss.str());
}

std::string write_ply(const PointCloud& cloud) {
  std::string out = "ply\nformat ascii 1.0\nelement vertex " + std::to_string(cloud.size()) +
                    "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
  for (const Vec3& p : cloud) out += format_g9(p.x()) + ' ' + format_g9(p.y()) + ' ' + format_g9(p.z()) + '\n';
  return out;
}

void write_ply_file(const std::string& path, const PointCloud& cloud) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << write_ply(cloud);
}

PointCloud voxel_downsample(const PointCloud& cloud, double voxel) {
  if (!(voxel > 0.0) || !std::isfinite(voxel)) throw Error(ErrorCode::NonPositiveVoxel, "voxel size must be positive");
  std::map<std::array<long long, 3>, std::pair<Vec3, int>> cells;
  for (const Vec3& p : cloud) {
    const std::array<long long, 3> key{static_cast<long long>(std::floor(p.x() / voxel)),
                                       static_cast<long long>(std::floor(p.y() / voxel)),
                                       static_cast<long long>(std::floor(p.z() / voxel))};
    auto [it, inserted] = cells.try_emplace(key, Vec3::Zero(), 0);
    it->second.first += p;
    it->second.second += 1;
  }
  PointCloud out;
  out.reserve(cells.size());
  for (const auto& [key, acc] : cells) out.push_back(acc.second == 1 ? acc.first : Vec3(acc.first / acc.second));
  return out;
}

PointCloud outlier_filter(const PointCloud& cloud, int k, double sigma) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
  if (cloud.size() <= static_cast<std::size_t>(k)) throw Error(ErrorCode::TooFewPoints, "outlier filter needs more than k points");

  const std::size_t budget = cloud.size() / 5;
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : cloud) centroid += p;
  centroid /= static_cast<double>(cloud.size());

  std::vector<std::size_t> alive(cloud.size());
  std::iota(alive.begin(), alive.end(), 0);
  std::size_t removed = 0;
  std::vector<double> dist;
  while (removed < budget && alive.size() > static_cast<std::size_t>(k)) {
    const std::size_t n = alive.size();
    std::vector<double> mean_knn(n);
    for (std::size_t i = 0; i < n; ++i) {
      dist.clear();
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) dist.push_back((cloud[alive[i]] - cloud[alive[j]]).norm());
      std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
      double s = 0.0;
      for (int q = 0; q < k; ++q) s += dist[static_cast<std::size_t>(q)];
      mean_knn[i] = s / k;
    }
    const double mean = std::accumulate(mean_knn.begin(), mean_knn.end(), 0.0) / static_cast<double>(n);
    double var = 0.0;
    for (double m : mean_knn) var += (m - mean) * (m - mean);
    const double threshold = mean + sigma * std::sqrt(var / static_cast<double>(n));

    std::vector<std::size_t> flagged;
    for (std::size_t i = 0; i < n; ++i)
      if (mean_knn[i] > threshold) flagged.push_back(i);
    if (flagged.empty()) break;
    if (removed + flagged.size() > budget) {
      // Remove only the flagged points farthest from the centroid.
      std::stable_sort(flagged.begin(), flagged.end(), [&](std::size_t a, std::size_t b) {
        return (cloud[alive[a]] - centroid).squaredNorm() > (cloud[alive[b]] - centroid).squaredNorm();
      });
      flagged.resize(budget - removed);
    }
    std::vector<char> drop(n, 0);
    for (std::size_t i : flagged) drop[i] = 1;
    std::vector<std::size_t> next;
    next.reserve(n - flagged.size());
    for (std::size_t i = 0; i < n; ++i)
      if (!drop[i]) next.push_back(alive[i]);
    removed += flagged.size();
    alive = std::move(next);
  }

  PointCloud out;
  out.reserve(alive.size());
  for (std::size_t i : alive) out.push_back(cloud[i]);
  return out;
}

Mat to_matrix(const PointCloud& cloud) {
  Mat m(3, static_cast<Eigen::Index>(cloud.size()));
  for (std::size_t i = 0; i < cloud.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = cloud[i];
  return m;
}

}  // namespace reachnav
