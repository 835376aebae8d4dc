#include "reachnav/hull_json.hpp"

#include "reachnav/error.hpp"

#include <json.hpp>

#include <cmath>

namespace reachnav {
namespace {

using Json = nlohmann::ordered_json;

Json rows_json(const Mat& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

Json vec_json(const Vec& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::SchemaError, "field '" + field + "': " + what);
}

Mat read_rows(const Json& doc, const char* key, int dim) {
  if (!doc.contains(key) || !doc[key].is_array()) bad(key, "expected an array of rows");
  const Json& a = doc[key];
  Mat m(static_cast<Eigen::Index>(a.size()), dim);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_array() || a[i].size() != static_cast<std::size_t>(dim))
      bad(std::string(key) + "[" + std::to_string(i) + "]", "expected " + std::to_string(dim) + " numbers");
    for (int j = 0; j < dim; ++j) {
      if (!a[i][static_cast<std::size_t>(j)].is_number()) bad(std::string(key) + "[" + std::to_string(i) + "]", "expected numbers");
      m(static_cast<Eigen::Index>(i), j) = a[i][static_cast<std::size_t>(j)].get<double>();
    }
  }
  return m;
}

}  // namespace

std::string hull_to_json(const Hull& hull) {
  Json doc;
  doc["dim"] = hull.facets.dim();
  doc["vertices"] = rows_json(hull.vertices.vertices().transpose());
  doc["normals"] = rows_json(hull.facets.normals());
  doc["offsets"] = vec_json(hull.facets.offsets());
  return doc.dump(2) + "\n";
}

Hull hull_from_json(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, std::string("hull JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("dim") || !doc["dim"].is_number_integer() || doc["dim"].get<int>() < 1)
    bad("dim", "expected a positive integer");
  const int dim = doc["dim"].get<int>();
  const Mat vertices = read_rows(doc, "vertices", dim);
  const Mat normals = read_rows(doc, "normals", dim);
  if (!doc.contains("offsets") || !doc["offsets"].is_array() || doc["offsets"].size() != static_cast<std::size_t>(normals.rows()))
    bad("offsets", "expected one number per normal");
  Vec offsets(normals.rows());
  for (Eigen::Index i = 0; i < offsets.size(); ++i) {
    const Json& v = doc["offsets"][static_cast<std::size_t>(i)];
    if (!v.is_number()) bad("offsets", "expected numbers");
    offsets(i) = v.get<double>();
  }
  for (Eigen::Index i = 0; i < normals.rows(); ++i)
    if (std::abs(normals.row(i).norm() - 1.0) > kTol.unit_normal) bad("normals[" + std::to_string(i) + "]", "not unit length");
  if (vertices.rows() == 0) bad("vertices", "empty");
  return Hull{VPolytope(vertices.transpose()), HPolytope::from_halfspaces(normals, offsets)};
}

std::string reach_to_json(const ReachPolytope& reach) {
  Json doc;
  const int dim = reach.facets.empty() ? 0 : static_cast<int>(reach.facets.front().normal.size());
  Mat normals(static_cast<Eigen::Index>(reach.facets.size()), dim);
  Vec offsets(static_cast<Eigen::Index>(reach.facets.size()));
  for (std::size_t i = 0; i < reach.facets.size(); ++i) {
    normals.row(static_cast<Eigen::Index>(i)) = reach.facets[i].normal.transpose();
    offsets(static_cast<Eigen::Index>(i)) = reach.facets[i].offset;
  }
  doc["dim"] = dim;
  doc["time"] = reach.time;
  doc["normals"] = rows_json(normals);
  doc["offsets"] = vec_json(offsets);
  return doc.dump(2) + "\n";
}

}  // namespace reachnav
