#pragma once

#include "reachnav/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace reachnav {

using PointCloud = std::vector<Vec3>;

struct PlyDocument {
  std::size_t vertex_count = 0;
  PointCloud points;
  std::vector<std::string> ignored_properties;
};

/// Parses the ASCII PLY subset: `ply`, `format ascii 1.0`, comments,
/// `element vertex N` with one `property <type> <name>` per line, then
/// `end_header` and N rows. Other elements are allowed after the vertex
/// block but their rows are not read.
PlyDocument parse_ply(std::string_view text);
PlyDocument read_ply_file(const std::string& path);

/// ASCII PLY with x, y, z as doubles printed at 9 significant digits.
std::string write_ply(const PointCloud& cloud);
void write_ply_file(const std::string& path, const PointCloud& cloud);

/// One centroid per occupied voxel, emitted in lexicographic voxel order.
PointCloud voxel_downsample(const PointCloud& cloud, double voxel);

/// Statistical outlier removal on mean k-nearest-neighbour distance.
/// Repeats until no point exceeds mean + sigma * std; the total removed is
/// capped at 20% of the input, keeping the candidates nearest the centroid.
PointCloud outlier_filter(const PointCloud& cloud, int k, double sigma);

Mat to_matrix(const PointCloud& cloud);

}  // namespace reachnav
