#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <initializer_list>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lknn {

// A fixed set of d-dimensional points, stored row-major. Immutable once
// built; every index structure takes its own snapshot.
class PointCloud {
public:
  PointCloud(std::vector<double> data, std::size_t dim)
      : data_(std::move(data)), dim_(dim) {
    if (dim_ == 0) throw std::invalid_argument("PointCloud: dimension must be >= 1");
    if (data_.empty()) throw std::invalid_argument("PointCloud: point count must be >= 1");
    if (data_.size() % dim_ != 0)
      throw std::invalid_argument("PointCloud: data size is not a multiple of the dimension");
    for (double v : data_)
      if (!std::isfinite(v)) throw std::invalid_argument("PointCloud: non-finite coordinate");
  }

  // 1-d convenience.
  explicit PointCloud(std::vector<double> values) : PointCloud(std::move(values), 1) {}

  static PointCloud from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw std::invalid_argument("PointCloud: point count must be >= 1");
    const std::size_t dim = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * dim);
    for (const auto& row : rows) {
      if (row.size() != dim)
        throw std::invalid_argument("PointCloud: inconsistent point dimensions");
      flat.insert(flat.end(), row.begin(), row.end());
    }
    return PointCloud(std::move(flat), dim);
  }

  std::size_t size() const { return data_.size() / dim_; }
  std::size_t dim() const { return dim_; }

  std::span<const double> point(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }

  const std::vector<double>& data() const { return data_; }

private:
  std::vector<double> data_;
  std::size_t dim_;
};

// Loads a cloud from CSV: one row per point, d numeric columns, no header.
inline PointCloud load_point_cloud_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t pos = 0;
        double v = std::stod(cell, &pos);
        row.push_back(v);
      } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": not a number: " + cell);
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path + ": no points");
  return PointCloud::from_rows(rows);
}

}  // namespace lknn
