#include <catch_amalgamated.hpp>

#include <vector>

#include "lknn/neighbors.hpp"
#include "lknn/rng.hpp"

using lknn::linear_scan_k_nearest;
using lknn::NeighborIndex;
using lknn::PointCloud;
using lknn::Rng;

namespace {

PointCloud random_cloud(Rng& rng, std::size_t n, std::size_t dim, double lo = 0.0,
                        double hi = 1.0) {
  std::vector<double> data(n * dim);
  for (auto& v : data) v = rng.uniform(lo, hi);
  return PointCloud(std::move(data), dim);
}

std::vector<double> random_query(Rng& rng, std::size_t dim, double lo = 0.0, double hi = 1.0) {
  std::vector<double> q(dim);
  for (auto& v : q) v = rng.uniform(lo, hi);
  return q;
}

void expect_identical(const lknn::NeighborQueryResult& a, const lknn::NeighborQueryResult& b) {
  REQUIRE(a.indices == b.indices);
  REQUIRE(a.distances == b.distances);  // bitwise, both paths share the arithmetic
}

}  // namespace

TEST_CASE("construction validates the cloud") {
  REQUIRE_THROWS_AS(PointCloud(std::vector<double>{}, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(PointCloud({1.0, 2.0, 3.0}, 2), std::invalid_argument);
  REQUIRE_THROWS_AS(PointCloud({1.0}, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(PointCloud::from_rows({{1.0, 2.0}, {3.0}}), std::invalid_argument);
}

TEST_CASE("singleton cloud answers every query with its only point") {
  NeighborIndex index(PointCloud({0.25, 0.5}, 2));
  const std::vector<double> q{10.0, -3.0};
  const auto res = index.k_nearest(q, 1);
  REQUIRE(res.indices == std::vector<std::size_t>{0});
  REQUIRE(res.distances.size() == 1);
  REQUIRE_THROWS_AS(index.k_nearest(q, 2), std::invalid_argument);
}

TEST_CASE("line example in canonical order") {
  NeighborIndex index(PointCloud({0.0, 1.0, 2.0, 3.0}));
  const double q = 0.0;
  const auto res = index.k_nearest(std::span<const double>(&q, 1), 2);
  REQUIRE(res.indices == std::vector<std::size_t>{0, 1});
  REQUIRE(res.distances == std::vector<double>{0.0, 1.0});
  REQUIRE(index.kth_radius(std::span<const double>(&q, 1), 2) == 1.0);
  REQUIRE(index.kth_radius(std::span<const double>(&q, 1), 4) == 3.0);
}

TEST_CASE("query at a data point has zero first distance") {
  Rng rng(7);
  const auto cloud = random_cloud(rng, 64, 3);
  NeighborIndex index(cloud);
  const auto res = index.k_nearest(cloud.point(17), 3);
  REQUIRE(res.indices.front() == 17);
  REQUIRE(res.distances.front() == 0.0);
}

TEST_CASE("duplicate points are retrieved in sample-index order") {
  NeighborIndex index(PointCloud({5.0, 1.0, 5.0, 5.0, 2.0}));
  const double q = 5.0;
  const auto res = index.k_nearest(std::span<const double>(&q, 1), 3);
  REQUIRE(res.indices == std::vector<std::size_t>{0, 2, 3});
  REQUIRE(res.distances == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("index matches the linear-scan oracle exactly") {
  Rng rng(42);
  for (std::size_t dim : {1u, 2u, 3u}) {
    Rng stream = rng.child(dim);
    auto cloud = random_cloud(stream, 300, dim);
    // Inject duplicates to stress the tie rule.
    std::vector<double> data(cloud.data());
    for (std::size_t i = 0; i < 10; ++i)
      for (std::size_t j = 0; j < dim; ++j) data[(40 + i) * dim + j] = data[(10 + i) * dim + j];
    cloud = PointCloud(std::move(data), dim);
    NeighborIndex index(cloud);
    for (int trial = 0; trial < 200; ++trial) {
      const auto q = random_query(stream, dim, -0.2, 1.2);
      const std::size_t k = 1 + static_cast<std::size_t>(stream.next_u64() % cloud.size());
      expect_identical(index.k_nearest(q, k), linear_scan_k_nearest(cloud, q, k));
    }
  }
}

TEST_CASE("k_nearest(k) is a prefix of k_nearest(k+1)") {
  Rng rng(11);
  const auto cloud = random_cloud(rng, 128, 2);
  NeighborIndex index(cloud);
  for (int trial = 0; trial < 50; ++trial) {
    const auto q = random_query(rng, 2);
    const std::size_t k = 1 + static_cast<std::size_t>(rng.next_u64() % (cloud.size() - 1));
    const auto small = index.k_nearest(q, k);
    const auto large = index.k_nearest(q, k + 1);
    REQUIRE(std::equal(small.indices.begin(), small.indices.end(), large.indices.begin()));
    REQUIRE(std::equal(small.distances.begin(), small.distances.end(), large.distances.begin()));
  }
}

TEST_CASE("identical clouds build identical indexes") {
  Rng rng(3);
  const auto cloud = random_cloud(rng, 200, 2);
  NeighborIndex a(cloud);
  NeighborIndex b(cloud);
  for (int trial = 0; trial < 20; ++trial) {
    const auto q = random_query(rng, 2);
    expect_identical(a.k_nearest(q, 7), b.k_nearest(q, 7));
  }
}

TEST_CASE("batched queries equal sequential calls") {
  Rng rng(99);
  const auto cloud = random_cloud(rng, 150, 2);
  NeighborIndex index(cloud);

  REQUIRE(index.batched_variable_k({}).empty());

  std::vector<std::pair<std::vector<double>, std::size_t>> queries;
  for (int i = 0; i < 100; ++i)
    queries.emplace_back(random_query(rng, 2),
                         1 + static_cast<std::size_t>(rng.next_u64() % cloud.size()));
  const auto batch = index.batched_variable_k(queries);
  REQUIRE(batch.size() == queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i)
    expect_identical(batch[i], index.k_nearest(queries[i].first, queries[i].second));

  queries[31].second = cloud.size() + 5;  // out of range
  try {
    index.batched_variable_k(queries);
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    REQUIRE(std::string(e.what()).find("query 31") != std::string::npos);
  }
}

TEST_CASE("dimension mismatch is rejected") {
  NeighborIndex index(PointCloud({0.0, 1.0, 2.0}));
  const std::vector<double> q{0.0, 0.0};
  REQUIRE_THROWS_AS(index.k_nearest(q, 1), std::invalid_argument);
}
