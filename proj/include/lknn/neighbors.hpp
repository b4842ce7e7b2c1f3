#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lknn/point_cloud.hpp"

namespace lknn {

// Ordered k-NN answer. distances are nondecreasing; ties in distance are
// ordered by ascending original sample index, so every answer is unique.
// distances.back() is the k-th neighbour radius R_k of the query point.
struct NeighborQueryResult {
  std::vector<std::size_t> indices;
  std::vector<double> distances;
};

namespace detail {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

struct Candidate {
  double dist2;
  std::size_t index;
};

// Canonical order: by distance, then by original sample index.
inline bool canonical_less(const Candidate& a, const Candidate& b) {
  if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
  return a.index < b.index;
}

inline NeighborQueryResult finalize(std::vector<Candidate> cands) {
  std::sort(cands.begin(), cands.end(), canonical_less);
  NeighborQueryResult out;
  out.indices.reserve(cands.size());
  out.distances.reserve(cands.size());
  for (const auto& c : cands) {
    out.indices.push_back(c.index);
    out.distances.push_back(std::sqrt(c.dist2));
  }
  return out;
}

}  // namespace detail

// Brute-force reference answering the same queries as NeighborIndex. The
// index is required to match this exactly, so keep both paths computing
// squared distances with the identical accumulation order.
inline NeighborQueryResult linear_scan_k_nearest(const PointCloud& cloud,
                                                 std::span<const double> x,
                                                 std::size_t k) {
  const std::size_t n = cloud.size();
  if (x.size() != cloud.dim()) throw std::invalid_argument("query dimension mismatch");
  if (k < 1 || k > n) throw std::invalid_argument("k out of range [1, n]");
  std::vector<detail::Candidate> cands(n);
  for (std::size_t i = 0; i < n; ++i) cands[i] = {detail::squared_distance(x, cloud.point(i)), i};
  std::nth_element(cands.begin(), cands.begin() + (k - 1), cands.end(), detail::canonical_less);
  cands.resize(k);
  return detail::finalize(std::move(cands));
}

// Exact k-d tree over an owned snapshot of the cloud. Immutable after
// construction and safe for concurrent queries. Construction is
// deterministic given the cloud ordering.
class NeighborIndex {
public:
  explicit NeighborIndex(PointCloud cloud) : cloud_(std::move(cloud)) {
    const std::size_t n = cloud_.size();
    order_.resize(n);
    for (std::size_t i = 0; i < n; ++i) order_[i] = i;
    nodes_.reserve(n);
    root_ = build(0, n, 0);
  }

  const PointCloud& cloud() const { return cloud_; }
  std::size_t size() const { return cloud_.size(); }
  std::size_t dim() const { return cloud_.dim(); }

  NeighborQueryResult k_nearest(std::span<const double> x, std::size_t k) const {
    if (x.size() != dim()) throw std::invalid_argument("query dimension mismatch");
    if (k < 1 || k > size()) throw std::invalid_argument("k out of range [1, n]");
    Heap heap;
    heap.data.reserve(k);
    heap.capacity = k;
    search(root_, x, heap);
    return detail::finalize(std::move(heap.data));
  }

  // R_k of the query point: the distance to its k-th neighbour.
  double kth_radius(std::span<const double> x, std::size_t k) const {
    return k_nearest(x, k).distances.back();
  }

  // Elementwise identical to one k_nearest call per query; failures carry
  // the query position.
  std::vector<NeighborQueryResult> batched_variable_k(
      const std::vector<std::pair<std::vector<double>, std::size_t>>& queries) const {
    std::vector<NeighborQueryResult> out;
    out.reserve(queries.size());
    for (std::size_t q = 0; q < queries.size(); ++q) {
      try {
        out.push_back(k_nearest(queries[q].first, queries[q].second));
      } catch (const std::exception& e) {
        throw std::invalid_argument("query " + std::to_string(q) + ": " + e.what());
      }
    }
    return out;
  }

private:
  struct Node {
    double split = 0.0;
    std::size_t axis = 0;
    int left = -1;
    int right = -1;
    std::size_t begin = 0;  // leaf range into order_
    std::size_t end = 0;
    bool leaf = false;
  };

  struct Heap {
    // Max-heap on the canonical order; the root is the current worst kept
    // candidate.
    std::vector<detail::Candidate> data;
    std::size_t capacity = 0;

    static bool worse(const detail::Candidate& a, const detail::Candidate& b) {
      return detail::canonical_less(b, a);
    }
    bool full() const { return data.size() == capacity; }
    const detail::Candidate& worst() const { return data.front(); }
    void push(const detail::Candidate& c) {
      if (!full()) {
        data.push_back(c);
        std::push_heap(data.begin(), data.end(), [](const auto& a, const auto& b) { return worse(b, a); });
      } else if (detail::canonical_less(c, worst())) {
        std::pop_heap(data.begin(), data.end(), [](const auto& a, const auto& b) { return worse(b, a); });
        data.back() = c;
        std::push_heap(data.begin(), data.end(), [](const auto& a, const auto& b) { return worse(b, a); });
      }
    }
  };

  static constexpr std::size_t kLeafSize = 16;

  int build(std::size_t begin, std::size_t end, std::size_t depth) {
    Node node;
    if (end - begin <= kLeafSize) {
      node.leaf = true;
      node.begin = begin;
      node.end = end;
      nodes_.push_back(node);
      return static_cast<int>(nodes_.size() - 1);
    }
    const std::size_t axis = depth % cloud_.dim();
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::size_t a, std::size_t b) {
                       const double ca = cloud_.point(a)[axis];
                       const double cb = cloud_.point(b)[axis];
                       if (ca != cb) return ca < cb;
                       return a < b;
                     });
    node.axis = axis;
    node.split = cloud_.point(order_[mid])[axis];
    nodes_.push_back(node);
    const int self = static_cast<int>(nodes_.size() - 1);
    const int left = build(begin, mid, depth + 1);
    const int right = build(mid, end, depth + 1);
    nodes_[self].left = left;
    nodes_[self].right = right;
    return self;
  }

  void search(int node_id, std::span<const double> x, Heap& heap) const {
    const Node& node = nodes_[node_id];
    if (node.leaf) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const std::size_t idx = order_[i];
        heap.push({detail::squared_distance(x, cloud_.point(idx)), idx});
      }
      return;
    }
    const double delta = x[node.axis] - node.split;
    const int near = delta < 0.0 ? node.left : node.right;
    const int far = delta < 0.0 ? node.right : node.left;
    search(near, x, heap);
    // Points at exactly the splitting distance can still win on the index
    // tie rule, so only prune strictly farther subtrees.
    if (!heap.full() || delta * delta <= heap.worst().dist2) search(far, x, heap);
  }

  PointCloud cloud_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace lknn
