#pragma once

// Exact k-nearest-neighbor search under the weighted configuration metric
// (heading coordinate wrapped). Small sets are scanned linearly; larger sets
// keep a static kd-tree rebuilt whenever the population doubles, plus a
// linear-scan tail of points inserted since the last rebuild.

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "harmony/regions.hpp"

namespace harmony {

using VertexId = std::uint32_t;

struct Neighbor {
    double distance{0.0};
    VertexId id{0};
    friend bool operator<(const Neighbor& a, const Neighbor& b) noexcept {
        return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
    }
    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

inline constexpr std::size_t kDefaultTreeThreshold = 2000;

class MetricTree {
public:
    MetricTree(std::vector<double> weights, std::size_t tree_threshold);

    void insert(VertexId id, std::span<const double> coords);
    /// k nearest, ordered by (distance, id).
    [[nodiscard]] std::vector<Neighbor> nearest(std::span<const double> query, std::size_t k) const;
    [[nodiscard]] std::size_t size() const noexcept { return ids_.size(); }
    [[nodiscard]] std::int64_t distance_evaluations() const noexcept { return evaluations_; }

private:
    struct Node {
        std::uint32_t begin{0};
        std::uint32_t end{0};
        std::int32_t left{-1};
        std::int32_t right{-1};
    };

    void rebuild();
    std::int32_t build(std::uint32_t begin, std::uint32_t end);
    void search(std::int32_t node, std::span<const double> query, std::size_t k, std::vector<Neighbor>& heap) const;
    [[nodiscard]] double box_bound(std::int32_t node, std::span<const double> query) const;
    void consider(std::size_t slot, std::span<const double> query, std::size_t k, std::vector<Neighbor>& heap) const;
    [[nodiscard]] std::span<const double> point(std::size_t slot) const noexcept {
        return {coords_.data() + slot * dim_, dim_};
    }

    std::vector<double> weights_;
    std::size_t dim_;
    std::size_t threshold_;
    std::vector<double> coords_;
    std::vector<VertexId> ids_;
    // Tree over slots [0, tree_size_); slots are reordered at rebuild time.
    std::size_t tree_size_{0};
    std::vector<Node> nodes_;
    std::vector<double> box_lo_;
    std::vector<double> box_hi_;
    mutable std::int64_t evaluations_{0};
};

/// Two sub-indexes keyed by region tag.
class NnIndex {
public:
    explicit NnIndex(std::vector<double> weights, std::size_t tree_threshold = kDefaultTreeThreshold);

    void insert(VertexId id, std::span<const double> coords, Region tag);
    [[nodiscard]] std::vector<Neighbor> nearest_in(Region tag, std::span<const double> query, std::size_t k) const;
    [[nodiscard]] std::vector<Neighbor> nearest_all(std::span<const double> query, std::size_t k) const;
    [[nodiscard]] std::size_t size() const noexcept { return manip_.size() + base_.size(); }
    [[nodiscard]] std::size_t size(Region tag) const noexcept {
        return tag == Region::manipulation ? manip_.size() : base_.size();
    }
    [[nodiscard]] std::int64_t distance_evaluations() const noexcept {
        return manip_.distance_evaluations() + base_.distance_evaluations();
    }

private:
    MetricTree manip_;
    MetricTree base_;
};

/// Connection count ceil(2e(1 + 1/D) ln(n + 1)), at least 1.
[[nodiscard]] std::size_t k_value(std::size_t n, std::size_t dim);

/// Manipulation-region queries take k nearest from each region (up to 2k);
/// base-region queries take k nearest overall. Ordered by (distance, id).
[[nodiscard]] std::vector<VertexId> region_specific_knn(const NnIndex& index, std::span<const double> query,
                                                        Region tag, std::size_t k);

}  // namespace harmony
