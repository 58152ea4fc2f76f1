#include "harmony/nn_index.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "harmony/kinematics.hpp"

namespace harmony {

namespace {

constexpr std::uint32_t kLeafSize = 8;

void push_candidate(std::vector<Neighbor>& heap, std::size_t k, Neighbor n) {
    if (heap.size() < k) {
        heap.push_back(n);
        std::push_heap(heap.begin(), heap.end());
    } else if (n < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = n;
        std::push_heap(heap.begin(), heap.end());
    }
}

}  // namespace

MetricTree::MetricTree(std::vector<double> weights, std::size_t tree_threshold)
    : weights_(std::move(weights)), dim_(weights_.size()), threshold_(std::max<std::size_t>(tree_threshold, 1)) {}

void MetricTree::insert(VertexId id, std::span<const double> coords) {
    coords_.insert(coords_.end(), coords.begin(), coords.end());
    ids_.push_back(id);
    if (ids_.size() >= threshold_ && ids_.size() >= 2 * std::max<std::size_t>(tree_size_, 1)) rebuild();
}

void MetricTree::rebuild() {
    nodes_.clear();
    box_lo_.clear();
    box_hi_.clear();
    tree_size_ = ids_.size();
    build(0, static_cast<std::uint32_t>(tree_size_));
}

std::int32_t MetricTree::build(std::uint32_t begin, std::uint32_t end) {
    const auto node_id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({begin, end, -1, -1});
    box_lo_.resize(box_lo_.size() + dim_);
    box_hi_.resize(box_hi_.size() + dim_);
    double* lo = box_lo_.data() + static_cast<std::size_t>(node_id) * dim_;
    double* hi = box_hi_.data() + static_cast<std::size_t>(node_id) * dim_;
    std::fill(lo, lo + dim_, std::numeric_limits<double>::infinity());
    std::fill(hi, hi + dim_, -std::numeric_limits<double>::infinity());
    for (std::uint32_t s = begin; s < end; ++s) {
        const auto p = point(s);
        for (std::size_t d = 0; d < dim_; ++d) {
            lo[d] = std::min(lo[d], p[d]);
            hi[d] = std::max(hi[d], p[d]);
        }
    }
    if (end - begin <= kLeafSize) return node_id;

    std::size_t axis = 0;
    double spread = -1.0;
    for (std::size_t d = 0; d < dim_; ++d) {
        const double s = weights_[d] * (hi[d] - lo[d]);
        if (s > spread) {
            spread = s;
            axis = d;
        }
    }
    if (!(spread > 0.0)) return node_id;

    // Partition the slot range by the axis coordinate (ties broken by id).
    std::vector<std::uint32_t> order(end - begin);
    std::iota(order.begin(), order.end(), begin);
    const std::uint32_t mid = (end - begin) / 2;
    std::nth_element(order.begin(), order.begin() + mid, order.end(), [&](std::uint32_t a, std::uint32_t b) {
        const double ca = coords_[a * dim_ + axis];
        const double cb = coords_[b * dim_ + axis];
        return ca < cb || (ca == cb && ids_[a] < ids_[b]);
    });
    std::vector<double> coords(order.size() * dim_);
    std::vector<VertexId> ids(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        std::copy_n(coords_.begin() + static_cast<std::ptrdiff_t>(order[i] * dim_), dim_,
                    coords.begin() + static_cast<std::ptrdiff_t>(i * dim_));
        ids[i] = ids_[order[i]];
    }
    std::copy(coords.begin(), coords.end(), coords_.begin() + static_cast<std::ptrdiff_t>(begin * dim_));
    std::copy(ids.begin(), ids.end(), ids_.begin() + begin);

    const std::int32_t left = build(begin, begin + mid);
    const std::int32_t right = build(begin + mid, end);
    nodes_[static_cast<std::size_t>(node_id)].left = left;
    nodes_[static_cast<std::size_t>(node_id)].right = right;
    return node_id;
}

double MetricTree::box_bound(std::int32_t node, std::span<const double> query) const {
    const double* lo = box_lo_.data() + static_cast<std::size_t>(node) * dim_;
    const double* hi = box_hi_.data() + static_cast<std::size_t>(node) * dim_;
    double s = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) {
        double gap = 0.0;
        if (query[d] < lo[d] || query[d] > hi[d]) {
            if (d == kThetaIndex)
                gap = std::min(std::abs(angle_diff(query[d], lo[d])), std::abs(angle_diff(query[d], hi[d])));
            else
                gap = query[d] < lo[d] ? lo[d] - query[d] : query[d] - hi[d];
        }
        const double term = weights_[d] * gap;
        s += term * term;
    }
    // Shrink slightly so rounding never prunes an exact tie.
    return std::sqrt(s) * (1.0 - 1e-12);
}

void MetricTree::consider(std::size_t slot, std::span<const double> query, std::size_t k,
                          std::vector<Neighbor>& heap) const {
    ++evaluations_;
    push_candidate(heap, k, {weighted_distance(query, point(slot), weights_), ids_[slot]});
}

void MetricTree::search(std::int32_t node, std::span<const double> query, std::size_t k,
                        std::vector<Neighbor>& heap) const {
    const Node& n = nodes_[static_cast<std::size_t>(node)];
    if (n.left < 0) {
        for (std::uint32_t s = n.begin; s < n.end; ++s) consider(s, query, k, heap);
        return;
    }
    double bl = box_bound(n.left, query);
    double br = box_bound(n.right, query);
    std::int32_t first = n.left;
    std::int32_t second = n.right;
    if (br < bl) {
        std::swap(first, second);
        std::swap(bl, br);
    }
    if (heap.size() < k || bl <= heap.front().distance) search(first, query, k, heap);
    if (heap.size() < k || br <= heap.front().distance) search(second, query, k, heap);
}

std::vector<Neighbor> MetricTree::nearest(std::span<const double> query, std::size_t k) const {
    std::vector<Neighbor> heap;
    if (k == 0 || ids_.empty()) return heap;
    heap.reserve(k + 1);
    if (tree_size_ > 0) search(0, query, k, heap);
    for (std::size_t s = tree_size_; s < ids_.size(); ++s) consider(s, query, k, heap);
    std::sort_heap(heap.begin(), heap.end());
    return heap;
}

NnIndex::NnIndex(std::vector<double> weights, std::size_t tree_threshold)
    : manip_(weights, tree_threshold), base_(std::move(weights), tree_threshold) {}

void NnIndex::insert(VertexId id, std::span<const double> coords, Region tag) {
    (tag == Region::manipulation ? manip_ : base_).insert(id, coords);
}

std::vector<Neighbor> NnIndex::nearest_in(Region tag, std::span<const double> query, std::size_t k) const {
    return (tag == Region::manipulation ? manip_ : base_).nearest(query, k);
}

std::vector<Neighbor> NnIndex::nearest_all(std::span<const double> query, std::size_t k) const {
    auto a = manip_.nearest(query, k);
    auto b = base_.nearest(query, k);
    std::vector<Neighbor> merged;
    merged.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(merged));
    if (merged.size() > k) merged.resize(k);
    return merged;
}

std::size_t k_value(std::size_t n, std::size_t dim) {
    const double d = static_cast<double>(dim);
    const double k = std::ceil(2.0 * std::numbers::e * (1.0 + 1.0 / d) * std::log(static_cast<double>(n) + 1.0));
    return std::max<std::size_t>(1, static_cast<std::size_t>(k));
}

std::vector<VertexId> region_specific_knn(const NnIndex& index, std::span<const double> query, Region tag,
                                          std::size_t k) {
    std::vector<Neighbor> found;
    if (tag == Region::manipulation) {
        auto a = index.nearest_in(Region::manipulation, query, k);
        auto b = index.nearest_in(Region::base, query, k);
        found.reserve(a.size() + b.size());
        std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(found));
    } else {
        found = index.nearest_all(query, k);
    }
    std::vector<VertexId> ids;
    ids.reserve(found.size());
    for (const auto& n : found) ids.push_back(n.id);
    return ids;
}

}  // namespace harmony
