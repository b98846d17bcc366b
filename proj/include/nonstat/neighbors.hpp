// Exact k-nearest-neighbor and fixed-radius queries over a dataset.
//
// The index is a median-split kd-tree that guarantees brute-force-identical
// answers: Euclidean distance, closed balls, and distance ties broken by
// smaller stream index. Sums over ball members are accumulated in stream
// order so results are bit-stable.

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "nonstat/core.hpp"

namespace nonstat {

/// Volume of the d-dimensional unit ball, pi^{d/2} / Gamma(d/2 + 1).
inline double unit_ball_volume(int d) {
    if (d < 1) throw std::invalid_argument("unit_ball_volume: dimension must be >= 1");
    return std::pow(3.14159265358979323846, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

/// k-NN ball radius r(n, x) = (k / (pi_d n f(x)))^{1/d}.
inline double knn_radius(long n, long k, double f_x, int d) {
    if (n < 1) throw std::invalid_argument("knn_radius: n must be >= 1");
    if (k < 1) throw std::invalid_argument("knn_radius: k must be >= 1");
    if (!(f_x > 0.0)) throw std::invalid_argument("knn_radius: density value must be positive");
    return std::pow(static_cast<double>(k) / (unit_ball_volume(d) * static_cast<double>(n) * f_x),
                    1.0 / d);
}

/// Counts over a closed ball: total membership, per-label counts for
/// classification data, label sum for regression data.
struct BallCounts {
    long n_tot = 0;
    long n_one = 0;
    long n_zero = 0;
    double y_sum = 0.0;
};

class SpatialIndex {
public:
    /// Builds over the first prefix_len samples (0 = all). Single-threaded;
    /// the finished index is immutable and safe for concurrent queries.
    explicit SpatialIndex(const Dataset& ds, long prefix_len = 0) {
        n_ = prefix_len > 0 ? std::min(prefix_len, ds.n()) : ds.n();
        if (n_ < 1) throw std::invalid_argument("SpatialIndex: empty dataset");
        dim_ = ds.dim;
        kind_ = ds.kind;
        coords_.resize(static_cast<std::size_t>(n_) * dim_);
        labels_.resize(static_cast<std::size_t>(n_));
        order_.resize(static_cast<std::size_t>(n_));
        for (long i = 0; i < n_; ++i) {
            const Sample& s = ds.samples[static_cast<std::size_t>(i)];
            for (int a = 0; a < dim_; ++a) coords_[static_cast<std::size_t>(i) * dim_ + a] = s.x[a];
            labels_[static_cast<std::size_t>(i)] = s.y;
            order_[static_cast<std::size_t>(i)] = i;
        }
        nodes_.reserve(static_cast<std::size_t>(2 * n_ / kLeafSize + 2));
        root_ = build(0, n_);
    }

    long size() const { return n_; }
    int dim() const { return dim_; }
    DataKind kind() const { return kind_; }

    double label(long stream_index) const { return labels_[static_cast<std::size_t>(stream_index - 1)]; }

    Point point(long stream_index) const {
        Point p;
        p.coords.assign(coords_.begin() + (stream_index - 1) * dim_,
                        coords_.begin() + stream_index * dim_);
        return p;
    }

    /// The k nearest stream indices (1-based), ordered by (distance, index).
    /// Returns all n points when k >= n.
    std::vector<long> k_nearest(const Point& x, long k) const {
        if (k < 1) throw std::invalid_argument("k_nearest: k must be >= 1");
        const long cap = std::min(k, n_);
        std::vector<Cand> heap;
        heap.reserve(static_cast<std::size_t>(cap));
        search_knn(root_, x, cap, heap);
        std::sort(heap.begin(), heap.end(),
                  [](const Cand& a, const Cand& b) { return a.d2 != b.d2 ? a.d2 < b.d2 : a.idx < b.idx; });
        std::vector<long> out(heap.size());
        for (std::size_t j = 0; j < heap.size(); ++j) out[j] = heap[j].idx + 1;
        return out;
    }

    /// Closed-ball counts over {i : |X_i - x| <= r}.
    BallCounts ball_counts(const Point& x, double r) const {
        if (r < 0.0) throw std::invalid_argument("ball_counts: radius must be >= 0");
        std::vector<long> members;
        search_ball(root_, x, r * r, members);
        std::sort(members.begin(), members.end());
        BallCounts c;
        c.n_tot = static_cast<long>(members.size());
        for (long i : members) {
            const double y = labels_[static_cast<std::size_t>(i)];
            if (kind_ == DataKind::classification) {
                if (y == 1.0) ++c.n_one; else ++c.n_zero;
            }
            c.y_sum += y;
        }
        return c;
    }

private:
    static constexpr long kLeafSize = 16;

    struct Node {
        int axis = -1;  // -1 marks a leaf
        double split = 0.0;
        long lo = 0, hi = 0;  // range in order_ (leaves only)
        int left = -1, right = -1;
    };

    struct Cand {
        double d2;
        long idx;  // 0-based stream index
    };

    // Worst candidate at the heap top: larger distance, then larger index.
    static bool heap_before(const Cand& a, const Cand& b) {
        return a.d2 != b.d2 ? a.d2 < b.d2 : a.idx < b.idx;
    }

    double coord(long i, int a) const { return coords_[static_cast<std::size_t>(i) * dim_ + a]; }

    double dist2(long i, const Point& x) const {
        double s = 0.0;
        for (int a = 0; a < dim_; ++a) {
            const double t = coord(i, a) - x[a];
            s += t * t;
        }
        return s;
    }

    int build(long lo, long hi) {
        Node nd;
        nd.lo = lo;
        nd.hi = hi;
        if (hi - lo <= kLeafSize) {
            nodes_.push_back(nd);
            return static_cast<int>(nodes_.size()) - 1;
        }
        // Split on the axis of widest extent for balanced geometry.
        int axis = 0;
        double best = -1.0;
        for (int a = 0; a < dim_; ++a) {
            double mn = coord(order_[static_cast<std::size_t>(lo)], a), mx = mn;
            for (long j = lo + 1; j < hi; ++j) {
                const double v = coord(order_[static_cast<std::size_t>(j)], a);
                mn = std::min(mn, v);
                mx = std::max(mx, v);
            }
            if (mx - mn > best) {
                best = mx - mn;
                axis = a;
            }
        }
        const long mid = lo + (hi - lo) / 2;
        std::nth_element(order_.begin() + lo, order_.begin() + mid, order_.begin() + hi,
                         [&](long i, long j) {
                             const double vi = coord(i, axis), vj = coord(j, axis);
                             return vi != vj ? vi < vj : i < j;
                         });
        nd.axis = axis;
        nd.split = coord(order_[static_cast<std::size_t>(mid)], axis);
        nodes_.push_back(nd);
        const int self = static_cast<int>(nodes_.size()) - 1;
        const int l = build(lo, mid);
        const int r = build(mid, hi);
        nodes_[static_cast<std::size_t>(self)].left = l;
        nodes_[static_cast<std::size_t>(self)].right = r;
        return self;
    }

    void offer(std::vector<Cand>& heap, long cap, double d2, long idx) const {
        const Cand cand{d2, idx};
        if (static_cast<long>(heap.size()) < cap) {
            heap.push_back(cand);
            std::push_heap(heap.begin(), heap.end(), heap_before);
        } else if (heap_before(cand, heap.front())) {
            std::pop_heap(heap.begin(), heap.end(), heap_before);
            heap.back() = cand;
            std::push_heap(heap.begin(), heap.end(), heap_before);
        }
    }

    void search_knn(int node, const Point& x, long cap, std::vector<Cand>& heap) const {
        const Node& nd = nodes_[static_cast<std::size_t>(node)];
        if (nd.axis < 0) {
            for (long j = nd.lo; j < nd.hi; ++j) {
                const long i = order_[static_cast<std::size_t>(j)];
                offer(heap, cap, dist2(i, x), i);
            }
            return;
        }
        const double diff = x[nd.axis] - nd.split;
        const int near = diff <= 0.0 ? nd.left : nd.right;
        const int far = diff <= 0.0 ? nd.right : nd.left;
        search_knn(near, x, cap, heap);
        // Visit the far side on exact plane-distance ties: an equidistant
        // point with a smaller stream index may still displace the worst
        // candidate.
        if (static_cast<long>(heap.size()) < cap || diff * diff <= heap.front().d2)
            search_knn(far, x, cap, heap);
    }

    void search_ball(int node, const Point& x, double r2, std::vector<long>& members) const {
        const Node& nd = nodes_[static_cast<std::size_t>(node)];
        if (nd.axis < 0) {
            for (long j = nd.lo; j < nd.hi; ++j) {
                const long i = order_[static_cast<std::size_t>(j)];
                if (dist2(i, x) <= r2) members.push_back(i);
            }
            return;
        }
        const double diff = x[nd.axis] - nd.split;
        const int near = diff <= 0.0 ? nd.left : nd.right;
        const int far = diff <= 0.0 ? nd.right : nd.left;
        search_ball(near, x, r2, members);
        if (diff * diff <= r2) search_ball(far, x, r2, members);
    }

    long n_ = 0;
    int dim_ = 0;
    DataKind kind_ = DataKind::regression;
    std::vector<double> coords_;  // stream order, row-major
    std::vector<double> labels_;
    std::vector<long> order_;  // kd-tree permutation of 0-based indices
    std::vector<Node> nodes_;
    int root_ = -1;
};

inline SpatialIndex build_index(const Dataset& ds, long prefix_len = 0) {
    return SpatialIndex(ds, prefix_len);
}

}  // namespace nonstat
