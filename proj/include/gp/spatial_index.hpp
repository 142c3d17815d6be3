#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <queue>
#include <unordered_map>
#include <vector>

#include "gp/geometry.hpp"

namespace geoprune {

/// Key of an index entry: a vehicle id plus an optional segment index
/// (kNoSegment for point entries keyed by vehicle alone).
struct IndexKey {
    std::int64_t vehicle = 0;
    std::int32_t segment = kNoSegment;

    static constexpr std::int32_t kNoSegment = -1;

    bool operator==(const IndexKey& o) const {
        return vehicle == o.vehicle && segment == o.segment;
    }
    bool operator<(const IndexKey& o) const {
        return vehicle != o.vehicle ? vehicle < o.vehicle : segment < o.segment;
    }
};

struct IndexKeyHash {
    std::size_t operator()(const IndexKey& k) const {
        return std::hash<std::int64_t>()(k.vehicle * 1000003 + k.segment);
    }
};

struct IndexEntry {
    IndexKey key;
    Mbr box;
    std::int64_t payload = 0;  // caller-owned reference
};

class IndexError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dynamic R-tree (Guttman, quadratic split) over rectangles and points.
/// Closed boundaries throughout. Single-writer, multi-reader between
/// mutations.
class SpatialIndex {
public:
    explicit SpatialIndex(std::size_t fanout = 16);
    ~SpatialIndex();
    SpatialIndex(SpatialIndex&&) noexcept;
    SpatialIndex& operator=(SpatialIndex&&) noexcept;

    void insert(const IndexEntry& entry);          // throws on duplicate key
    void remove(const IndexKey& key);              // throws on missing key
    bool contains(const IndexKey& key) const { return boxes_.count(key) > 0; }
    std::size_t size() const { return boxes_.size(); }

    /// Entries whose box contains p, sorted by key.
    std::vector<IndexEntry> point_query(const Point& p) const;
    /// Entries whose box intersects the window, sorted by key.
    std::vector<IndexEntry> range_query(const Mbr& window) const;

    /// Streams entries by ascending Euclidean distance from `from` (box
    /// min-distance; exact for point entries), ties by key order.
    class NearestStream {
    public:
        bool has_next() const { return !heap_.empty(); }
        IndexEntry next();

    private:
        friend class SpatialIndex;
        explicit NearestStream(const SpatialIndex& index, Point from);

        const SpatialIndex* index_;
        Point from_;
        struct QueueEntry {
            double dist;
            bool is_entry;
            IndexKey key;  // for entries; untouched for nodes
            const void* node;
            IndexEntry entry;
        };
        struct Cmp {
            bool operator()(const QueueEntry& a, const QueueEntry& b) const {
                if (a.dist != b.dist) return a.dist > b.dist;
                // At equal distance expand nodes first so that key-order
                // tie-breaking over entries is exact.
                if (a.is_entry != b.is_entry) return a.is_entry;
                return b.key < a.key;
            }
        };
        std::priority_queue<QueueEntry, std::vector<QueueEntry>, Cmp> heap_;
    };
    NearestStream nearest_stream(const Point& from) const;

    /// Diagnostics: nodes visited by queries since construction.
    std::uint64_t nodes_visited() const { return nodes_visited_; }
    std::uint64_t entries_reported() const { return entries_reported_; }

private:
    struct Node;
    void insert_into_tree(std::unique_ptr<Node>& root, const IndexEntry& entry);
    void condense(const IndexKey& key);

    std::size_t fanout_;
    std::unique_ptr<Node> root_;
    std::unordered_map<IndexKey, Mbr, IndexKeyHash> boxes_;
    mutable std::uint64_t nodes_visited_ = 0;
    mutable std::uint64_t entries_reported_ = 0;
};

}  // namespace geoprune
