#include "gp/spatial_index.hpp"

#include <algorithm>
#include <cassert>
#include <limits>

namespace geoprune {

struct SpatialIndex::Node {
    bool leaf = true;
    Mbr box{{0, 0}, {0, 0}};
    std::vector<std::unique_ptr<Node>> children;  // internal nodes
    std::vector<IndexEntry> entries;              // leaf nodes

    std::size_t count() const { return leaf ? entries.size() : children.size(); }

    void recompute_box() {
        bool first = true;
        auto extend = [&](const Mbr& b) {
            box = first ? b : box.merged(b);
            first = false;
        };
        if (leaf) {
            for (const auto& e : entries) extend(e.box);
        } else {
            for (const auto& c : children) extend(c->box);
        }
    }
};

namespace {

double enlargement(const Mbr& box, const Mbr& add) {
    return box.merged(add).area() - box.area();
}

/// Guttman quadratic split over generic items with a box accessor.
template <typename Item, typename BoxOf>
void quadratic_split(std::vector<Item>& items, std::vector<Item>& left,
                     std::vector<Item>& right, std::size_t min_fill, BoxOf box_of) {
    // Pick seeds: the pair wasting the most area when combined.
    std::size_t seed_a = 0, seed_b = 1;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < items.size(); ++i) {
        for (std::size_t j = i + 1; j < items.size(); ++j) {
            double waste = box_of(items[i]).merged(box_of(items[j])).area() -
                           box_of(items[i]).area() - box_of(items[j]).area();
            if (waste > worst) {
                worst = waste;
                seed_a = i;
                seed_b = j;
            }
        }
    }
    Mbr box_l = box_of(items[seed_a]);
    Mbr box_r = box_of(items[seed_b]);
    std::vector<char> assigned(items.size(), 0);
    assigned[seed_a] = 1;
    assigned[seed_b] = 2;
    std::size_t n_left = 1, n_right = 1;
    std::size_t remaining = items.size() - 2;
    while (remaining > 0) {
        // Force-assign when one side must take all the rest.
        if (n_left + remaining <= min_fill) {
            for (std::size_t i = 0; i < items.size(); ++i)
                if (!assigned[i]) { assigned[i] = 1; box_l = box_l.merged(box_of(items[i])); ++n_left; }
            remaining = 0;
            break;
        }
        if (n_right + remaining <= min_fill) {
            for (std::size_t i = 0; i < items.size(); ++i)
                if (!assigned[i]) { assigned[i] = 2; box_r = box_r.merged(box_of(items[i])); ++n_right; }
            remaining = 0;
            break;
        }
        // Pick the unassigned item with the strongest side preference.
        std::size_t pick = items.size();
        double best_diff = -1.0;
        double pick_dl = 0.0, pick_dr = 0.0;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (assigned[i]) continue;
            double dl = enlargement(box_l, box_of(items[i]));
            double dr = enlargement(box_r, box_of(items[i]));
            double diff = std::abs(dl - dr);
            if (diff > best_diff) {
                best_diff = diff;
                pick = i;
                pick_dl = dl;
                pick_dr = dr;
            }
        }
        bool to_left = pick_dl < pick_dr ||
                       (pick_dl == pick_dr &&
                        (box_l.area() < box_r.area() ||
                         (box_l.area() == box_r.area() && n_left <= n_right)));
        if (to_left) {
            assigned[pick] = 1;
            box_l = box_l.merged(box_of(items[pick]));
            ++n_left;
        } else {
            assigned[pick] = 2;
            box_r = box_r.merged(box_of(items[pick]));
            ++n_right;
        }
        --remaining;
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (assigned[i] == 1) left.push_back(std::move(items[i]));
        else right.push_back(std::move(items[i]));
    }
}

}  // namespace

SpatialIndex::SpatialIndex(std::size_t fanout) : fanout_(std::max<std::size_t>(4, fanout)) {}
SpatialIndex::~SpatialIndex() = default;
SpatialIndex::SpatialIndex(SpatialIndex&&) noexcept = default;
SpatialIndex& SpatialIndex::operator=(SpatialIndex&&) noexcept = default;

void SpatialIndex::insert_into_tree(std::unique_ptr<Node>& root, const IndexEntry& entry) {
    const std::size_t min_fill = std::max<std::size_t>(1, fanout_ * 2 / 5);
    if (!root) {
        root = std::make_unique<Node>();
        root->leaf = true;
    }
    // Descend to a leaf by least enlargement, splitting on the way back up.
    struct Frame {
        Node* node;
        std::size_t child;  // chosen child index (internal nodes)
    };
    std::vector<Frame> path;
    Node* node = root.get();
    while (!node->leaf) {
        std::size_t best = 0;
        double best_enl = std::numeric_limits<double>::infinity();
        double best_area = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < node->children.size(); ++i) {
            double enl = enlargement(node->children[i]->box, entry.box);
            double area = node->children[i]->box.area();
            if (enl < best_enl || (enl == best_enl && area < best_area)) {
                best_enl = enl;
                best_area = area;
                best = i;
            }
        }
        path.push_back({node, best});
        node = node->children[best].get();
    }
    if (node->count() == 0) {
        node->box = entry.box;
    } else {
        node->box = node->box.merged(entry.box);
    }
    node->entries.push_back(entry);

    std::unique_ptr<Node> carry;  // sibling produced by a split below
    if (node->entries.size() > fanout_) {
        auto sibling = std::make_unique<Node>();
        sibling->leaf = true;
        std::vector<IndexEntry> items = std::move(node->entries);
        node->entries.clear();
        quadratic_split(items, node->entries, sibling->entries, min_fill,
                        [](const IndexEntry& e) { return e.box; });
        node->recompute_box();
        sibling->recompute_box();
        carry = std::move(sibling);
    }
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
        Node* parent = it->node;
        parent->box = parent->box.merged(entry.box);
        if (carry) {
            parent->children.push_back(std::move(carry));
            if (parent->children.size() > fanout_) {
                auto sibling = std::make_unique<Node>();
                sibling->leaf = false;
                std::vector<std::unique_ptr<Node>> items = std::move(parent->children);
                parent->children.clear();
                quadratic_split(items, parent->children, sibling->children, min_fill,
                                [](const std::unique_ptr<Node>& n) { return n->box; });
                parent->recompute_box();
                sibling->recompute_box();
                carry = std::move(sibling);
            } else {
                parent->recompute_box();
            }
        }
    }
    if (carry) {
        auto new_root = std::make_unique<Node>();
        new_root->leaf = false;
        new_root->children.push_back(std::move(root));
        new_root->children.push_back(std::move(carry));
        new_root->recompute_box();
        root = std::move(new_root);
    }
}

void SpatialIndex::insert(const IndexEntry& entry) {
    if (boxes_.count(entry.key)) throw IndexError("duplicate index key");
    insert_into_tree(root_, entry);
    boxes_.emplace(entry.key, entry.box);
}

void SpatialIndex::remove(const IndexKey& key) {
    auto it = boxes_.find(key);
    if (it == boxes_.end()) throw IndexError("remove of missing index key");
    const Mbr box = it->second;
    boxes_.erase(it);

    const std::size_t min_fill = std::max<std::size_t>(1, fanout_ * 2 / 5);
    std::vector<IndexEntry> orphans;

    // Recursive removal; returns true when the entry was found in `node`.
    // Underfull nodes dissolve into `orphans` for reinsertion.
    std::function<bool(std::unique_ptr<Node>&)> rec = [&](std::unique_ptr<Node>& node) -> bool {
        if (node->leaf) {
            auto pos = std::find_if(node->entries.begin(), node->entries.end(),
                                    [&](const IndexEntry& e) { return e.key == key; });
            if (pos == node->entries.end()) return false;
            node->entries.erase(pos);
            return true;
        }
        for (std::size_t i = 0; i < node->children.size(); ++i) {
            auto& child = node->children[i];
            if (!child->box.intersects(box)) continue;
            if (!rec(child)) continue;
            if (child->count() < min_fill) {
                // Collect the child's entries and drop it.
                std::function<void(Node*)> collect = [&](Node* n) {
                    if (n->leaf) {
                        for (auto& e : n->entries) orphans.push_back(std::move(e));
                    } else {
                        for (auto& c : n->children) collect(c.get());
                    }
                };
                collect(child.get());
                node->children.erase(node->children.begin() + i);
            } else {
                child->recompute_box();
            }
            if (node->count() > 0) node->recompute_box();
            return true;
        }
        return false;
    };

    bool found = root_ && rec(root_);
    if (!found) throw IndexError("index bookkeeping mismatch: entry not in tree");
    if (root_) {
        if (root_->count() == 0) {
            root_.reset();
        } else if (!root_->leaf && root_->children.size() == 1) {
            root_ = std::move(root_->children.front());
        } else {
            root_->recompute_box();
        }
    }
    for (const auto& e : orphans) insert_into_tree(root_, e);
}

std::vector<IndexEntry> SpatialIndex::point_query(const Point& p) const {
    return range_query({p, p});
}

std::vector<IndexEntry> SpatialIndex::range_query(const Mbr& window) const {
    std::vector<IndexEntry> out;
    if (!root_) return out;
    std::vector<const Node*> stack{root_.get()};
    while (!stack.empty()) {
        const Node* node = stack.back();
        stack.pop_back();
        ++nodes_visited_;
        if (!node->box.intersects(window)) continue;
        if (node->leaf) {
            for (const auto& e : node->entries) {
                if (e.box.intersects(window)) out.push_back(e);
            }
        } else {
            for (const auto& c : node->children) stack.push_back(c.get());
        }
    }
    entries_reported_ += out.size();
    std::sort(out.begin(), out.end(),
              [](const IndexEntry& a, const IndexEntry& b) { return a.key < b.key; });
    return out;
}

SpatialIndex::NearestStream::NearestStream(const SpatialIndex& index, Point from)
    : index_(&index), from_(from) {
    if (index.root_) {
        heap_.push({index.root_->box.min_dist(from_), false, {}, index.root_.get(), {}});
    }
}

IndexEntry SpatialIndex::NearestStream::next() {
    while (!heap_.empty()) {
        QueueEntry top = heap_.top();
        heap_.pop();
        if (top.is_entry) {
            ++index_->entries_reported_;
            return top.entry;
        }
        const Node* node = static_cast<const Node*>(top.node);
        ++index_->nodes_visited_;
        if (node->leaf) {
            for (const auto& e : node->entries) {
                heap_.push({e.box.min_dist(from_), true, e.key, nullptr, e});
            }
        } else {
            for (const auto& c : node->children) {
                heap_.push({c->box.min_dist(from_), false, {}, c.get(), {}});
            }
        }
    }
    throw IndexError("nearest stream exhausted");
}

SpatialIndex::NearestStream SpatialIndex::nearest_stream(const Point& from) const {
    return NearestStream(*this, from);
}

}  // namespace geoprune
