#pragma once

#include <nlohmann/json.hpp>

#include <fstream>
#include <queue>

#include "pdte/bitvec.hpp"
#include "pdte/common.hpp"
#include "pdte/rng.hpp"

namespace pdte {
namespace tree {

// Binary decision tree: internal nodes compare x[feature] < threshold and
// descend left on true (Algorithm-1 routing); leaves carry a label. A node
// with left == right acts as a pass-through (used only by the synthetic
// generator to hit even node counts).
struct TreeNode {
    bool leaf = false;
    uint64_t threshold = 0;
    uint32_t feature = 0;
    int32_t left = -1;
    int32_t right = -1;
    uint64_t label = 0;
};

struct DecisionTree {
    uint32_t n_features = 0;
    std::vector<TreeNode> nodes;  // node 0 is the root

    uint64_t node_count() const { return nodes.size(); }

    void validate() const {
        if (nodes.empty()) throw InvalidTree("empty tree");
        if (n_features == 0) throw InvalidTree("zero feature dimension");
        std::vector<uint8_t> seen(nodes.size(), 0);
        check_walk(0, 0, seen);
        for (size_t i = 0; i < nodes.size(); ++i)
            if (!seen[i]) throw InvalidTree("unreachable node " + std::to_string(i));
    }

    uint32_t depth() const {
        return depth_from(0);
    }

    // Plaintext recursive walk; the reference semantics every encoding and
    // protocol path is tested against.
    uint64_t classify(const std::vector<uint64_t>& x) const {
        size_t cur = 0;
        while (!nodes[cur].leaf) {
            const TreeNode& nd = nodes[cur];
            bool b = x.at(nd.feature) < nd.threshold;
            cur = size_t(b ? nd.left : nd.right);
        }
        return nodes[cur].label;
    }

private:
    void check_walk(size_t i, size_t hops, std::vector<uint8_t>& seen) const {
        if (i >= nodes.size()) throw InvalidTree("child index out of range");
        if (hops > nodes.size()) throw InvalidTree("cycle detected");
        if (seen[i]) throw InvalidTree("node " + std::to_string(i) + " has two parents");
        seen[i] = 1;
        const TreeNode& nd = nodes[i];
        if (nd.leaf) return;
        if (nd.left < 0 || nd.right < 0) throw InvalidTree("internal node missing a child");
        check_walk(size_t(nd.left), hops + 1, seen);
        if (nd.right != nd.left) check_walk(size_t(nd.right), hops + 1, seen);
    }

    uint32_t depth_from(size_t i) const {
        const TreeNode& nd = nodes[i];
        if (nd.leaf) return 0;
        uint32_t dl = 1 + depth_from(size_t(nd.left));
        uint32_t dr = nd.right == nd.left ? dl : 1 + depth_from(size_t(nd.right));
        return std::max(dl, dr);
    }
};

// The per-node tuple t||l||r||v||c, each field ell bits, packed LSB-first in
// that order (t at bits [0, ell)).
struct NodeRecord {
    uint64_t t = 0;
    uint64_t l = 0;
    uint64_t r = 0;
    uint64_t v = 0;
    uint64_t c = 0;

    BitVec pack(uint32_t ell) const {
        BitVec out(5 * ell);
        out.splice(0, BitVec::from_u64(t, ell));
        out.splice(ell, BitVec::from_u64(l, ell));
        out.splice(2 * ell, BitVec::from_u64(r, ell));
        out.splice(3 * ell, BitVec::from_u64(v, ell));
        out.splice(4 * ell, BitVec::from_u64(c, ell));
        return out;
    }

    static NodeRecord unpack(const BitVec& bits, uint32_t ell) {
        NodeRecord rec;
        rec.t = bits.slice(0, ell).to_u64();
        rec.l = bits.slice(ell, ell).to_u64();
        rec.r = bits.slice(2 * ell, ell).to_u64();
        rec.v = bits.slice(3 * ell, ell).to_u64();
        rec.c = bits.slice(4 * ell, ell).to_u64();
        return rec;
    }
};

enum class Layout : uint8_t { Flat, Layered, Clustered };

// A_T: the DFS-ordered record array plus the two optimized layouts derived
// from it. Leaves self-loop (l = r = own index) so a run of d' >= d
// iterations parks on the reached leaf.
struct EncodedTree {
    uint32_t ell = 64;
    uint32_t n_features = 0;
    uint32_t depth = 0;
    Layout layout = Layout::Flat;
    std::vector<NodeRecord> records;  // flat

    uint32_t cluster_q = 1;                          // clustered
    std::vector<std::vector<NodeRecord>> clusters;   // each 2^q - 1 slots, DFS order

    std::vector<std::vector<NodeRecord>> layers;     // layered: layer i has 2^i records

    uint64_t node_count() const { return records.size(); }
};

// DFS (preorder) encoding with self-loop leaves. Leaf filler: t uniform
// random, v uniform in [0, n). Internal filler: c uniform random.
inline EncodedTree encode(const DecisionTree& t, uint32_t ell, Rng& rng) {
    t.validate();
    if (ell > 64) throw ConfigInvalid("encode: ell > 64 unsupported");
    EncodedTree at;
    at.ell = ell;
    at.n_features = t.n_features;
    at.depth = t.depth();
    uint64_t ell_mask = ell == 64 ? ~uint64_t(0) : (uint64_t(1) << ell) - 1;

    std::vector<int64_t> dfs_index(t.nodes.size(), -1);
    // preorder index assignment
    {
        std::vector<size_t> stack{0};
        int64_t next = 0;
        while (!stack.empty()) {
            size_t cur = stack.back();
            stack.pop_back();
            if (dfs_index[cur] >= 0) continue;
            dfs_index[cur] = next++;
            const TreeNode& nd = t.nodes[cur];
            if (!nd.leaf) {
                if (nd.right != nd.left) stack.push_back(size_t(nd.right));
                stack.push_back(size_t(nd.left));
            }
        }
        at.records.resize(size_t(next));
    }
    for (size_t i = 0; i < t.nodes.size(); ++i) {
        if (dfs_index[i] < 0) continue;
        const TreeNode& nd = t.nodes[i];
        NodeRecord rec;
        if (nd.leaf) {
            rec.t = rng.next_u64() & ell_mask;
            rec.v = t.n_features ? rng.below(t.n_features) : 0;
            rec.l = rec.r = uint64_t(dfs_index[i]);
            rec.c = nd.label & ell_mask;
        } else {
            rec.t = nd.threshold & ell_mask;
            rec.v = nd.feature;
            rec.l = uint64_t(dfs_index[size_t(nd.left)]);
            rec.r = uint64_t(dfs_index[size_t(nd.right)]);
            rec.c = rng.next_u64() & ell_mask;
        }
        at.records[size_t(dfs_index[i])] = rec;
    }
    return at;
}

// Algorithm-1 evaluation over the record array: idx <- r ^ b*(l^r) with
// b = x[v] < t, rst <- c, run for a public d_prime iterations. Extra
// iterations are absorbed by leaf self-loops.
inline uint64_t plaintext_eval(const EncodedTree& at, const std::vector<uint64_t>& x,
                               uint32_t d_prime) {
    if (at.layout != Layout::Flat) throw LayoutMismatch("plaintext_eval expects flat layout");
    uint64_t idx = 0;
    uint64_t rst = at.records[0].c;
    for (uint32_t i = 0; i < d_prime; ++i) {
        const NodeRecord& rec = at.records[size_t(idx)];
        uint64_t b = x.at(size_t(rec.v)) < rec.t ? 1 : 0;
        idx = rec.r ^ (b * (rec.l ^ rec.r));
        rst = at.records[size_t(idx)].c;
    }
    return rst;
}

// Completion padding: replace every leaf above depth d with a dummy subtree
// whose leaves all carry the original label. Evaluation is unchanged on all
// inputs.
inline DecisionTree pad_complete(const DecisionTree& t, Rng& rng) {
    t.validate();
    uint32_t d = t.depth();
    DecisionTree out;
    out.n_features = t.n_features;
    // recursive clone; returns new index
    std::function<int32_t(size_t, uint32_t)> clone = [&](size_t i, uint32_t depth) -> int32_t {
        const TreeNode& nd = t.nodes[i];
        int32_t my = int32_t(out.nodes.size());
        out.nodes.push_back({});
        if (!nd.leaf) {
            out.nodes[size_t(my)] = {false, nd.threshold, nd.feature, -1, -1, 0};
            int32_t l = clone(size_t(nd.left), depth + 1);
            int32_t r = nd.right == nd.left ? l : clone(size_t(nd.right), depth + 1);
            out.nodes[size_t(my)].left = l;
            out.nodes[size_t(my)].right = r;
            return my;
        }
        // leaf: pad with a dummy complete subtree down to depth d
        std::function<void(int32_t, uint32_t)> fill = [&](int32_t at, uint32_t k) {
            if (k == d) {
                out.nodes[size_t(at)] = {true, 0, 0, -1, -1, nd.label};
                return;
            }
            out.nodes[size_t(at)] = {false, rng.next_u64(), uint32_t(rng.below(out.n_features)),
                                     -1, -1, 0};
            int32_t l = int32_t(out.nodes.size());
            out.nodes.push_back({});
            int32_t r = int32_t(out.nodes.size());
            out.nodes.push_back({});
            out.nodes[size_t(at)].left = l;
            out.nodes[size_t(at)].right = r;
            fill(l, k + 1);
            fill(r, k + 1);
        };
        fill(my, depth);
        return my;
    };
    clone(0, 0);
    out.validate();
    return out;
}

inline bool is_complete(const DecisionTree& t) {
    uint32_t d = t.depth();
    return t.node_count() == (uint64_t(1) << (d + 1)) - 1;
}

// Layered layout for complete trees: layer i holds the 2^i depth-i records;
// child indices are positions within the next layer (2p, 2p+1), and the leaf
// layer self-loops on positions.
inline EncodedTree encode_layered(const DecisionTree& t, uint32_t ell, Rng& rng) {
    t.validate();
    if (!is_complete(t)) throw TreeNotComplete("layered layout requires a complete tree");
    EncodedTree at = encode(t, ell, rng);  // keeps flat records for oracles
    uint32_t d = t.depth();
    at.layout = Layout::Layered;
    at.layers.assign(d + 1, {});
    uint64_t ell_mask = ell == 64 ? ~uint64_t(0) : (uint64_t(1) << ell) - 1;
    // BFS with per-layer positions
    std::vector<size_t> level{0};
    for (uint32_t i = 0; i <= d; ++i) {
        std::vector<size_t> next;
        for (size_t p = 0; p < level.size(); ++p) {
            const TreeNode& nd = t.nodes[level[p]];
            NodeRecord rec;
            if (nd.leaf) {
                rec.t = rng.next_u64() & ell_mask;
                rec.v = rng.below(t.n_features);
                rec.l = rec.r = p;
                rec.c = nd.label & ell_mask;
            } else {
                rec.t = nd.threshold & ell_mask;
                rec.v = nd.feature;
                rec.l = 2 * p;
                rec.r = 2 * p + 1;
                rec.c = rng.next_u64() & ell_mask;
                next.push_back(size_t(nd.left));
                next.push_back(size_t(nd.right));
            }
            at.layers[i].push_back(rec);
        }
        level = std::move(next);
    }
    return at;
}

// Cluster packing (Optimization 1): each cluster packs a node with its
// descendants in the next q-1 levels, 2^q - 1 slots in DFS-within-cluster
// order. Slots below a leaf replicate the leaf. Boundary-slot child indices
// are cluster ids; a leaf's boundary copies point at the cluster itself.
inline EncodedTree encode_clustered(const DecisionTree& t, uint32_t q, uint32_t ell, Rng& rng) {
    if (q < 1 || q > 3) throw UnsupportedQ("cluster q must be in {1, 2, 3}");
    t.validate();
    EncodedTree at = encode(t, ell, rng);  // flat baseline kept for oracles
    at.layout = Layout::Clustered;
    at.cluster_q = q;
    uint64_t ell_mask = ell == 64 ? ~uint64_t(0) : (uint64_t(1) << ell) - 1;

    std::map<size_t, uint64_t> cluster_of;  // tree node -> cluster id
    std::vector<size_t> roots;
    std::queue<size_t> pending;
    auto cluster_id = [&](size_t node) {
        auto it = cluster_of.find(node);
        if (it != cluster_of.end()) return it->second;
        uint64_t id = roots.size();
        cluster_of[node] = id;
        roots.push_back(node);
        pending.push(node);
        return id;
    };
    cluster_id(0);
    while (!pending.empty()) {
        size_t root = pending.front();
        pending.pop();
        std::vector<NodeRecord> slots;
        // DFS over relative depth. `node` is a real tree node or, when copy
        // is set, a replicated leaf filling the slots below a real leaf.
        std::function<void(size_t, bool, uint32_t)> emit = [&](size_t node, bool copy,
                                                               uint32_t rel) {
            const TreeNode& nd = t.nodes[node];
            const bool boundary = rel == q - 1;
            const size_t slot = slots.size();
            const size_t sub = (size_t(1) << (q - rel - 1)) - 1;
            NodeRecord rec;
            if (nd.leaf || copy) {
                rec.t = rng.next_u64() & ell_mask;
                rec.v = rng.below(t.n_features);
                rec.c = nd.label & ell_mask;
                // boundary copies route to the cluster rooted at this leaf
                // (the current cluster when the leaf is its root)
                rec.l = rec.r = boundary ? cluster_id(node) : slot + 1;
                if (!boundary) rec.r = slot + 1 + sub;
                slots.push_back(rec);
                if (!boundary) {
                    emit(node, true, rel + 1);
                    emit(node, true, rel + 1);
                }
                return;
            }
            rec.t = nd.threshold & ell_mask;
            rec.v = nd.feature;
            rec.c = rng.next_u64() & ell_mask;
            if (boundary) {
                rec.l = cluster_id(size_t(nd.left));
                rec.r = nd.right == nd.left ? rec.l : cluster_id(size_t(nd.right));
                slots.push_back(rec);
                return;
            }
            // inner slot: the evaluator walks fixed DFS offsets, stored here
            // for reference
            rec.l = slot + 1;
            rec.r = slot + 1 + sub;
            slots.push_back(rec);
            emit(size_t(nd.left), false, rel + 1);
            emit(nd.right == nd.left ? size_t(nd.left) : size_t(nd.right), false, rel + 1);
        };
        emit(root, false, 0);
        if (slots.size() != (size_t(1) << q) - 1)
            throw ProtocolError("cluster slot count mismatch");
        at.clusters.push_back(std::move(slots));
    }
    return at;
}

// ---- JSON + file formats -----------------------------------------------
//
// {"n": ..., "nodes": [ {"t":..., "v":..., "l":..., "r":...} | {"c":...} ]}

inline nlohmann::json to_json(const DecisionTree& t) {
    nlohmann::json j;
    j["n"] = t.n_features;
    j["nodes"] = nlohmann::json::array();
    for (const auto& nd : t.nodes) {
        if (nd.leaf) j["nodes"].push_back({{"c", nd.label}});
        else
            j["nodes"].push_back(
                {{"t", nd.threshold}, {"v", nd.feature}, {"l", nd.left}, {"r", nd.right}});
    }
    return j;
}

inline DecisionTree from_json(const nlohmann::json& j) {
    DecisionTree t;
    t.n_features = j.at("n").get<uint32_t>();
    for (const auto& nj : j.at("nodes")) {
        TreeNode nd;
        if (nj.contains("c")) {
            nd.leaf = true;
            nd.label = nj.at("c").get<uint64_t>();
        } else {
            nd.leaf = false;
            nd.threshold = nj.at("t").get<uint64_t>();
            nd.feature = nj.at("v").get<uint32_t>();
            nd.left = nj.at("l").get<int32_t>();
            nd.right = nj.at("r").get<int32_t>();
        }
        t.nodes.push_back(nd);
    }
    t.validate();
    return t;
}

inline void save_tree(const DecisionTree& t, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ConfigInvalid("cannot write tree file: " + path);
    f << to_json(t).dump(2) << "\n";
}

inline DecisionTree load_tree(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigInvalid("cannot open tree file: " + path);
    nlohmann::json j;
    try {
        f >> j;
        return from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid("tree json parse error in " + path + ": " + e.what());
    }
}

// Feature vectors: JSON array or a single CSV line of integers.
inline std::vector<uint64_t> load_features(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigInvalid("cannot open feature file: " + path);
    std::vector<uint64_t> x;
    if (path.size() > 4 && path.substr(path.size() - 4) == ".csv") {
        std::string line;
        std::getline(f, line);
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) x.push_back(std::stoull(cell));
    } else {
        nlohmann::json j;
        try {
            f >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigInvalid("feature json parse error in " + path + ": " + e.what());
        }
        for (const auto& v : j) x.push_back(v.get<uint64_t>());
    }
    return x;
}

inline void save_features(const std::vector<uint64_t>& x, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ConfigInvalid("cannot write feature file: " + path);
    f << nlohmann::json(x).dump() << "\n";
}

// ---- Synthetic generators ------------------------------------------------

inline uint64_t random_value(Rng& rng, uint32_t ell) {
    return ell == 64 ? rng.next_u64() : rng.next_u64() & ((uint64_t(1) << ell) - 1);
}

inline DecisionTree gen_complete(uint32_t depth, uint32_t n, uint32_t ell, Rng& rng) {
    DecisionTree t;
    t.n_features = n;
    std::function<int32_t(uint32_t)> build = [&](uint32_t d) -> int32_t {
        int32_t my = int32_t(t.nodes.size());
        t.nodes.push_back({});
        if (d == 0) {
            t.nodes[size_t(my)] = {true, 0, 0, -1, -1, random_value(rng, ell)};
            return my;
        }
        t.nodes[size_t(my)] = {false, random_value(rng, ell), uint32_t(rng.below(n)), -1, -1, 0};
        t.nodes[size_t(my)].left = build(d - 1);
        t.nodes[size_t(my)].right = build(d - 1);
        return my;
    };
    build(depth);
    t.validate();
    return t;
}

// Tree with exactly `m` nodes and longest path exactly `depth`: a depth-d
// spine plus random leaf expansions strictly above depth d. A single
// pass-through node absorbs an even m.
inline DecisionTree gen_sized(uint32_t depth, uint64_t m, uint32_t n, uint32_t ell, Rng& rng) {
    bool passthrough = m % 2 == 0;
    uint64_t m_odd = passthrough ? m - 1 : m;
    if (depth < 1 || m_odd < 2 * uint64_t(depth) + 1)
        throw ConfigInvalid("gen_sized: m too small for the requested depth");
    DecisionTree t;
    t.n_features = n;
    auto mk_leaf = [&]() {
        t.nodes.push_back({true, 0, 0, -1, -1, random_value(rng, ell)});
        return int32_t(t.nodes.size() - 1);
    };
    auto mk_internal = [&]() {
        t.nodes.push_back({false, random_value(rng, ell), uint32_t(rng.below(n)), -1, -1, 0});
        return int32_t(t.nodes.size() - 1);
    };
    // spine
    std::vector<std::pair<int32_t, uint32_t>> expandable;  // (leaf index, depth)
    int32_t cur = mk_internal();
    for (uint32_t d = 1; d <= depth; ++d) {
        bool last = d == depth;
        int32_t side = mk_leaf();
        if (d < depth) expandable.push_back({side, d});
        int32_t next = last ? mk_leaf() : mk_internal();
        bool go_left = rng.next_bit();
        t.nodes[size_t(cur)].left = go_left ? next : side;
        t.nodes[size_t(cur)].right = go_left ? side : next;
        cur = next;
    }
    // grow to size by expanding shallow leaves
    while (t.node_count() < m_odd) {
        if (expandable.empty()) throw ConfigInvalid("gen_sized: no expandable leaf left");
        size_t pick = rng.below(expandable.size());
        auto [leaf, d] = expandable[pick];
        expandable.erase(expandable.begin() + long(pick));
        int32_t l = mk_leaf(), r = mk_leaf();
        TreeNode& nd = t.nodes[size_t(leaf)];  // after any reallocation
        nd.leaf = false;
        nd.threshold = random_value(rng, ell);
        nd.feature = uint32_t(rng.below(n));
        nd.left = l;
        nd.right = r;
        if (d + 1 < depth) {
            expandable.push_back({l, d + 1});
            expandable.push_back({r, d + 1});
        }
    }
    if (passthrough) {
        // splice a pass-through above a strictly shallow leaf
        int32_t target = -1;
        std::function<void(int32_t, uint32_t)> find = [&](int32_t i, uint32_t d) {
            if (target >= 0) return;
            const TreeNode& nd = t.nodes[size_t(i)];
            if (nd.leaf) {
                if (d < depth) target = i;
                return;
            }
            find(nd.left, d + 1);
            if (nd.right != nd.left) find(nd.right, d + 1);
        };
        find(0, 0);
        if (target < 0) throw ConfigInvalid("gen_sized: cannot place pass-through node");
        TreeNode leaf_copy = t.nodes[size_t(target)];
        t.nodes.push_back(leaf_copy);
        int32_t moved = int32_t(t.nodes.size() - 1);
        t.nodes[size_t(target)] = {false, random_value(rng, ell), uint32_t(rng.below(n)),
                                   moved, moved, 0};
    }
    t.validate();
    if (t.depth() != depth) throw ConfigInvalid("gen_sized: depth drifted");
    if (t.node_count() != m) throw ConfigInvalid("gen_sized: node count drifted");
    return t;
}

struct Preset {
    const char* name;
    uint32_t n;
    uint32_t d;
    uint64_t m;
};

inline const std::vector<Preset>& table2_presets() {
    static const std::vector<Preset> presets = {
        {"wine", 7, 5, 23},       {"linnerud", 3, 6, 39},  {"breast", 12, 7, 43},
        {"digits", 47, 15, 337},  {"spambase", 57, 17, 171}, {"diabetes", 10, 28, 787},
        {"boston", 13, 30, 851},  {"mnist", 784, 20, 4179},
    };
    return presets;
}

inline const Preset& find_preset(const std::string& name) {
    for (const auto& p : table2_presets())
        if (name == p.name) return p;
    throw ConfigInvalid("unknown tree preset: " + name);
}

inline DecisionTree gen_preset(const std::string& name, uint32_t ell, Rng& rng) {
    const Preset& p = find_preset(name);
    return gen_sized(p.d, p.m, p.n, ell, rng);
}

// Scalability shape: m = 25*d nodes over a small fixed feature space.
inline DecisionTree gen_scalability(uint32_t depth, uint32_t ell, Rng& rng) {
    return gen_sized(depth, uint64_t(25) * depth, 16, ell, rng);
}

inline std::vector<uint64_t> random_features(uint32_t n, uint32_t ell, Rng& rng) {
    std::vector<uint64_t> x(n);
    for (auto& v : x) v = random_value(rng, ell);
    return x;
}

}  // namespace tree
}  // namespace pdte
