#pragma once

#include "pdte/sos.hpp"
#include "pdte/tree.hpp"

namespace pdte {

enum class Optimization : uint8_t { None, Cluster, Layered };

inline const char* to_string(Optimization o) {
    switch (o) {
        case Optimization::None: return "none";
        case Optimization::Cluster: return "cluster";
        default: return "layered";
    }
}

struct PdteConfig {
    uint32_t ell = 64;
    uint32_t d_prime = 0;  // 0: use the tree depth (d' = d)
    Optimization opt = Optimization::None;
    uint32_t cluster_q = 2;

    sos::Backend tree_backend = sos::Backend::Prf;
    sos::Backend feature_backend = sos::Backend::Ot;  // feature vectors are low-dimensional
    sos::DeltaMode delta_mode = sos::DeltaMode::Arith;
    std::string prf_id = "lowmc128";
    uint32_t paillier_bits = 2048;
    uint32_t lambda = 40;

    void validate() const {
        if (ell < 1 || ell > 64) throw ConfigInvalid("pdte: ell must be in [1, 64]");
        if (opt == Optimization::Cluster && (cluster_q < 1 || cluster_q > 3))
            throw UnsupportedQ("pdte: cluster q must be in {1, 2, 3}");
    }
};

// The full two-party evaluation: P0 holds the tree, P1 the feature vector,
// P1 learns the label. Setup establishes both selection instances and shares
// the root; eval runs the fixed d' iterations (comparison, mux, tree select)
// and reveals rst to P1. Both logical parties run cooperatively in-process;
// Pair<>-indexed state is party-local.
class PdteProtocol {
public:
    struct Meters {
        uint64_t iterations = 0;
        uint64_t tree_selects = 0;
        uint64_t scanned = 0;  // array elements touched, root share counted as 1
        uint64_t evals = 0;
    };

    // test hook: observe the shared record after every tree select
    std::function<void(uint64_t iteration, const Pair<WordShare>& record)> on_record;

    static PdteProtocol setup(const PdteConfig& cfg, const tree::DecisionTree& t,
                              const std::vector<uint64_t>& features, Channel& ch, Rng& rng) {
        cfg.validate();
        if (features.size() != t.n_features)
            throw ConfigInvalid("pdte setup: feature vector has wrong dimension");
        PdteProtocol p;
        p.cfg_ = cfg;
        ch.set_phase(Phase::Offline);

        switch (cfg.opt) {
            case Optimization::None: p.at_ = tree::encode(t, cfg.ell, rng); break;
            case Optimization::Cluster:
                p.at_ = tree::encode_clustered(t, cfg.cluster_q, cfg.ell, rng);
                break;
            case Optimization::Layered: p.at_ = tree::encode_layered(t, cfg.ell, rng); break;
        }
        p.d_ = p.at_.depth;
        p.d_prime_ = cfg.d_prime ? cfg.d_prime : p.d_;
        if (p.d_prime_ < p.d_) throw ConfigInvalid("pdte setup: d_prime below tree depth");

        // HE instances under one keypair per run
        std::shared_ptr<paillier::Keypair> kp;
        auto he_keypair = [&]() {
            if (!kp) kp = std::make_shared<paillier::Keypair>(
                          paillier::Keypair::generate(cfg.paillier_bits, rng));
            return kp;
        };

        // tree-side SOS instance(s)
        auto tree_cfg = [&](uint64_t m, uint32_t elem_bits) {
            sos::SosConfig sc;
            sc.backend = cfg.tree_backend;
            sc.m = m;
            sc.elem_bits = elem_bits;
            sc.owner = Party::P0;
            sc.delta_mode = cfg.delta_mode;
            sc.prf_id = cfg.prf_id;
            sc.paillier_bits = cfg.paillier_bits;
            sc.lambda = cfg.lambda;
            if (cfg.tree_backend == sos::Backend::He) sc.shared_keypair = he_keypair();
            return sc;
        };
        const uint32_t rec_bits = 5 * cfg.ell;
        switch (cfg.opt) {
            case Optimization::None: {
                std::vector<BitVec> arr;
                for (const auto& r : p.at_.records) arr.push_back(r.pack(cfg.ell));
                p.tree_sos_.push_back(
                    sos::SosInstance::setup(tree_cfg(arr.size(), rec_bits), arr, ch, rng));
                break;
            }
            case Optimization::Cluster: {
                const uint32_t slots = (uint32_t(1) << cfg.cluster_q) - 1;
                std::vector<BitVec> arr;
                for (const auto& cl : p.at_.clusters) {
                    BitVec packed(slots * rec_bits);
                    for (uint32_t s = 0; s < slots; ++s)
                        packed.splice(s * rec_bits, cl[s].pack(cfg.ell));
                    arr.push_back(std::move(packed));
                }
                p.tree_sos_.push_back(
                    sos::SosInstance::setup(tree_cfg(arr.size(), slots * rec_bits), arr, ch, rng));
                break;
            }
            case Optimization::Layered: {
                // one instance per layer 1..d (layer 0 is the shared root)
                for (uint32_t i = 1; i <= p.d_; ++i) {
                    std::vector<BitVec> arr;
                    for (const auto& r : p.at_.layers[i]) arr.push_back(r.pack(cfg.ell));
                    p.tree_sos_.push_back(
                        sos::SosInstance::setup(tree_cfg(arr.size(), rec_bits), arr, ch, rng));
                }
                break;
            }
        }

        // feature-side SOS instance, owned by P1
        {
            sos::SosConfig sc;
            sc.backend = cfg.feature_backend;
            sc.m = features.size();
            sc.elem_bits = cfg.ell;
            sc.owner = Party::P1;
            sc.delta_mode = cfg.delta_mode;
            sc.prf_id = cfg.prf_id;
            sc.paillier_bits = cfg.paillier_bits;
            sc.lambda = cfg.lambda;
            if (cfg.feature_backend == sos::Backend::He) sc.shared_keypair = he_keypair();
            std::vector<BitVec> arr;
            for (uint64_t v : features) arr.push_back(BitVec::from_u64(v, cfg.ell));
            p.feat_sos_ = std::make_unique<sos::SosInstance>(
                sos::SosInstance::setup(sc, arr, ch, rng));
        }

        // P0 shares the starting record (root node / root cluster). The
        // layered layout addresses children by layer position, so its root
        // record comes from layer 0.
        {
            BitVec root;
            switch (cfg.opt) {
                case Optimization::None: root = p.at_.records[0].pack(cfg.ell); break;
                case Optimization::Layered: root = p.at_.layers[0][0].pack(cfg.ell); break;
                case Optimization::Cluster: {
                    const uint32_t slots = (uint32_t(1) << cfg.cluster_q) - 1;
                    BitVec packed(slots * rec_bits);
                    for (uint32_t s = 0; s < slots; ++s)
                        packed.splice(s * rec_bits, p.at_.clusters[0][s].pack(cfg.ell));
                    root = std::move(packed);
                    break;
                }
            }
            BitVec mask = BitVec::random(rng, root.size());
            WireWriter w;
            w.bits(mask);
            ch.send(Party::P0, w.take());
            ch.flush_round();
            BitVec p1_share = WireReader(ch.recv(Party::P1)).bits(root.size());
            p.root_share_ = {WordShare(root ^ mask), WordShare(p1_share)};
            p.meters_.scanned += 1;
        }
        ch.set_phase(Phase::Online);
        return p;
    }

    // Exact per-evaluation correlation budget, for provisioning.
    dealer::Budget eval_budget() const {
        dealer::Budget b;
        const uint32_t ell = cfg_.ell;
        const Circuit& cmp = gmw::less_than_circuit(ell);
        auto add_iteration_head = [&](dealer::Budget& bb) {
            // feature select on v, comparison, and is followed by some mux
            bb.merge(feat_sos_->select_budget(ell));
            bb.add_triples(cmp.and_count);
        };
        switch (cfg_.opt) {
            case Optimization::None: {
                dealer::Budget per;
                add_iteration_head(per);
                per.add_triples(ell);  // mux over the index word
                per.merge(tree_sos_[0].select_budget(ell));
                per.scale(d_prime_);
                b.merge(per);
                break;
            }
            case Optimization::Cluster: {
                const uint32_t q = cfg_.cluster_q;
                const uint32_t rec_bits = 5 * ell;
                uint64_t steps = (d_prime_ + q - 1) / q;
                dealer::Budget per;
                for (uint32_t j = 0; j < q; ++j) {
                    add_iteration_head(per);
                    if (j + 1 < q) {
                        uint32_t sub_bits = ((uint32_t(1) << (q - j - 1)) - 1) * rec_bits;
                        per.add_triples(sub_bits);  // subtree mux
                    } else {
                        per.add_triples(ell);  // boundary mux over cluster ids
                    }
                }
                per.merge(tree_sos_[0].select_budget(ell));
                per.scale(steps);
                b.merge(per);
                break;
            }
            case Optimization::Layered: {
                for (uint64_t i = 1; i <= d_prime_; ++i) {
                    dealer::Budget per;
                    add_iteration_head(per);
                    per.add_triples(ell);
                    per.merge(tree_sos_[size_t(std::min<uint64_t>(i, d_) - 1)].select_budget(ell));
                    b.merge(per);
                }
                break;
            }
        }
        b.add_triples(0);
        return b;
    }

    // One full evaluation; returns the label revealed to P1.
    uint64_t eval(Pair<CorrelationStore*> cs, Channel& ch, Rng& rng) {
        const uint32_t ell = cfg_.ell;
        Pair<WordShare> state = root_share_;

        auto field = [&](const Pair<WordShare>& rec, int which) {
            return slice(rec, uint32_t(which) * ell, ell);
        };
        auto compare_and_pick = [&](const Pair<WordShare>& rec) {
            // b <- x[v] < t, per Algorithm-1 routing (b = 1 goes left)
            auto xv = feat_sos_->select(field(rec, 3), cs, ch, rng);
            auto b = gmw::secure_less_than(xv, field(rec, 0), cs, ch);
            return b;
        };

        Pair<WordShare> rst = field(state, 4);
        switch (cfg_.opt) {
            case Optimization::None: {
                for (uint64_t i = 0; i < d_prime_; ++i) {
                    auto b = compare_and_pick(state);
                    auto idx = gmw::mux_select(b, field(state, 1), field(state, 2), cs, ch);
                    state = tree_sos_[0].select(idx, cs, ch, rng);
                    rst = field(state, 4);
                    ++meters_.iterations;
                    if (on_record) on_record(i + 1, state);
                }
                break;
            }
            case Optimization::Cluster: {
                const uint32_t q = cfg_.cluster_q;
                const uint32_t rec_bits = 5 * ell;
                uint64_t steps = (d_prime_ + q - 1) / q;
                for (uint64_t s = 0; s < steps; ++s) {
                    Pair<WordShare> sub = state;  // 2^q - 1 records
                    for (uint32_t j = 0; j < q; ++j) {
                        Pair<WordShare> cur = slice(sub, 0, rec_bits);
                        auto b = compare_and_pick(cur);
                        if (j + 1 < q) {
                            uint32_t sub_bits = (sub[0].width() - rec_bits) / 2;
                            auto left = slice(sub, rec_bits, sub_bits);
                            auto right = slice(sub, rec_bits + sub_bits, sub_bits);
                            sub = gmw::mux_select(b, left, right, cs, ch);
                            rst = slice(sub, 4 * ell, ell);
                        } else {
                            auto idx =
                                gmw::mux_select(b, slice(cur, ell, ell), slice(cur, 2 * ell, ell),
                                                cs, ch);
                            state = tree_sos_[0].select(idx, cs, ch, rng);
                            rst = slice(state, 4 * ell, ell);
                        }
                        ++meters_.iterations;
                    }
                }
                break;
            }
            case Optimization::Layered: {
                for (uint64_t i = 1; i <= d_prime_; ++i) {
                    auto b = compare_and_pick(state);
                    auto idx = gmw::mux_select(b, field(state, 1), field(state, 2), cs, ch);
                    state = tree_sos_[size_t(std::min<uint64_t>(i, d_) - 1)].select(idx, cs, ch, rng);
                    rst = field(state, 4);
                    ++meters_.iterations;
                    if (on_record) on_record(i, state);
                }
                break;
            }
        }
        // P0 sends its rst share; P1 reconstructs the label
        BitVec label = gmw::reveal_to(Party::P1, rst, ch);
        ++meters_.evals;
        refresh_meters();
        return label.to_u64();
    }

    const Meters& meters() {
        refresh_meters();
        return meters_;
    }

    uint32_t tree_depth() const { return d_; }
    uint32_t d_prime() const { return d_prime_; }
    const tree::EncodedTree& encoded() const { return at_; }
    const std::vector<sos::SosInstance>& tree_instances() const { return tree_sos_; }
    const sos::SosInstance& feature_instance() const { return *feat_sos_; }

private:
    void refresh_meters() {
        meters_.tree_selects = 0;
        uint64_t scanned = 1;  // the shared root
        for (const auto& inst : tree_sos_) {
            meters_.tree_selects += inst.stats().selects;
            scanned += inst.stats().scanned;
        }
        meters_.scanned = scanned;
    }

    PdteConfig cfg_;
    tree::EncodedTree at_;
    uint32_t d_ = 0;
    uint32_t d_prime_ = 0;
    std::vector<sos::SosInstance> tree_sos_;
    std::unique_ptr<sos::SosInstance> feat_sos_;
    Pair<WordShare> root_share_;
    Meters meters_;
};

}  // namespace pdte
