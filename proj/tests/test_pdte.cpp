#include <catch2/catch_amalgamated.hpp>

#include "pdte/pdte.hpp"

using namespace pdte;

namespace {

Pair<CorrelationStore*> ptrs(Pair<CorrelationStore>& cs) { return {&cs[0], &cs[1]}; }

struct Run {
    Rng rng;
    Channel ch;
    PdteProtocol proto;
    Pair<CorrelationStore> cs;

    Run(const PdteConfig& cfg, const tree::DecisionTree& t, const std::vector<uint64_t>& x,
        uint64_t seed, uint64_t evals = 1)
        : rng(seed), proto(PdteProtocol::setup(cfg, t, x, ch, rng)) {
        dealer::Budget b = proto.eval_budget();
        b.scale(evals);
        Rng drng(seed ^ 0xdeadbeef);
        cs = dealer::deal(b, dealer::WbvMode::Direct, drng);
        for (int p = 0; p < 2; ++p)
            ch.transcript().add_correlation_bytes(Party(p), 1);  // provisioning marker
    }

    uint64_t eval() { return proto.eval(ptrs(cs), ch, rng); }
};

PdteConfig toy_cfg(sos::Backend tree_be, Optimization opt = Optimization::None,
                   uint32_t q = 2) {
    PdteConfig cfg;
    cfg.ell = 16;
    cfg.opt = opt;
    cfg.cluster_q = q;
    cfg.tree_backend = tree_be;
    cfg.feature_backend = sos::Backend::Ot;
    cfg.prf_id = "toy16";
    cfg.paillier_bits = 256;
    return cfg;
}

}  // namespace

TEST_CASE("single-leaf tree reveals its label to P1 for any input") {
    tree::DecisionTree t;
    t.n_features = 2;
    t.nodes.push_back({true, 0, 0, -1, -1, 77});
    PdteConfig cfg = toy_cfg(sos::Backend::Prf);
    cfg.d_prime = 3;
    Run run(cfg, t, {5, 9}, 1);
    CHECK(run.eval() == 77);
}

TEST_CASE("wine-shaped tree matches the plaintext oracle across backends") {
    Rng gen(2);
    tree::DecisionTree t = tree::gen_preset("wine", 16, gen);
    for (sos::Backend be : {sos::Backend::Ot, sos::Backend::Prf, sos::Backend::He}) {
        PdteConfig cfg = toy_cfg(be);
        for (int i = 0; i < 5; ++i) {
            auto x = tree::random_features(7, 16, gen);
            Run run(cfg, t, x, 100 + i);
            REQUIRE(run.eval() == t.classify(x));
        }
    }
}

TEST_CASE("protocol follows the plaintext walk node by node (session invariant)") {
    Rng gen(3);
    tree::DecisionTree t = tree::gen_preset("linnerud", 16, gen);
    auto x = tree::random_features(3, 16, gen);
    PdteConfig cfg = toy_cfg(sos::Backend::Prf);
    Run run(cfg, t, x, 4);
    CHECK(run.eval() == t.classify(x));
    // the protocol ran d' iterations regardless of the path taken
    CHECK(run.proto.meters().iterations == run.proto.d_prime());
    CHECK(run.proto.meters().tree_selects == run.proto.d_prime());
}

TEST_CASE("d_prime beyond the depth is absorbed by self-loops") {
    Rng gen(4);
    tree::DecisionTree t = tree::gen_preset("wine", 16, gen);
    auto x = tree::random_features(7, 16, gen);
    PdteConfig cfg = toy_cfg(sos::Backend::Prf);
    cfg.d_prime = 9;  // > d = 5
    Run run(cfg, t, x, 5);
    CHECK(run.eval() == t.classify(x));
    CHECK(run.proto.meters().iterations == 9);
}

TEST_CASE("d_prime below the depth is rejected") {
    Rng gen(5);
    tree::DecisionTree t = tree::gen_preset("wine", 16, gen);
    PdteConfig cfg = toy_cfg(sos::Backend::Prf);
    cfg.d_prime = 3;
    Channel ch;
    Rng rng(6);
    CHECK_THROWS_AS(PdteProtocol::setup(cfg, t, tree::random_features(7, 16, rng), ch, rng),
                    ConfigInvalid);
}

TEST_CASE("clustered evaluation: correct labels and ceil(d'/q) tree selects") {
    Rng gen(7);
    for (uint32_t q : {1u, 2u, 3u}) {
        tree::DecisionTree t = tree::gen_preset("breast", 16, gen);
        auto x = tree::random_features(12, 16, gen);
        PdteConfig cfg = toy_cfg(sos::Backend::Prf, Optimization::Cluster, q);
        Run run(cfg, t, x, 20 + q);
        REQUIRE(run.eval() == t.classify(x));
        uint32_t d = run.proto.tree_depth();
        CHECK(run.proto.meters().tree_selects == (d + q - 1) / q);
    }
}

TEST_CASE("clustered q=2 on a depth-8 complete tree meters 4 invocations") {
    Rng gen(8);
    tree::DecisionTree t = tree::gen_complete(8, 4, 16, gen);
    auto x = tree::random_features(4, 16, gen);
    PdteConfig cfg = toy_cfg(sos::Backend::Ot, Optimization::Cluster, 2);
    Run run(cfg, t, x, 9);
    CHECK(run.eval() == t.classify(x));
    CHECK(run.proto.meters().tree_selects == 4);
}

TEST_CASE("layered evaluation: correct labels and exactly m scanned elements") {
    Rng gen(9);
    tree::DecisionTree t = tree::gen_complete(5, 4, 16, gen);
    auto x = tree::random_features(4, 16, gen);
    PdteConfig cfg = toy_cfg(sos::Backend::Prf, Optimization::Layered);
    Run run(cfg, t, x, 10);
    REQUIRE(run.eval() == t.classify(x));
    // scans: 1 (root) + 2 + 4 + ... + 2^d = m exactly
    CHECK(run.proto.meters().scanned == t.node_count());
}

TEST_CASE("flat mode scans d' * m elements (plus the root)") {
    Rng gen(10);
    tree::DecisionTree t = tree::gen_complete(5, 4, 16, gen);
    auto x = tree::random_features(4, 16, gen);
    PdteConfig cfg = toy_cfg(sos::Backend::Prf);
    Run run(cfg, t, x, 11);
    CHECK(run.eval() == t.classify(x));
    CHECK(run.proto.meters().scanned == 1 + uint64_t(run.proto.d_prime()) * t.node_count());
}

TEST_CASE("cluster(3) and layered agree with the oracle over random trees") {
    Rng gen(11);
    for (int trial = 0; trial < 8; ++trial) {
        tree::DecisionTree t = tree::gen_sized(4 + trial % 3, 23 + 2 * (trial % 5), 6, 16, gen);
        auto x = tree::random_features(6, 16, gen);
        {
            PdteConfig cfg = toy_cfg(sos::Backend::Prf, Optimization::Cluster, 3);
            Run run(cfg, t, x, 30 + trial);
            REQUIRE(run.eval() == t.classify(x));
        }
        {
            tree::DecisionTree padded = tree::pad_complete(t, gen);
            PdteConfig cfg = toy_cfg(sos::Backend::Prf, Optimization::Layered);
            Run run(cfg, padded, x, 60 + trial);
            REQUIRE(run.eval() == padded.classify(x));
        }
    }
}

TEST_CASE("budget is exact: the dealt pools end exactly empty") {
    Rng gen(12);
    tree::DecisionTree t = tree::gen_preset("wine", 16, gen);
    auto x = tree::random_features(7, 16, gen);
    for (sos::Backend be : {sos::Backend::Ot, sos::Backend::Prf, sos::Backend::He}) {
        PdteConfig cfg = toy_cfg(be);
        Run run(cfg, t, x, 40 + int(be));
        run.eval();
        // a second evaluation must fail on the first missing correlation
        CHECK_THROWS_AS(run.eval(), CorrelationExhausted);
        CHECK(run.cs[0].triples_left() == 0);
    }
}

TEST_CASE("reusability: two evaluations on one setup, no extra setup bytes") {
    Rng gen(13);
    tree::DecisionTree t = tree::gen_preset("linnerud", 16, gen);
    PdteConfig cfg = toy_cfg(sos::Backend::Prf);
    auto x1 = tree::random_features(3, 16, gen);
    Run run(cfg, t, x1, 14, 2);
    uint64_t offline_after_setup = run.ch.transcript().bytes(Phase::Offline);
    CHECK(run.eval() == t.classify(x1));
    CHECK(run.eval() == t.classify(x1));
    CHECK(run.ch.transcript().bytes(Phase::Offline) == offline_after_setup);
    CHECK(run.proto.meters().evals == 2);
}

TEST_CASE("transcript shape is input-independent (path obliviousness proxy)") {
    Rng gen(14);
    tree::DecisionTree t = tree::gen_preset("wine", 16, gen);
    auto run_with = [&](const std::vector<uint64_t>& x) {
        PdteConfig cfg = toy_cfg(sos::Backend::Prf);
        Run run(cfg, t, x, 999);  // same seed: deterministic protocol randomness
        run.eval();
        std::vector<std::pair<uint64_t, uint64_t>> shape;
        for (const auto& ev : run.ch.transcript().flushes())
            shape.push_back({ev.bytes[0], ev.bytes[1]});
        return shape;
    };
    // two adversarially different inputs: all-low vs all-high features
    auto a = run_with(std::vector<uint64_t>(7, 0));
    auto b = run_with(std::vector<uint64_t>(7, 0xffff));
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) REQUIRE(a[i] == b[i]);
}

TEST_CASE("feature backend can also run prf or he") {
    Rng gen(15);
    tree::DecisionTree t = tree::gen_preset("linnerud", 16, gen);
    auto x = tree::random_features(3, 16, gen);
    for (sos::Backend fb : {sos::Backend::Prf, sos::Backend::He}) {
        PdteConfig cfg = toy_cfg(sos::Backend::Prf);
        cfg.feature_backend = fb;
        Run run(cfg, t, x, 50 + int(fb));
        REQUIRE(run.eval() == t.classify(x));
    }
}

TEST_CASE("ell=64 works end to end") {
    Rng gen(16);
    tree::DecisionTree t = tree::gen_sized(4, 11, 4, 64, gen);
    auto x = tree::random_features(4, 64, gen);
    PdteConfig cfg;
    cfg.ell = 64;
    cfg.tree_backend = sos::Backend::Prf;
    cfg.prf_id = "toy32";
    cfg.paillier_bits = 512;
    Run run(cfg, t, x, 17);
    CHECK(run.eval() == t.classify(x));
}

TEST_CASE("setup bytes: prf tree backend transfers roughly m * elem bytes once") {
    Rng gen(18);
    tree::DecisionTree t = tree::gen_preset("wine", 16, gen);
    auto x = tree::random_features(7, 16, gen);
    PdteConfig cfg = toy_cfg(sos::Backend::Prf);
    Run run(cfg, t, x, 19);
    uint64_t masked_bytes = run.proto.tree_instances()[0].stats().setup_bytes;
    // 23 records of 80 bits (= B*ell_b exactly for toy16), plus framing
    CHECK(masked_bytes >= 23 * 10);
    CHECK(masked_bytes <= 23 * 10 + 16);
    // feature side is OT-based: no setup traffic
    CHECK(run.proto.feature_instance().stats().setup_bytes == 0);
}
