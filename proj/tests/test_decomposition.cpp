#include <gtest/gtest.h>

#include <sstream>

#include "cliffrb/clifford.hpp"
#include "cliffrb/decomposition.hpp"
#include "cliffrb/gates.hpp"

using namespace cliffrb;

namespace {

const DecompositionTable& cx_table() {
    static const DecompositionTable t = cayley_search(builtin_gate_set("1q-clifford+cx"), 2, true);
    return t;
}

std::size_t two_qubit_gates(const GateSequence& s) {
    std::size_t k = 0;
    for (const auto& g : s.gates) k += g.qubits.size() == 2;
    return k;
}

}  // namespace

TEST(Decomposition, CxHistograms) {
    auto t1 = cayley_search(builtin_gate_set("1q-clifford+cx"), 1, true);
    EXPECT_EQ(t1.size(), 6u);
    EXPECT_EQ(t1.primary_histogram(), (std::map<long, std::size_t>{{0, 6}}));
    EXPECT_EQ(cx_table().size(), 720u);
    EXPECT_EQ(cx_table().primary_histogram(), (std::map<long, std::size_t>{{0, 36}, {1, 324}, {2, 324}, {3, 36}}));
    EXPECT_DOUBLE_EQ(cx_table().mean_primary(), 1.5);
}

TEST(Decomposition, CzGateSetHasSameCounts) {
    auto t = cayley_search(builtin_gate_set("1q-clifford+cz"), 2, true);
    EXPECT_EQ(t.primary_histogram(), cx_table().primary_histogram());
}

TEST(Decomposition, SequencesReproduceElements) {
    for (const auto& c : enumerate_group(2, true)) {
        auto seq = cx_table().sequence(c);
        EXPECT_EQ(sequence_tableau(seq).encode64(true), c.encode64(true));
        EXPECT_EQ(static_cast<double>(two_qubit_gates(seq)), cx_table().entry(c).primary);
    }
}

TEST(Decomposition, InverseHasEqualCost) {
    for (const auto& c : enumerate_group(2, true)) {
        EXPECT_EQ(cx_table().entry(c).primary, cx_table().entry(clifford_inverse(c)).primary);
    }
}

TEST(Decomposition, PulseSearchReachesFullOneQubitGroup) {
    auto t = cayley_search(builtin_gate_set("pi2"), 1, false);
    EXPECT_EQ(t.size(), 24u);
    for (const auto& c : enumerate_group(1, false)) EXPECT_EQ(sequence_tableau(t.sequence(c)), c);
    EXPECT_TRUE(t.sequence(CliffordTableau(1)).gates.empty());
}

TEST(Decomposition, CoverageErrorForNonGeneratingSet) {
    GateSet gs;
    gs.name = "phase-only";
    gs.entries.push_back(GateSetEntry{"S", "each", {}, 1.0});
    EXPECT_THROW(cayley_search(gs, 1, true), CoverageError);
    EXPECT_THROW(cayley_search(builtin_gate_set("1q-clifford+cx"), 3, false), ResourceLimitError);
}

TEST(Decomposition, BinaryRoundTrip) {
    std::stringstream buf;
    cx_table().save_binary(buf);
    auto back = DecompositionTable::load_binary(buf);
    EXPECT_EQ(back.size(), cx_table().size());
    EXPECT_EQ(back.index_json(), cx_table().index_json());
    for (const auto& c : enumerate_group(2, true)) {
        EXPECT_EQ(back.sequence(c).gates.size(), cx_table().sequence(c).gates.size());
        EXPECT_EQ(sequence_tableau(back.sequence(c)).encode64(true), c.encode64(true));
    }
    std::stringstream bad("not a table");
    EXPECT_ANY_THROW(DecompositionTable::load_binary(bad));
}

TEST(Decomposition, BlockCircuitEqualsInput) {
    Rng rng(3);
    for (std::size_t n = 1; n <= 6; ++n) {
        for (int i = 0; i < 30; ++i) {
            auto c = sample_uniform(n, rng);
            auto bd = block_decompose(c);
            EXPECT_EQ(sequence_tableau(bd.circuit), c);
            GateSequence both = bd.reduction;
            both.n_qubits = n;
            both.gates.insert(both.gates.begin(), bd.circuit.gates.begin(), bd.circuit.gates.end());
            EXPECT_TRUE(sequence_tableau(both).is_identity());
            EXPECT_LE(bd.reduction.gates.size(), block_gate_bound(n));
            auto loose = block_decompose(c, false);
            EXPECT_EQ(sequence_tableau(loose.circuit).unsigned_representative(), c.unsigned_representative());
        }
    }
}

TEST(Decomposition, BlockOrderAndContents) {
    Rng rng(5);
    const std::vector<std::string> order = {"1q", "CZ", "CX", "1q", "CZ", "1q"};
    for (int i = 0; i < 50; ++i) {
        auto bd = block_decompose(sample_uniform(4, rng));
        ASSERT_LE(bd.blocks.size(), order.size());
        std::size_t pos = 0, total = 0;
        for (std::size_t b = 0; b < bd.blocks.size(); ++b) {
            EXPECT_EQ(bd.blocks[b].first, order[b]);
            for (std::size_t k = 0; k < bd.blocks[b].second; ++k, ++pos) {
                const auto& g = bd.reduction.gates[pos];
                if (order[b] == "1q") EXPECT_EQ(g.qubits.size(), 1u);
                else EXPECT_EQ(g.name, order[b]);
            }
            total += bd.blocks[b].second;
        }
        EXPECT_EQ(total, bd.reduction.gates.size());
    }
}

TEST(Decomposition, BlockNeverBeatsOptimal) {
    for (const auto& c : enumerate_group(2, true)) {
        auto bd = block_decompose(c);
        EXPECT_GE(static_cast<double>(two_qubit_gates(bd.circuit)), cx_table().entry(c).primary);
    }
}

TEST(Decomposition, IdentityHasEmptyBlockCircuit) {
    for (std::size_t n = 1; n <= 5; ++n) EXPECT_TRUE(block_decompose(CliffordTableau(n)).circuit.gates.empty());
}

TEST(Decomposition, TranslateToPulseSets) {
    for (const char* target : {"pi2+ms", "pi2+G"}) {
        auto ts = builtin_gate_set(target);
        std::set<std::string> allowed;
        for (const auto& e : ts.entries) allowed.insert(e.gate);
        Rng rng(9);
        for (int i = 0; i < 20; ++i) {
            auto c = sample_uniform(3, rng);
            auto bd = block_decompose(c);
            auto tr = translate_sequence(bd.circuit, ts);
            for (const auto& g : tr.gates) EXPECT_TRUE(allowed.count(g.name)) << g.name;
            EXPECT_EQ(sequence_tableau(tr).unsigned_representative(), c.unsigned_representative());
        }
    }
}

TEST(Decomposition, OneQubitFix) {
    auto gates = one_qubit_fix('X', 'Z', 'Z', 'X');
    GateSequence s;
    s.n_qubits = 1;
    for (const auto& g : gates) s.push(g, {0});
    auto t = sequence_tableau(s);
    EXPECT_EQ(t.apply(PauliOperator::from_string("X")).unsigned_part(), PauliOperator::from_string("Z"));
    EXPECT_EQ(t.apply(PauliOperator::from_string("Z")).unsigned_part(), PauliOperator::from_string("X"));
    EXPECT_LE(gates.size(), 4u);
}
