#include <gtest/gtest.h>

#include "cliffrb/dense.hpp"
#include "cliffrb/gates.hpp"

using namespace cliffrb;

namespace {

PauliOperator image(const std::string& gate, const std::string& p) {
    const auto& def = builtin_gates().get(gate);
    return def.tableau.apply(PauliOperator::from_string(p));
}

GateSequence word(std::size_t n, std::initializer_list<std::pair<const char*, std::vector<std::size_t>>> gates) {
    GateSequence s;
    s.n_qubits = n;
    for (const auto& [g, q] : gates) s.push(g, q);
    return s;
}

}  // namespace

TEST(Gates, TableActions) {
    EXPECT_EQ(image("T", "X"), PauliOperator::from_string("Y"));
    EXPECT_EQ(image("T", "Z"), PauliOperator::from_string("X"));
    EXPECT_EQ(image("MS", "ZI"), PauliOperator::from_string("-YX"));
    EXPECT_EQ(image("H", "X"), PauliOperator::from_string("Z"));
    EXPECT_EQ(image("S", "X"), PauliOperator::from_string("Y"));
    EXPECT_EQ(image("X90", "Z"), PauliOperator::from_string("-Y"));
    EXPECT_EQ(image("CX", "XI"), PauliOperator::from_string("XX"));
    EXPECT_EQ(image("CZ", "XI"), PauliOperator::from_string("XZ"));
}

TEST(Gates, EveryEntryMatchesItsDenseMatrix) {
    for (const auto& name : builtin_gates().names()) {
        const auto& def = builtin_gates().get(name);
        EXPECT_EQ(tableau_from_unitary(def.dense), def.tableau) << name;
        EXPECT_EQ(clifford_compose(def.inverse_tableau, def.tableau), CliffordTableau(def.arity)) << name;
    }
}

TEST(Gates, AliasesResolve) {
    EXPECT_EQ(builtin_gates().get("CNOT").name, "CX");
    EXPECT_EQ(builtin_gates().get("X(pi/2)").name, "X90");
    EXPECT_EQ(builtin_gates().get("PH").name, "T");
    EXPECT_THROW(builtin_gates().get("RZ"), UnsupportedGateError);
}

TEST(Gates, RotationVariantsAreDistinctGates) {
    EXPECT_NE(builtin_gates().get("X90").tableau, builtin_gates().get("Xm90").tableau);
    EXPECT_EQ(builtin_gates().get("X90").tableau.unsigned_representative(),
              builtin_gates().get("Xm90").tableau.unsigned_representative());
}

TEST(Gates, GGateIdentity) {
    // Y1(pi/2) Y2(pi/2) MS Y1(-pi/2) Y2(-pi/2), first gate applied first, against Z1(pi/2) Z2(pi/2) CZ.
    auto lhs = word(2, {{"Ym90", {0}}, {"Ym90", {1}}, {"MS", {0, 1}}, {"Y90", {0}}, {"Y90", {1}}});
    auto rhs = word(2, {{"CZ", {0, 1}}, {"S", {0}}, {"S", {1}}});
    EXPECT_TRUE(equal_up_to_phase(sequence_unitary(lhs), sequence_unitary(rhs)));
    EXPECT_TRUE(equal_up_to_phase(sequence_unitary(word(2, {{"G", {0, 1}}})), sequence_unitary(rhs)));
}

TEST(Gates, CZIsConjugatedCX) {
    auto lhs = word(2, {{"H", {1}}, {"CX", {0, 1}}, {"H", {1}}});
    EXPECT_EQ(sequence_tableau(lhs), builtin_gates().get("CZ").tableau);
}

TEST(Gates, InverseSequenceUndoes) {
    auto w = word(3, {{"H", {0}}, {"CX", {0, 2}}, {"X90", {1}}, {"MS", {1, 2}}, {"T", {0}}});
    GateSequence both = w;
    both.append(inverse_sequence(w));
    EXPECT_TRUE(sequence_tableau(both).is_identity());
}

TEST(Gates, Generation) {
    EXPECT_TRUE(generates_clifford_group(builtin_gate_set("pi2"), 1));
    EXPECT_TRUE(generates_clifford_group(builtin_gate_set("pi2+G"), 2));
    EXPECT_TRUE(generates_clifford_group(builtin_gate_set("1q-clifford+cx"), 2));
    GateSet only_s;
    only_s.name = "s";
    only_s.entries.push_back(GateSetEntry{"S", "each", {}, 1.0});
    EXPECT_FALSE(generates_clifford_group(only_s, 1));
    EXPECT_THROW(generates_clifford_group(builtin_gate_set("pi2"), 3), ResourceLimitError);
}

TEST(Gates, GateSetJsonRoundTripAndPatterns) {
    auto gs = GateSet::from_json(R"({"name":"mine","gates":[{"gate":"H","qubits":"each","weight":0},
        {"gate":"CZ","qubits":"all-pairs","weight":1},{"gate":"CX","qubits":[[2,0]],"weight":2}]})");
    auto inst = gs.instances(3);
    EXPECT_EQ(inst.size(), 3u + 3u + 1u);
    EXPECT_EQ(inst.back().first.qubits, (std::vector<std::size_t>{2, 0}));
    EXPECT_EQ(inst.back().second, 2.0);
    auto again = GateSet::from_json(gs.to_json());
    EXPECT_EQ(again.instances(3).size(), inst.size());
    EXPECT_THROW(GateSet::from_json(R"({"name":"x","gates":[{"gate":"H","weight":-1}]})"), std::invalid_argument);
    EXPECT_THROW(GateSet::from_json(R"({"name":"x","gates":[{"gate":"Q"}]})"), UnsupportedGateError);
}

TEST(Gates, SequenceValidation) {
    EXPECT_ANY_THROW(sequence_tableau(word(2, {{"CX", {0, 0}}})));
    EXPECT_ANY_THROW(sequence_tableau(word(2, {{"H", {2}}})));
}
