#include <gtest/gtest.h>

#include "cliffrb/error_sim.hpp"
#include "cliffrb/gates.hpp"
#include "cliffrb/rb_protocol.hpp"

using namespace cliffrb;

namespace {

SimCircuit single_qubit_circuit(std::vector<std::string> labels) {
    SimCircuit c;
    c.n_qubits = 1;
    for (auto& l : labels) c.instructions.push_back({SimInstruction::Kind::Clifford, l, CliffordTableau(1), {}, true});
    c.observables.push_back(PauliOperator::from_string("Z"));
    return c;
}

}  // namespace

TEST(ErrorSim, IdentityChannelIsNoOp) {
    SignListDistribution d(3);
    StabilizerState s(3);
    s.set_observer(&d);
    auto before = d.probabilities();
    propagate_channel(d, s, NoiseChannel::none());
    EXPECT_EQ(d.probabilities(), before);
}

TEST(ErrorSim, DeterministicXFlipsOutcome) {
    ErrorModel m;
    m.per_gate["flip"] = NoiseChannel::pauli(PauliChannel::from_strings(1, {{"X", 1.0}}));
    EXPECT_NEAR(expected_sequence_fidelity(single_qubit_circuit({"flip"}), m), 0.0, 1e-15);
}

TEST(ErrorSim, DepolarizingWrongOutcomeIsHalfStrength) {
    for (double p : {0.01, 0.2, 0.9}) {
        auto m = ErrorModel::depolarizing(p);
        EXPECT_NEAR(1.0 - expected_sequence_fidelity(single_qubit_circuit({"step"}), m), p / 2, 1e-15);
    }
}

TEST(ErrorSim, ErrorFreeSequenceHasUnitFidelity) {
    ProtocolSpec ps;
    ps.n_qubits = 3;
    for (std::size_t l : {1, 5, 20}) {
        auto seq = generate_sequence(ps, l, 0, 9);
        EXPECT_DOUBLE_EQ(expected_sequence_fidelity(to_sim_circuit(seq), ErrorModel{}), 1.0);
    }
}

TEST(ErrorSim, NormalizationPreserved) {
    Rng rng(1);
    SignListDistribution d(4);
    StabilizerState s(4);
    s.set_observer(&d);
    for (int i = 0; i < 30; ++i) {
        s.apply(sample_uniform(4, rng));
        propagate_channel(d, s, NoiseChannel::depolarizing(0.1), {static_cast<std::size_t>(rng() % 4)});
        propagate_channel(d, s, NoiseChannel::pauli(PauliChannel::from_strings(2, {{"XY", 0.05}, {"ZI", 0.1}})), {0, 2});
        EXPECT_NEAR(d.total(), 1.0, 1e-12);
        for (double p : d.probabilities()) EXPECT_GE(p, -1e-15);
    }
}

TEST(ErrorSim, DepolarizingCompositionLaw) {
    ProtocolSpec ps;
    ps.n_qubits = 2;
    auto seq = generate_sequence(ps, 6, 3, 4);
    ErrorModel two;
    two.default_channel = NoiseChannel::depolarizing(0.03);
    SimCircuit c = to_sim_circuit(seq);
    SimCircuit doubled;
    doubled.n_qubits = 2;
    for (auto ins : c.instructions) {
        doubled.instructions.push_back(ins);
        SimInstruction extra{SimInstruction::Kind::Clifford, "extra", CliffordTableau(2), {}, true};
        doubled.instructions.push_back(extra);
    }
    doubled.observables = c.observables;
    doubled.ideal_outcomes = c.ideal_outcomes;
    two.per_gate["extra"] = NoiseChannel::depolarizing(0.05);
    auto one = ErrorModel::depolarizing(1.0 - 0.97 * 0.95);
    EXPECT_NEAR(expected_sequence_fidelity(doubled, two), expected_sequence_fidelity(c, one), 1e-14);
}

TEST(ErrorSim, FidelityIdenticalAcrossSequencesUnderDepolarizing) {
    ProtocolSpec ps;
    ps.n_qubits = 2;
    auto m = ErrorModel::depolarizing(0.02, 0.03);
    double ref = expected_sequence_fidelity(to_sim_circuit(generate_sequence(ps, 7, 0, 1)), m);
    for (std::size_t i = 1; i < 20; ++i) {
        EXPECT_NEAR(expected_sequence_fidelity(to_sim_circuit(generate_sequence(ps, 7, i, 1)), m), ref, 1e-13);
    }
    double alpha = alpha_for(2);
    EXPECT_NEAR(ref, (1 - alpha) + alpha * (1 - 0.03) * std::pow(1 - 0.02, 8), 1e-13);
}

TEST(ErrorSim, AverageOverSequencesMatchesDecayFormula) {
    ProtocolSpec ps;
    ps.n_qubits = 1;
    auto m = ErrorModel::depolarizing(0.05, 0.02);
    for (std::size_t l : {1, 4, 10}) {
        double sum = 0.0;
        for (std::size_t i = 0; i < 500; ++i) sum += expected_sequence_fidelity(to_sim_circuit(generate_sequence(ps, l, i, 2)), m);
        double want = 0.5 + 0.5 * (1 - 0.02) * std::pow(1 - 0.05, l + 1);
        EXPECT_NEAR(sum / 500, want, 1e-12);
    }
}

TEST(ErrorSim, ZeroRampReproducesPlainModel) {
    ProtocolSpec ps;
    ps.n_qubits = 2;
    auto seq = generate_sequence(ps, 9, 0, 5);
    auto m = ErrorModel::depolarizing(0.02, 0.01);
    auto ramped = m;
    ramped.ramp_gamma = 0.0;
    EXPECT_EQ(expected_sequence_fidelity(to_sim_circuit(seq), m), expected_sequence_fidelity(to_sim_circuit(seq), ramped));
}

TEST(ErrorSim, RampScalesStrengthPerStep) {
    ErrorModel m = ErrorModel::depolarizing(0.01);
    m.ramp_gamma = 0.5;
    EXPECT_NEAR(m.channel_at("step", 1).strength(), 0.015, 1e-15);
    EXPECT_NEAR(m.channel_at("step", 4).strength(), 0.03, 1e-15);
    m.ramp_factor_two = true;
    EXPECT_NEAR(m.channel_at("step", 4).strength(), 0.06, 1e-15);
}

TEST(ErrorSim, ModelJsonRoundTrip) {
    ErrorModel m = ErrorModel::depolarizing(0.01, 0.02);
    m.per_gate["CX"] = NoiseChannel::pauli(PauliChannel::from_strings(2, {{"XX", 0.01}, {"ZI", 0.002}}));
    m.ramp_gamma = 0.1;
    auto back = ErrorModel::from_json(m.to_json());
    EXPECT_EQ(back.to_json(), m.to_json());
    EXPECT_THROW(ErrorModel::from_json(R"({"default":{"type":"depolarizing","p":1.5}})"), std::invalid_argument);
    EXPECT_THROW(ErrorModel::from_json(R"({"default":{"p":0.1}})"), std::invalid_argument);
}

TEST(ErrorSim, CapExceededThrows) {
    EXPECT_THROW(SignListDistribution(5, 4), ResourceLimitError);
}

TEST(ErrorSim, GateLevelLabelsSelectChannels) {
    ProtocolSpec ps;
    ps.n_qubits = 2;
    ps.decompose = true;
    ps.sim.gate_level = true;
    auto seq = generate_sequence(ps, 3, 0, 8);
    ErrorModel m;
    m.per_gate["CX"] = NoiseChannel::depolarizing(0.05);
    std::size_t cx = 0;
    for (const auto& g : seq.step_gates)
        for (const auto& op : g.gates) cx += op.name == "CX";
    for (const auto& op : seq.inversion_gates.gates) cx += op.name == "CX";
    double f = expected_sequence_fidelity(to_sim_circuit(seq, ps.sim), m);
    if (cx == 0) {
        EXPECT_DOUBLE_EQ(f, 1.0);
    } else {
        EXPECT_LT(f, 1.0);
    }
}
