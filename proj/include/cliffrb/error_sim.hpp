#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cliffrb/clifford.hpp"
#include "cliffrb/pauli.hpp"
#include "cliffrb/stabilizer.hpp"

namespace cliffrb {

inline constexpr std::size_t kDefaultSignListCap = 20;

// Probability distribution over sign-flip patterns of a reference stabilizer state's rows.
// Bit i of an index set means row i has the opposite sign of the reference row.
class SignListDistribution : public RowObserver {
public:
    explicit SignListDistribution(std::size_t n_qubits, std::size_t cap = kDefaultSignListCap);

    std::size_t n_qubits() const { return n_; }
    const std::vector<double>& probabilities() const { return probs_; }
    double probability(std::uint64_t pattern) const { return probs_.at(pattern); }
    double total() const;

    // Mixture of flip patterns: new[s ^ m] += w * old[s] for every (m, w).
    void apply_flips(const std::map<std::uint64_t, double>& pattern_weights);
    // Uniform mixing with weight p: the action of full-register depolarization.
    void depolarize(double p);
    // Probability that the overlap of the flip pattern with masks[k] has parity parities[k] for all k.
    double probability_parities(const std::vector<std::uint64_t>& masks, const std::vector<bool>& parities) const;

    void row_multiplied(std::size_t target, std::size_t source) override;
    void rows_swapped(std::size_t a, std::size_t b) override;
    void row_replaced(std::size_t j) override;

private:
    std::size_t n_;
    std::vector<double> probs_;
};

// Bit i set iff p anticommutes with row i of the state.
std::uint64_t anticommutation_pattern(const StabilizerState& state, const PauliOperator& p);

// Error channel description that is independent of the register size where possible.
class NoiseChannel {
public:
    enum class Kind { Depolarizing, Pauli };

    NoiseChannel() = default;
    static NoiseChannel none() { return depolarizing(0.0); }
    // Depolarizing of strength p on whatever qubits it is applied to.
    static NoiseChannel depolarizing(double p);
    static NoiseChannel pauli(PauliChannel ch);

    Kind kind() const { return kind_; }
    double strength() const { return p_; }
    const PauliChannel& pauli_channel() const { return pauli_; }
    bool is_identity() const;
    // Strength (depolarizing) or every non-identity weight (Pauli) multiplied by factor.
    NoiseChannel scaled(double factor) const;
    // Explicit Pauli channel on k qubits, k <= 12.
    PauliChannel as_pauli_channel(std::size_t k) const;

private:
    Kind kind_ = Kind::Depolarizing;
    double p_ = 0.0;
    PauliChannel pauli_;
};

// Applies ch to the listed qubits (all qubits when empty) of the state's rows.
void propagate_channel(SignListDistribution& dist, const StabilizerState& state, const NoiseChannel& ch,
                       const std::vector<std::size_t>& qubits = {});

struct ErrorModel {
    NoiseChannel default_channel;
    std::map<std::string, NoiseChannel> per_gate;
    // Strength multiplier (1 + gamma t) at step t = 1, 2, ...
    std::optional<double> ramp_gamma;
    // Doubles the ramped step strength, as in the printed time-dependent decay formula.
    bool ramp_factor_two = false;
    // Applied once to the whole register before the final measurement.
    NoiseChannel spam_channel;

    const NoiseChannel& channel_for(const std::string& label) const;
    // Channel for a step with the given label at time t (1-based).
    NoiseChannel channel_at(const std::string& label, std::size_t t) const;

    static ErrorModel depolarizing(double p_step, double p_spam = 0.0);
    static ErrorModel from_json(const std::string& text);
    std::string to_json() const;
};

struct SimInstruction {
    enum class Kind { Clifford, MeasureZ };
    Kind kind = Kind::Clifford;
    // Looked up in ErrorModel::per_gate; "step" selects the default channel.
    std::string label = "step";
    CliffordTableau op;
    // Qubits op acts on; empty means the whole register. For MeasureZ, the measured qubit.
    std::vector<std::size_t> qubits;
    // Whether this instruction advances the ramp clock and is followed by its channel.
    bool noisy = true;
};

struct SimCircuit {
    std::size_t n_qubits = 0;
    std::vector<SimInstruction> instructions;
    // Pauli observables measured at the end; each must be deterministic in the ideal circuit.
    std::vector<PauliOperator> observables;
    // Ideal eigenvalue signs (true = -1) of the observables, filled from the ideal circuit when empty.
    std::vector<bool> ideal_outcomes;
};

// Exact probability that every final observable returns its ideal outcome.
double expected_sequence_fidelity(const SimCircuit& circuit, const ErrorModel& model,
                                  std::size_t cap = kDefaultSignListCap);

// Ideal final outcomes of a circuit (true = eigenvalue -1); throws if any is not deterministic.
std::vector<bool> ideal_outcomes(const SimCircuit& circuit);

}  // namespace cliffrb
