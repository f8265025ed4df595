#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cliffrb/clifford.hpp"
#include "cliffrb/error_sim.hpp"
#include "cliffrb/gates.hpp"
#include "cliffrb/rb_analysis.hpp"

namespace cliffrb {

// Distribution over distinct tableaux with probabilities summing to 1.
class StepDistribution {
public:
    StepDistribution() = default;
    // Merges duplicate tableaux; throws if any weight is negative or the total is not 1.
    explicit StepDistribution(std::vector<std::pair<CliffordTableau, double>> items);

    const std::vector<std::pair<CliffordTableau, double>>& items() const { return items_; }
    std::size_t n_qubits() const { return n_; }
    std::size_t size() const { return items_.size(); }
    // Optional gate names for each item, used to label noisy steps.
    const std::vector<std::string>& labels() const { return labels_; }
    void set_labels(std::vector<std::string> labels);

    const CliffordTableau& sample(Rng& rng, std::size_t* index = nullptr) const;

    // Uniform over the 4^n Pauli tableaux.
    static StepDistribution uniform_paulis(std::size_t n);
    // Gate-set instances with probabilities proportional to their weights (unit weight if all are zero).
    static StepDistribution from_gate_set(const GateSet& gs, std::size_t n);
    // Distribution of b o a with a ~ first, b ~ second.
    static StepDistribution convolve(const StepDistribution& first, const StepDistribution& second);

private:
    std::size_t n_ = 0;
    std::vector<std::pair<CliffordTableau, double>> items_;
    std::vector<std::string> labels_;
    std::vector<double> cumulative_;
};

// Pauli part and computational part of an approximate-twirl step: the Pauli is applied first.
struct ApproximateStep {
    StepDistribution pauli_part;
    StepDistribution computational;

    // Uniform one-qubit Paulis followed by X(+-pi/2) or Y(+-pi/2), each with probability 1/4.
    static ApproximateStep knill_1q();
};

struct RBSequence {
    std::string protocol = "exact";
    std::size_t n_qubits = 0;
    std::size_t length = 0;
    std::vector<CliffordTableau> steps;
    // Error-model label of each step: "step", or the interleaved gate's label.
    std::vector<std::string> step_labels;
    // Gate-level decomposition of each step (empty when not decomposed).
    std::vector<GateSequence> step_gates;
    CliffordTableau inversion;
    GateSequence inversion_gates;
    PauliOperator final_pauli;
    // Exact mode: one bit per qubit. Partial mode: one parity bit over measured_qubits.
    std::vector<bool> ideal_outcomes;
    std::vector<std::size_t> measured_qubits;
    bool parity_mode = false;
    std::uint64_t seed = 0;
    std::size_t seq_index = 0;

    // Product of all steps (first step applied first).
    CliffordTableau step_product() const;
    // Everything including the inversion.
    CliffordTableau total() const;
    // Observables measured at the end (Z on each qubit, or Z over the measured set).
    std::vector<PauliOperator> observables() const;

    std::string to_json() const;
    static RBSequence from_json(const std::string& text);
};

RBSequence gen_exact_sequence(std::size_t n, std::size_t length, Rng& rng);
// Steps C_1, g, C_2, g, ..., C_l, g; the random draws match gen_exact_sequence with the same rng.
RBSequence gen_interleaved_sequence(std::size_t n, std::size_t length, const CliffordTableau& g, Rng& rng,
                                    const std::string& g_label = "g");
// Steps (computational o Pauli); partial inversion from a random non-identity stabilizer.
RBSequence gen_approximate_sequence(const ApproximateStep& dist, std::size_t length, Rng& rng);

// Fills step_gates and inversion_gates with block decompositions (kept when already present).
void decompose_steps(RBSequence& seq);

struct SimulationOptions {
    // Expand decomposed steps into gates labelled by gate name.
    bool gate_level = false;
    // Label of the inversion instruction; "step" uses the default channel.
    std::string inversion_label = "step";
    bool noisy_inversion = true;
};

SimCircuit to_sim_circuit(const RBSequence& seq, const SimulationOptions& opt = {});

struct ExperimentDesign {
    std::vector<std::size_t> lengths;
    // One entry per length, or a single entry used for all lengths.
    std::vector<std::size_t> sequences_per_length;
    std::size_t shots = 100;
    std::uint64_t master_seed = 0;

    void validate() const;
    std::size_t sequences_at(std::size_t i) const;
};

struct ProtocolSpec {
    // "exact", "interleaved" or "approximate".
    std::string tag = "exact";
    std::size_t n_qubits = 1;
    std::optional<CliffordTableau> interleaved_gate;
    std::string interleaved_label = "g";
    std::optional<ApproximateStep> approximate;
    bool decompose = false;
    SimulationOptions sim;
};

// Sequence index within a length, seeded by derive_seed(master, tag, length, index).
RBSequence generate_sequence(const ProtocolSpec& protocol, std::size_t length, std::size_t index,
                             std::uint64_t master_seed);

RBDataset run_experiment(const ExperimentDesign& design, const ProtocolSpec& protocol, const ErrorModel& model,
                         std::size_t threads = 1, std::size_t cap = kDefaultSignListCap);

// Largest l with sqrt(F(1-F)/(n_e n_l)) < alpha (1 - eps/alpha)^l, F = 1 - alpha + alpha (1 - eps/alpha)^l.
std::size_t max_useful_length(double eps_est, std::size_t n, std::size_t n_e, std::size_t n_l);

}  // namespace cliffrb
