#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "cliffrb/clifford.hpp"
#include "cliffrb/gates.hpp"

namespace cliffrb {

class CoverageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Result of an exhaustive weighted search: one optimal sequence per (quotient) group element.
// Cost is lexicographic: summed gate-set weights first (the primary gate count), then total gates.
class DecompositionTable {
public:
    struct Entry {
        std::uint64_t parent = 0;
        std::int32_t gate = -1;  // index into instances(); -1 for the identity
        double primary = 0.0;
        std::uint32_t total = 0;
    };

    DecompositionTable() = default;
    DecompositionTable(std::string gate_set, std::size_t n, bool quotient, std::vector<GateOp> instances,
                       std::vector<double> weights);

    const std::string& gate_set_name() const { return gate_set_; }
    std::size_t n_qubits() const { return n_; }
    bool quotient() const { return quotient_; }
    const std::vector<GateOp>& instances() const { return instances_; }
    const std::vector<double>& weights() const { return weights_; }
    const std::unordered_map<std::uint64_t, Entry>& entries() const { return entries_; }
    std::unordered_map<std::uint64_t, Entry>& mutable_entries() { return entries_; }
    std::size_t size() const { return entries_.size(); }

    std::uint64_t key(const CliffordTableau& c) const { return c.encode64(quotient_); }
    bool contains(const CliffordTableau& c) const { return entries_.count(key(c)) != 0; }
    const Entry& entry(const CliffordTableau& c) const;
    // Optimal gate sequence (first gate applied first) for the element containing c.
    GateSequence sequence(const CliffordTableau& c) const;
    GateSequence sequence_for_key(std::uint64_t key) const;

    // Number of elements per primary cost (costs rounded to integers).
    std::map<long, std::size_t> primary_histogram() const;
    double mean_primary() const;

    // Compact binary form: header, instance list, then fixed-size records sorted by key.
    void save_binary(std::ostream& os) const;
    static DecompositionTable load_binary(std::istream& is);
    // Summary index (gate set, n, quotient, size, histogram) as JSON.
    std::string index_json() const;

private:
    std::string gate_set_;
    std::size_t n_ = 0;
    bool quotient_ = true;
    std::vector<GateOp> instances_;
    std::vector<double> weights_;
    std::unordered_map<std::uint64_t, Entry> entries_;
};

// Dijkstra expansion from the identity over the gate set's instances. n <= 2, or n = 3 in
// quotient mode when allow_large is set. Throws CoverageError if the set does not generate.
DecompositionTable cayley_search(const GateSet& gs, std::size_t n, bool quotient = true, bool allow_large = false);

struct BlockDecomposition {
    // Gates G_1..G_m with G_m ... G_1 C = I; blocks in the order 1q, CZ, CX, 1q, CZ, (1q).
    GateSequence reduction;
    // The inverse of reduction in reverse order; composes to C.
    GateSequence circuit;
    // (block label, number of gates) for each block of reduction, in order.
    std::vector<std::pair<std::string, std::size_t>> blocks;
};

// Reduction of the Choi-Jamiolkowski stabilizer matrix of c to that of the identity using blocks of
// one-qubit gates, CZ and CX. With sign_fix the circuit equals c exactly, otherwise up to a Pauli.
BlockDecomposition block_decompose(const CliffordTableau& c, bool sign_fix = true);

// Upper bound on the gate count of block_decompose: 2n^2 + 7n (at most 9 n^2).
std::size_t block_gate_bound(std::size_t n);

// Shortest sequence of the listed one-qubit gates taking a -> +-to_a and b -> +-to_b
// (a, b anticommuting kinds). Searches up to four gates.
std::vector<std::string> one_qubit_fix(char a, char b, char to_a, char to_b,
                                       const std::vector<std::string>& gates = {"H", "S", "Sdg", "X90", "Xm90",
                                                                                "Y90", "Ym90"});

// Rewrites every gate not in the target set using registered two-qubit rules and searched
// one-qubit replacements; the result equals seq up to a Pauli. Throws UnsupportedGateError.
GateSequence translate_sequence(const GateSequence& seq, const GateSet& target);

// Registered two-qubit rewrite rules: source gate -> replacement on local qubits {0, 1}.
const std::multimap<std::string, GateSequence>& rewrite_rules();

}  // namespace cliffrb
