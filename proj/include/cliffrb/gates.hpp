#pragma once

#include <map>
#include <string>
#include <vector>

#include "cliffrb/clifford.hpp"
#include "cliffrb/dense.hpp"

namespace cliffrb {

class UnsupportedGateError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct GateDefinition {
    std::string name;
    std::vector<std::string> aliases;
    std::size_t arity = 1;
    CliffordTableau tableau;
    CliffordTableau inverse_tableau;
    Matrix dense;
};

// Registry of named gates; every entry's tableau is checked against its dense matrix.
class GateLibrary {
public:
    void register_gate(GateDefinition def);
    const GateDefinition& get(const std::string& name) const;
    bool contains(const std::string& name) const;
    std::vector<std::string> names() const;

private:
    std::vector<GateDefinition> gates_;
    std::map<std::string, std::size_t> index_;
};

// Named standard gates: I, X, Y, Z, X90 (X(pi/2)), S (Z(pi/2), P), T (PH), H, CX, CZ, MS, G,
// plus the rotation variants Xm90, Y90, Ym90, Sdg and SWAP.
const GateLibrary& builtin_gates();

// Name of a registered one-qubit gate taking Pauli kind `from` to +-`to` (empty if equal).
const std::string& one_qubit_map_gate(char from, char to);

// Composed tableau of a gate sequence (first gate applied first).
CliffordTableau sequence_tableau(const GateSequence& seq);
// Dense unitary of a gate sequence, n <= 3.
Matrix sequence_unitary(const GateSequence& seq);
// Sequence of inverse gates in reverse order; inverses use the registered tableaux.
GateSequence inverse_sequence(const GateSequence& seq);
// Name of the registered gate whose tableau inverts `name` (the gate itself for involutions).
const std::string& inverse_gate_name(const std::string& name);

struct GateSetEntry {
    std::string gate;
    // "each": every qubit (one-qubit gates) or every ordered pair (two-qubit gates);
    // "all-pairs": every unordered pair in ascending order; "explicit": the listed qubit tuples.
    std::string pattern = "each";
    std::vector<std::vector<std::size_t>> qubits;
    double weight = 1.0;
};

struct GateSet {
    std::string name;
    std::vector<GateSetEntry> entries;

    // Concrete gate instances on n qubits with their weights.
    std::vector<std::pair<GateOp, double>> instances(std::size_t n) const;

    static GateSet from_json(const std::string& text);
    std::string to_json() const;
};

// Named gate sets: "1q-clifford+cx" (all 24 one-qubit Cliffords via generators plus CX),
// "pi2" ({X(+-pi/2), Y(+-pi/2)} per qubit), "pi2+G" and "pi2+ms".
GateSet builtin_gate_set(const std::string& name);

// True iff the closure of the gate set's instances is all of C_n (or of the quotient).
bool generates_clifford_group(const GateSet& gs, std::size_t n, bool quotient = false);

}  // namespace cliffrb
