#include "cliffrb/rb_protocol.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <thread>
#include <unordered_map>

#include "cliffrb/decomposition.hpp"
#include "cliffrb/stabilizer.hpp"

namespace cliffrb {

using nlohmann::json;

StepDistribution::StepDistribution(std::vector<std::pair<CliffordTableau, double>> items) {
    if (items.empty()) throw std::invalid_argument("empty step distribution");
    n_ = items.front().first.n_qubits();
    std::unordered_map<CliffordTableau, std::size_t, TableauHash> seen;
    double total = 0.0;
    for (auto& [c, w] : items) {
        if (c.n_qubits() != n_) throw DimensionError("step distribution mixes register sizes");
        if (!(w >= 0.0)) throw std::invalid_argument("negative step probability");
        total += w;
        auto it = seen.find(c);
        if (it != seen.end()) {
            items_[it->second].second += w;
        } else {
            seen.emplace(c, items_.size());
            items_.emplace_back(std::move(c), w);
        }
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("step probabilities do not sum to 1");
    double acc = 0.0;
    for (auto& [c, w] : items_) {
        w /= total;
        acc += w;
        cumulative_.push_back(acc);
    }
    cumulative_.back() = 1.0;
}

void StepDistribution::set_labels(std::vector<std::string> labels) {
    if (labels.size() != items_.size()) throw std::invalid_argument("label count does not match distribution");
    labels_ = std::move(labels);
}

const CliffordTableau& StepDistribution::sample(Rng& rng, std::size_t* index) const {
    if (items_.empty()) throw std::invalid_argument("sampling an empty step distribution");
    double u = uniform01(rng);
    std::size_t i = static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), u) -
                                             cumulative_.begin());
    if (i >= items_.size()) i = items_.size() - 1;
    if (index) *index = i;
    return items_[i].first;
}

StepDistribution StepDistribution::uniform_paulis(std::size_t n) {
    if (n > 6) throw ResourceLimitError("uniform Pauli distribution limited to n <= 6");
    std::size_t count = std::size_t{1} << (2 * n);
    std::vector<std::pair<CliffordTableau, double>> items;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < count; ++i) {
        PauliOperator p = pauli_from_index(n, i);
        items.emplace_back(CliffordTableau::from_pauli(p), 1.0 / static_cast<double>(count));
        labels.push_back("step");
    }
    StepDistribution d(std::move(items));
    d.set_labels(std::move(labels));
    return d;
}

StepDistribution StepDistribution::from_gate_set(const GateSet& gs, std::size_t n) {
    auto inst = gs.instances(n);
    if (inst.empty()) throw std::invalid_argument("gate set has no instances");
    double total = 0.0;
    for (const auto& [op, w] : inst) total += w;
    bool unit = total <= 0.0;
    if (unit) total = static_cast<double>(inst.size());
    std::vector<std::pair<CliffordTableau, double>> items;
    for (const auto& [op, w] : inst) {
        CliffordTableau c = embed(builtin_gates().get(op.name).tableau, op.qubits, n);
        items.emplace_back(std::move(c), (unit ? 1.0 : w) / total);
    }
    StepDistribution d(std::move(items));
    if (d.size() == inst.size()) {
        std::vector<std::string> labels;
        for (const auto& [op, w] : inst) labels.push_back(op.name);
        d.set_labels(std::move(labels));
    }
    return d;
}

StepDistribution StepDistribution::convolve(const StepDistribution& first, const StepDistribution& second) {
    if (first.n_qubits() != second.n_qubits()) throw DimensionError("convolving distributions of different sizes");
    std::vector<std::pair<CliffordTableau, double>> items;
    for (const auto& [a, pa] : first.items()) {
        for (const auto& [b, pb] : second.items()) items.emplace_back(clifford_compose(b, a), pa * pb);
    }
    return StepDistribution(std::move(items));
}

ApproximateStep ApproximateStep::knill_1q() {
    ApproximateStep s;
    s.pauli_part = StepDistribution::uniform_paulis(1);
    std::vector<std::pair<CliffordTableau, double>> comp;
    std::vector<std::string> labels{"X90", "Xm90", "Y90", "Ym90"};
    for (const auto& g : labels) comp.emplace_back(builtin_gates().get(g).tableau, 0.25);
    s.computational = StepDistribution(std::move(comp));
    s.computational.set_labels(labels);
    return s;
}

CliffordTableau RBSequence::step_product() const {
    CliffordTableau u(n_qubits);
    for (const auto& c : steps) u = clifford_compose(c, u);
    return u;
}

CliffordTableau RBSequence::total() const { return clifford_compose(inversion, step_product()); }

std::vector<PauliOperator> RBSequence::observables() const {
    std::vector<PauliOperator> out;
    if (parity_mode) {
        PauliOperator z(n_qubits);
        for (std::size_t q : measured_qubits) z.set(q, 'Z');
        out.push_back(z);
    } else {
        for (std::size_t q = 0; q < n_qubits; ++q) out.push_back(PauliOperator::single(n_qubits, q, 'Z'));
    }
    return out;
}

namespace {

json gates_to_json(const GateSequence& seq) {
    json arr = json::array();
    for (const auto& g : seq.gates) arr.push_back(json{{"gate", g.name}, {"qubits", g.qubits}});
    return arr;
}

GateSequence gates_from_json(const json& j, std::size_t n) {
    GateSequence seq;
    seq.n_qubits = n;
    for (const auto& g : j) seq.push(g.at("gate").get<std::string>(), g.at("qubits").get<std::vector<std::size_t>>());
    return seq;
}

std::vector<bool> final_bits(const RBSequence& seq) {
    StabilizerState st(seq.n_qubits);
    for (const auto& c : seq.steps) st.apply(c);
    st.apply(seq.inversion);
    std::vector<bool> out;
    for (const auto& obs : seq.observables()) {
        auto ev = st.stabilizer_eigenvalue(obs);
        if (!ev) throw std::logic_error("final observable is not deterministic");
        out.push_back(*ev < 0);
    }
    return out;
}

RBSequence close_exact(RBSequence seq, Rng& rng) {
    seq.final_pauli = random_pauli(seq.n_qubits, rng);
    seq.inversion = clifford_compose(CliffordTableau::from_pauli(seq.final_pauli), clifford_inverse(seq.step_product()));
    seq.parity_mode = false;
    seq.measured_qubits.clear();
    for (std::size_t q = 0; q < seq.n_qubits; ++q) seq.measured_qubits.push_back(q);
    seq.ideal_outcomes = final_bits(seq);
    for (std::size_t q = 0; q < seq.n_qubits; ++q) {
        if (seq.ideal_outcomes[q] != seq.final_pauli.x(q)) throw std::logic_error("ideal outcome mismatch");
    }
    return seq;
}

}  // namespace

std::string RBSequence::to_json() const {
    json j;
    j["schema_version"] = 1;
    j["protocol"] = protocol;
    j["n"] = n_qubits;
    j["l"] = length;
    json st = json::array();
    for (const auto& c : steps) st.push_back(c.to_text());
    j["steps"] = st;
    j["step_labels"] = step_labels;
    json sg = json::array();
    for (const auto& g : step_gates) sg.push_back(gates_to_json(g));
    j["step_gates"] = sg;
    j["inversion"] = inversion.to_text();
    j["inversion_gates"] = gates_to_json(inversion_gates);
    j["final_pauli"] = final_pauli.to_string();
    std::vector<int> bits;
    for (bool b : ideal_outcomes) bits.push_back(b ? 1 : 0);
    j["ideal_outcomes"] = bits;
    j["measured_qubits"] = measured_qubits;
    j["parity_mode"] = parity_mode;
    j["seed"] = seed;
    j["seq_index"] = seq_index;
    return j.dump(2);
}

RBSequence RBSequence::from_json(const std::string& text) {
    json j = json::parse(text);
    if (j.value("schema_version", 0) != 1) throw std::invalid_argument("unsupported sequence schema_version");
    RBSequence s;
    s.protocol = j.at("protocol").get<std::string>();
    s.n_qubits = j.at("n").get<std::size_t>();
    s.length = j.at("l").get<std::size_t>();
    for (const auto& t : j.at("steps")) s.steps.push_back(CliffordTableau::from_text(t.get<std::string>()));
    s.step_labels = j.at("step_labels").get<std::vector<std::string>>();
    for (const auto& g : j.at("step_gates")) s.step_gates.push_back(gates_from_json(g, s.n_qubits));
    s.inversion = CliffordTableau::from_text(j.at("inversion").get<std::string>());
    s.inversion_gates = gates_from_json(j.at("inversion_gates"), s.n_qubits);
    s.final_pauli = PauliOperator::from_string(j.at("final_pauli").get<std::string>());
    for (int b : j.at("ideal_outcomes").get<std::vector<int>>()) s.ideal_outcomes.push_back(b != 0);
    s.measured_qubits = j.at("measured_qubits").get<std::vector<std::size_t>>();
    s.parity_mode = j.at("parity_mode").get<bool>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.seq_index = j.at("seq_index").get<std::size_t>();
    if (s.step_labels.size() != s.steps.size()) throw std::invalid_argument("step_labels size mismatch");
    for (const auto& c : s.steps) {
        if (c.n_qubits() != s.n_qubits) throw DimensionError("step size mismatch");
    }
    return s;
}

RBSequence gen_exact_sequence(std::size_t n, std::size_t length, Rng& rng) {
    if (length == 0) throw std::invalid_argument("sequence length must be positive");
    RBSequence seq;
    seq.protocol = "exact";
    seq.n_qubits = n;
    seq.length = length;
    for (std::size_t t = 0; t < length; ++t) {
        seq.steps.push_back(sample_uniform(n, rng));
        seq.step_labels.push_back("step");
    }
    return close_exact(std::move(seq), rng);
}

RBSequence gen_interleaved_sequence(std::size_t n, std::size_t length, const CliffordTableau& g, Rng& rng,
                                    const std::string& g_label) {
    if (length == 0) throw std::invalid_argument("sequence length must be positive");
    if (g.n_qubits() != n || !g.is_valid()) throw std::invalid_argument("interleaved gate is not a valid n-qubit Clifford");
    RBSequence seq;
    seq.protocol = "interleaved";
    seq.n_qubits = n;
    seq.length = length;
    for (std::size_t t = 0; t < length; ++t) {
        seq.steps.push_back(sample_uniform(n, rng));
        seq.step_labels.push_back("step");
        seq.steps.push_back(g);
        seq.step_labels.push_back(g_label);
    }
    return close_exact(std::move(seq), rng);
}

RBSequence gen_approximate_sequence(const ApproximateStep& dist, std::size_t length, Rng& rng) {
    if (dist.computational.size() == 0) throw std::invalid_argument("computational step distribution is empty");
    if (length == 0) throw std::invalid_argument("sequence length must be positive");
    std::size_t n = dist.computational.n_qubits();
    if (dist.pauli_part.size() != 0 && dist.pauli_part.n_qubits() != n) {
        throw DimensionError("Pauli and computational parts differ in size");
    }
    if (n > 63) throw ResourceLimitError("partial inversion limited to n <= 63");
    RBSequence seq;
    seq.protocol = "approximate";
    seq.n_qubits = n;
    seq.length = length;
    StabilizerState st(n);
    for (std::size_t t = 0; t < length; ++t) {
        CliffordTableau step(n);
        if (dist.pauli_part.size() != 0) step = dist.pauli_part.sample(rng);
        step = clifford_compose(dist.computational.sample(rng), step);
        st.apply(step);
        seq.steps.push_back(std::move(step));
        seq.step_labels.push_back("step");
    }

    // Random non-identity element of the stabilizer group.
    std::uint64_t limit = (std::uint64_t{1} << n) - 1;
    std::uniform_int_distribution<std::uint64_t> pick(1, limit);
    std::uint64_t mask = pick(rng);
    PauliOperator s(n);
    for (std::size_t i = 0; i < n; ++i) {
        if ((mask >> i) & 1u) s = s * st.row(i);
    }
    GateSequence local;
    local.n_qubits = n;
    CliffordTableau l(n);
    for (std::size_t q = 0; q < n; ++q) {
        char k = s.get(q);
        if (k == 'I') continue;
        seq.measured_qubits.push_back(q);
        const std::string& g = one_qubit_map_gate(k, 'Z');
        if (g.empty()) continue;
        local.push(g, {q});
        l.left_apply_local(builtin_gates().get(g).tableau, {q});
    }
    seq.final_pauli = random_pauli(n, rng);
    for (std::size_t q = 0; q < n; ++q) {
        char k = seq.final_pauli.get(q);
        if (k != 'I') local.push(std::string(1, k), {q});
    }
    seq.inversion = clifford_compose(CliffordTableau::from_pauli(seq.final_pauli), l);
    seq.inversion_gates = local;
    seq.parity_mode = true;
    seq.ideal_outcomes = final_bits(seq);
    return seq;
}

void decompose_steps(RBSequence& seq) {
    if (seq.step_gates.size() != seq.steps.size()) {
        seq.step_gates.clear();
        for (const auto& c : seq.steps) seq.step_gates.push_back(block_decompose(c).circuit);
    }
    if (seq.inversion_gates.empty() && !seq.inversion.is_identity()) {
        seq.inversion_gates = block_decompose(seq.inversion).circuit;
    }
}

SimCircuit to_sim_circuit(const RBSequence& seq, const SimulationOptions& opt) {
    SimCircuit circ;
    circ.n_qubits = seq.n_qubits;
    const auto& lib = builtin_gates();
    auto push_gates = [&](const GateSequence& gates, bool noisy) {
        for (const auto& g : gates.gates) {
            SimInstruction ins;
            ins.label = g.name;
            ins.op = lib.get(g.name).tableau;
            ins.qubits = g.qubits;
            ins.noisy = noisy;
            circ.instructions.push_back(std::move(ins));
        }
    };
    bool gate_level = opt.gate_level && seq.step_gates.size() == seq.steps.size();
    for (std::size_t i = 0; i < seq.steps.size(); ++i) {
        if (gate_level) {
            push_gates(seq.step_gates[i], true);
        } else {
            SimInstruction ins;
            ins.label = seq.step_labels.empty() ? "step" : seq.step_labels[i];
            ins.op = seq.steps[i];
            circ.instructions.push_back(std::move(ins));
        }
    }
    if (gate_level && (!seq.inversion_gates.empty() || seq.inversion.is_identity())) {
        push_gates(seq.inversion_gates, opt.noisy_inversion);
    } else {
        SimInstruction ins;
        ins.label = opt.inversion_label;
        ins.op = seq.inversion;
        ins.noisy = opt.noisy_inversion;
        circ.instructions.push_back(std::move(ins));
    }
    circ.observables = seq.observables();
    circ.ideal_outcomes = seq.ideal_outcomes;
    return circ;
}

void ExperimentDesign::validate() const {
    if (lengths.empty()) throw std::invalid_argument("design has no lengths");
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        if (lengths[i] == 0) throw std::invalid_argument("lengths must be positive");
        if (i && lengths[i] <= lengths[i - 1]) throw std::invalid_argument("lengths must be strictly increasing");
    }
    if (sequences_per_length.size() != 1 && sequences_per_length.size() != lengths.size()) {
        throw std::invalid_argument("sequences_per_length needs one entry or one per length");
    }
    for (std::size_t c : sequences_per_length) {
        if (c == 0) throw std::invalid_argument("sequence counts must be positive");
    }
    if (shots == 0) throw std::invalid_argument("shot count must be positive");
}

std::size_t ExperimentDesign::sequences_at(std::size_t i) const {
    return sequences_per_length.size() == 1 ? sequences_per_length[0] : sequences_per_length.at(i);
}

RBSequence generate_sequence(const ProtocolSpec& protocol, std::size_t length, std::size_t index,
                             std::uint64_t master_seed) {
    std::uint64_t seed = derive_seed(master_seed, protocol.tag, length, index);
    Rng rng(seed);
    RBSequence seq;
    if (protocol.tag == "exact") {
        seq = gen_exact_sequence(protocol.n_qubits, length, rng);
    } else if (protocol.tag == "interleaved") {
        if (!protocol.interleaved_gate) throw std::invalid_argument("interleaved protocol needs a gate");
        seq = gen_interleaved_sequence(protocol.n_qubits, length, *protocol.interleaved_gate, rng,
                                       protocol.interleaved_label);
    } else if (protocol.tag == "approximate") {
        ApproximateStep dist = protocol.approximate ? *protocol.approximate : ApproximateStep::knill_1q();
        seq = gen_approximate_sequence(dist, length, rng);
    } else {
        throw std::invalid_argument("unknown protocol '" + protocol.tag + "'");
    }
    if (protocol.decompose) decompose_steps(seq);
    seq.seed = seed;
    seq.seq_index = index;
    return seq;
}

RBDataset run_experiment(const ExperimentDesign& design, const ProtocolSpec& protocol, const ErrorModel& model,
                         std::size_t threads, std::size_t cap) {
    design.validate();
    struct Task {
        std::size_t length;
        std::size_t index;
    };
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < design.lengths.size(); ++i) {
        for (std::size_t s = 0; s < design.sequences_at(i); ++s) tasks.push_back({design.lengths[i], s});
    }
    std::vector<RBRecord> records(tasks.size());
    std::vector<std::string> errors(tasks.size());
    auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t t = begin; t < tasks.size(); t += stride) {
            try {
                RBSequence seq = generate_sequence(protocol, tasks[t].length, tasks[t].index, design.master_seed);
                double f = expected_sequence_fidelity(to_sim_circuit(seq, protocol.sim), model, cap);
                f = std::clamp(f, 0.0, 1.0);
                Rng shots_rng(derive_seed(seq.seed, "shots"));
                std::binomial_distribution<std::size_t> draw(design.shots, f);
                RBRecord& r = records[t];
                r.protocol = protocol.tag;
                r.length = tasks[t].length;
                r.seq_index = tasks[t].index;
                r.n_shots = design.shots;
                r.n_correct = draw(shots_rng);
                r.expected_fidelity = f;
                r.seed = seq.seed;
            } catch (const std::exception& e) {
                errors[t] = e.what();
            }
        }
    };
    threads = std::max<std::size_t>(1, std::min(threads, tasks.size()));
    if (threads == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors) {
        if (!e.empty()) throw std::runtime_error(e);
    }
    RBDataset ds;
    ds.protocol = protocol.tag;
    ds.n_qubits = protocol.n_qubits;
    ds.alpha = alpha_for(protocol.n_qubits);
    ds.records = std::move(records);
    return ds;
}

std::size_t max_useful_length(double eps_est, std::size_t n, std::size_t n_e, std::size_t n_l) {
    double alpha = alpha_for(n);
    if (!(eps_est > 0.0 && eps_est <= alpha)) throw std::invalid_argument("eps_est must lie in (0, alpha_n]");
    if (n_e == 0 || n_l == 0) throw std::invalid_argument("n_e and n_l must be positive");
    double r = 1.0 - eps_est / alpha;
    double count = static_cast<double>(n_e) * static_cast<double>(n_l);
    std::size_t best = 0;
    const std::size_t limit = 100000000;
    for (std::size_t l = 1; l <= limit; ++l) {
        double decay = alpha * std::pow(r, static_cast<double>(l));
        double f = 1.0 - alpha + decay;
        double s = std::sqrt(std::max(0.0, f * (1.0 - f)) / count);
        if (!(s < decay)) return best;
        best = l;
    }
    throw ResourceLimitError("useful length exceeds 1e8 steps");
}

}  // namespace cliffrb
