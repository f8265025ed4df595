#include "cliffrb/error_sim.hpp"

#include <bit>
#include <cmath>
#include <json.hpp>

namespace cliffrb {

using nlohmann::json;

SignListDistribution::SignListDistribution(std::size_t n_qubits, std::size_t cap) : n_(n_qubits) {
    if (n_qubits > cap || n_qubits > 40) {
        throw ResourceLimitError("sign-list distribution on " + std::to_string(n_qubits) +
                                 " qubits exceeds the cap of " + std::to_string(cap));
    }
    probs_.assign(std::size_t{1} << n_qubits, 0.0);
    probs_[0] = 1.0;
}

double SignListDistribution::total() const {
    double s = 0.0;
    for (double p : probs_) s += p;
    return s;
}

void SignListDistribution::apply_flips(const std::map<std::uint64_t, double>& pattern_weights) {
    std::vector<double> out(probs_.size(), 0.0);
    for (const auto& [m, w] : pattern_weights) {
        if (w == 0.0) continue;
        if (m >= probs_.size()) throw DimensionError("flip pattern out of range");
        for (std::size_t s = 0; s < probs_.size(); ++s) out[s ^ m] += w * probs_[s];
    }
    probs_ = std::move(out);
}

void SignListDistribution::depolarize(double p) {
    if (p == 0.0) return;
    double mix = p * total() / static_cast<double>(probs_.size());
    for (double& v : probs_) v = (1.0 - p) * v + mix;
}

double SignListDistribution::probability_parities(const std::vector<std::uint64_t>& masks,
                                                  const std::vector<bool>& parities) const {
    if (masks.size() != parities.size()) throw std::invalid_argument("mask and parity counts differ");
    double s = 0.0;
    for (std::size_t idx = 0; idx < probs_.size(); ++idx) {
        bool ok = true;
        for (std::size_t k = 0; k < masks.size() && ok; ++k) {
            ok = ((std::popcount(idx & masks[k]) & 1) != 0) == parities[k];
        }
        if (ok) s += probs_[idx];
    }
    return s;
}

void SignListDistribution::row_multiplied(std::size_t target, std::size_t source) {
    std::size_t tb = std::size_t{1} << target;
    std::size_t sb = std::size_t{1} << source;
    for (std::size_t idx = 0; idx < probs_.size(); ++idx) {
        if ((idx & sb) && !(idx & tb)) std::swap(probs_[idx], probs_[idx | tb]);
    }
}

void SignListDistribution::rows_swapped(std::size_t a, std::size_t b) {
    std::size_t ab = std::size_t{1} << a;
    std::size_t bb = std::size_t{1} << b;
    for (std::size_t idx = 0; idx < probs_.size(); ++idx) {
        if ((idx & ab) && !(idx & bb)) std::swap(probs_[idx], probs_[idx ^ ab ^ bb]);
    }
}

void SignListDistribution::row_replaced(std::size_t j) {
    std::size_t jb = std::size_t{1} << j;
    for (std::size_t idx = 0; idx < probs_.size(); ++idx) {
        if (idx & jb) continue;
        double avg = 0.5 * (probs_[idx] + probs_[idx | jb]);
        probs_[idx] = avg;
        probs_[idx | jb] = avg;
    }
}

std::uint64_t anticommutation_pattern(const StabilizerState& state, const PauliOperator& p) {
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < state.n_qubits(); ++i) {
        if (!state.row(i).commutes(p)) m |= std::uint64_t{1} << i;
    }
    return m;
}

NoiseChannel NoiseChannel::depolarizing(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("depolarizing strength must lie in [0, 1]");
    NoiseChannel c;
    c.kind_ = Kind::Depolarizing;
    c.p_ = p;
    return c;
}

NoiseChannel NoiseChannel::pauli(PauliChannel ch) {
    NoiseChannel c;
    c.kind_ = Kind::Pauli;
    c.pauli_ = std::move(ch);
    return c;
}

bool NoiseChannel::is_identity() const {
    return kind_ == Kind::Depolarizing ? p_ == 0.0 : pauli_.is_identity();
}

NoiseChannel NoiseChannel::scaled(double factor) const {
    if (kind_ == Kind::Depolarizing) return depolarizing(p_ * factor);
    return pauli(pauli_.scaled(factor));
}

PauliChannel NoiseChannel::as_pauli_channel(std::size_t k) const {
    if (kind_ == Kind::Depolarizing) return PauliChannel::depolarizing(k, p_);
    if (pauli_.n_qubits() != k) throw DimensionError("Pauli channel size does not match its target");
    return pauli_;
}

void propagate_channel(SignListDistribution& dist, const StabilizerState& state, const NoiseChannel& ch,
                       const std::vector<std::size_t>& qubits) {
    std::size_t n = state.n_qubits();
    if (dist.n_qubits() != n) throw DimensionError("distribution and state sizes differ");
    if (ch.is_identity()) return;
    std::vector<std::size_t> targets = qubits;
    if (targets.empty()) {
        for (std::size_t q = 0; q < n; ++q) targets.push_back(q);
    }
    for (std::size_t q : targets) {
        if (q >= n) throw std::out_of_range("channel qubit out of range");
    }
    std::size_t k = targets.size();
    if (ch.kind() == NoiseChannel::Kind::Depolarizing && k == n) {
        double d2 = std::ldexp(1.0, static_cast<int>(2 * n));
        if (1.0 - ch.strength() * (d2 - 1.0) / d2 < -1e-15) {
            throw std::invalid_argument("depolarizing strength out of range");
        }
        dist.depolarize(ch.strength());
        return;
    }
    PauliChannel local = ch.as_pauli_channel(k);
    std::map<std::uint64_t, double> patterns;
    for (const auto& [p, w] : local.weights()) {
        PauliOperator big(n);
        for (std::size_t i = 0; i < k; ++i) big.set(targets[i], p.get(i));
        patterns[anticommutation_pattern(state, big)] += w;
    }
    dist.apply_flips(patterns);
}

const NoiseChannel& ErrorModel::channel_for(const std::string& label) const {
    auto it = per_gate.find(label);
    return it == per_gate.end() ? default_channel : it->second;
}

NoiseChannel ErrorModel::channel_at(const std::string& label, std::size_t t) const {
    const NoiseChannel& base = channel_for(label);
    if (!ramp_gamma) return base;
    double factor = 1.0 + *ramp_gamma * static_cast<double>(t);
    if (ramp_factor_two) factor *= 2.0;
    return base.scaled(factor);
}

ErrorModel ErrorModel::depolarizing(double p_step, double p_spam) {
    ErrorModel m;
    m.default_channel = NoiseChannel::depolarizing(p_step);
    m.spam_channel = NoiseChannel::depolarizing(p_spam);
    return m;
}

namespace {

NoiseChannel channel_from_json(const json& j) {
    std::string type = j.at("type").get<std::string>();
    if (type == "depolarizing") return NoiseChannel::depolarizing(j.at("p").get<double>());
    if (type == "pauli") {
        auto weights = j.at("weights").get<std::map<std::string, double>>();
        std::size_t n = j.contains("n") ? j.at("n").get<std::size_t>()
                                        : (weights.empty() ? 1 : PauliOperator::from_string(weights.begin()->first).n_qubits());
        return NoiseChannel::pauli(PauliChannel::from_strings(n, weights));
    }
    throw std::invalid_argument("unknown channel type '" + type + "'");
}

json channel_to_json(const NoiseChannel& c) {
    if (c.kind() == NoiseChannel::Kind::Depolarizing) return json{{"type", "depolarizing"}, {"p", c.strength()}};
    json w = json::object();
    for (const auto& [p, g] : c.pauli_channel().weights()) {
        if (!p.is_identity()) w[p.to_string()] = g;
    }
    return json{{"type", "pauli"}, {"n", c.pauli_channel().n_qubits()}, {"weights", w}};
}

}  // namespace

ErrorModel ErrorModel::from_json(const std::string& text) try {
    json j = json::parse(text);
    ErrorModel m;
    if (j.contains("default")) m.default_channel = channel_from_json(j.at("default"));
    if (j.contains("per_gate")) {
        for (const auto& [name, c] : j.at("per_gate").items()) m.per_gate[name] = channel_from_json(c);
    }
    if (j.contains("ramp_gamma") && !j.at("ramp_gamma").is_null()) m.ramp_gamma = j.at("ramp_gamma").get<double>();
    if (j.contains("ramp_factor_two")) m.ramp_factor_two = j.at("ramp_factor_two").get<bool>();
    if (j.contains("spam")) m.spam_channel = channel_from_json(j.at("spam"));
    return m;
} catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed error model: ") + e.what());
}

std::string ErrorModel::to_json() const {
    json j;
    j["default"] = channel_to_json(default_channel);
    json pg = json::object();
    for (const auto& [name, c] : per_gate) pg[name] = channel_to_json(c);
    j["per_gate"] = pg;
    j["ramp_gamma"] = ramp_gamma ? json(*ramp_gamma) : json(nullptr);
    j["ramp_factor_two"] = ramp_factor_two;
    j["spam"] = channel_to_json(spam_channel);
    return j.dump(2);
}

namespace {

void apply_instruction(StabilizerState& state, const SimInstruction& ins) {
    if (ins.kind == SimInstruction::Kind::MeasureZ) {
        if (ins.qubits.size() != 1) throw std::invalid_argument("measure_z instruction needs one qubit");
        state.measure_z_forced(ins.qubits[0], false);
    } else if (ins.qubits.empty()) {
        state.apply(ins.op);
    } else {
        state.apply(ins.op, ins.qubits);
    }
}

}  // namespace

std::vector<bool> ideal_outcomes(const SimCircuit& circuit) {
    StabilizerState state(circuit.n_qubits);
    for (const auto& ins : circuit.instructions) apply_instruction(state, ins);
    std::vector<bool> out;
    for (const auto& obs : circuit.observables) {
        auto ev = state.stabilizer_eigenvalue(obs);
        if (!ev) throw std::invalid_argument("final observable " + obs.to_string() + " is not deterministic");
        out.push_back(*ev < 0);
    }
    return out;
}

double expected_sequence_fidelity(const SimCircuit& circuit, const ErrorModel& model, std::size_t cap) {
    std::size_t n = circuit.n_qubits;
    SignListDistribution dist(n, cap);
    StabilizerState state(n);
    state.set_observer(&dist);
    std::size_t t = 0;
    for (const auto& ins : circuit.instructions) {
        apply_instruction(state, ins);
        if (ins.kind == SimInstruction::Kind::Clifford && ins.noisy) {
            ++t;
            propagate_channel(dist, state, model.channel_at(ins.label, t), ins.qubits);
        }
    }
    propagate_channel(dist, state, model.spam_channel);
    state.set_observer(nullptr);

    if (!circuit.ideal_outcomes.empty() && circuit.ideal_outcomes.size() != circuit.observables.size()) {
        throw std::invalid_argument("ideal outcome count does not match observables");
    }
    std::vector<std::uint64_t> masks;
    std::vector<bool> parities;
    for (std::size_t k = 0; k < circuit.observables.size(); ++k) {
        const auto& obs = circuit.observables[k];
        auto combo = state.stabilizer_combination(obs);
        auto ev = state.stabilizer_eigenvalue(obs);
        if (!combo || !ev) throw std::invalid_argument("final observable " + obs.to_string() + " is not deterministic");
        std::uint64_t m = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if ((*combo)[i]) m |= std::uint64_t{1} << i;
        }
        masks.push_back(m);
        bool reference = *ev < 0;
        bool ideal = circuit.ideal_outcomes.empty() ? reference : circuit.ideal_outcomes[k];
        parities.push_back(reference != ideal);
    }
    return dist.probability_parities(masks, parities);
}

}  // namespace cliffrb
