#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "cliffrb/clifford.hpp"
#include "cliffrb/decomposition.hpp"
#include "cliffrb/error_sim.hpp"
#include "cliffrb/gates.hpp"
#include "cliffrb/io.hpp"
#include "cliffrb/rb_analysis.hpp"
#include "cliffrb/rb_protocol.hpp"
#include "cliffrb/twirl_bounds.hpp"

using namespace cliffrb;
using nlohmann::json;

namespace {

struct Common {
    std::string out;
    std::string manifest;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::size_t threads = 1;
    bool pretty = false;
};

struct Run {
    std::string command;
    std::vector<std::string> argv;
    Common common;
    RunManifest manifest;

    void resolve_seed(bool random = false) {
        if (!common.seed_given) {
            common.seed = generate_seed();
            if (random) std::cerr << "seed: " << common.seed << '\n';
        }
        manifest.seed = common.seed;
    }

    // Writes the main artifact (or prints it), then the manifest.
    void emit(const std::string& text, const std::string& pretty_text = "") {
        if (common.out.empty()) {
            std::cout << (common.pretty && !pretty_text.empty() ? pretty_text : text);
            if (!text.empty() && text.back() != '\n') std::cout << '\n';
        } else {
            write_text_file(common.out, text);
            manifest.outputs.push_back(common.out);
            if (common.pretty && !pretty_text.empty()) std::cout << pretty_text;
        }
        finish();
    }

    void extra_output(const std::string& path, const std::string& text) {
        if (path.empty()) return;
        write_text_file(path, text);
        manifest.outputs.push_back(path);
    }

    void finish() {
        manifest.command = command;
        manifest.threads = common.threads;
        std::vector<std::string> args = argv;
        if (!common.seed_given) {
            args.push_back("--seed");
            args.push_back(std::to_string(common.seed));
        }
        manifest.parameters["argv"] = json(args).dump();
        std::string path = common.manifest;
        if (path.empty()) path = common.out.empty() ? command + ".manifest.json" : common.out + ".manifest.json";
        write_text_file(path, manifest.to_json());
    }
};

void add_common(CLI::App* sub, Common& c, bool random) {
    sub->add_option("--out,-o", c.out, "output path (stdout when omitted)");
    sub->add_option("--manifest", c.manifest, "run manifest path (default <out>.manifest.json, or <command>.manifest.json)");
    auto* s = sub->add_option("--seed", c.seed, "master seed");
    s->each([&c](const std::string&) { c.seed_given = true; });
    if (random) sub->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--pretty", c.pretty, "human-readable rendering");
}

std::string fmt(double v, int prec = 6) {
    std::ostringstream os;
    os << std::setprecision(prec) << v;
    return os.str();
}

GateSet load_gate_set(const std::string& spec) {
    if (spec.find(".json") != std::string::npos) return GateSet::from_json(read_text_file(spec));
    return builtin_gate_set(spec);
}

ErrorModel load_model(const std::string& path, double p_step, double p_spam) {
    if (!path.empty()) return ErrorModel::from_json(read_text_file(path));
    return ErrorModel::depolarizing(p_step, p_spam);
}

CliffordTableau named_or_file_tableau(const std::string& spec, std::size_t n) {
    if (builtin_gates().contains(spec)) {
        const auto& def = builtin_gates().get(spec);
        std::vector<std::size_t> qubits;
        for (std::size_t q = 0; q < def.arity; ++q) qubits.push_back(q);
        if (def.arity > n) throw std::invalid_argument("gate " + spec + " needs more qubits than --n");
        return embed(def.tableau, qubits, n);
    }
    return CliffordTableau::from_text(read_text_file(spec));
}

StepDistribution load_distribution(const std::string& spec, std::size_t n, double identity_weight) {
    StepDistribution base;
    if (spec == "knill-1q") {
        if (n != 1) throw std::invalid_argument("knill-1q is a one-qubit distribution");
        auto k = ApproximateStep::knill_1q();
        base = StepDistribution::convolve(k.pauli_part, k.computational);
    } else {
        base = StepDistribution::from_gate_set(load_gate_set(spec), n);
    }
    if (identity_weight <= 0.0) return base;
    if (identity_weight >= 1.0) throw std::invalid_argument("identity weight must be below 1");
    std::vector<std::pair<CliffordTableau, double>> items;
    for (const auto& [c, p] : base.items()) items.emplace_back(c, p * (1.0 - identity_weight));
    items.emplace_back(CliffordTableau(n), identity_weight);
    return StepDistribution(std::move(items));
}

std::vector<std::size_t> parse_lengths(const std::vector<std::size_t>& v) {
    if (v.empty()) throw std::invalid_argument("--lengths is required");
    return v;
}

ProtocolSpec make_protocol(const std::string& tag, std::size_t n, const std::string& gate, bool decompose,
                           bool gate_level) {
    ProtocolSpec ps;
    ps.tag = tag;
    ps.n_qubits = n;
    ps.decompose = decompose || gate_level;
    ps.sim.gate_level = gate_level;
    if (tag == "interleaved") {
        if (gate.empty()) throw std::invalid_argument("interleaved protocol needs --gate");
        ps.interleaved_gate = named_or_file_tableau(gate, n);
        ps.interleaved_label = builtin_gates().contains(gate) ? gate : "g";
    }
    return ps;
}

std::string fit_pretty(const FitReport& r) {
    std::ostringstream os;
    auto names = parameter_names(r.model);
    os << "model " << model_tag(r.model) << "  alpha " << fmt(r.alpha) << '\n';
    for (std::size_t i = 0; i < r.params.size(); ++i) {
        os << "  " << std::left << std::setw(6) << names[i] << " = " << fmt(r.params[i], 8) << " +- "
           << fmt(r.standard_error(i), 3) << '\n';
    }
    os << "  chi2 " << fmt(r.chi2) << "  dof " << r.dof << "  p " << fmt(r.p_value, 4)
       << (r.significant ? "  (significant)" : "  (not significant)") << '\n';
    for (const auto& w : r.warnings) os << "  warning: " << w << '\n';
    return os.str();
}

int dispatch(const std::vector<std::string>& argv_in);

}  // namespace

namespace {

int dispatch(const std::vector<std::string>& argv_in) {
    CLI::App app{"Clifford randomized benchmarking toolkit"};
    app.require_subcommand(1);
    Run run;
    run.argv = argv_in;
    Common& c = run.common;

    // enumerate
    std::size_t n = 1;
    bool quotient = false;
    auto* en = app.add_subcommand("enumerate", "count (and optionally list) the Clifford group");
    en->add_option("--n", n, "qubits")->required();
    en->add_flag("--quotient", quotient, "quotient by the Pauli group");
    bool list = false;
    en->add_flag("--list", list, "enumerate explicitly (n <= 2, or n = 3 with --quotient)");
    add_common(en, c, false);

    // search-decomp
    std::string gate_set = "1q-clifford+cx";
    bool allow_large = false;
    std::string index_out;
    auto* sd = app.add_subcommand("search-decomp", "optimal decompositions by weighted Cayley-graph search");
    sd->add_option("--gate-set", gate_set, "built-in gate set name or JSON file");
    sd->add_option("--n", n, "qubits")->required();
    sd->add_flag("--quotient", quotient, "search the quotient group");
    sd->add_flag("--allow-large", allow_large, "permit the n = 3 quotient search");
    sd->add_option("--index", index_out, "summary index JSON path");
    add_common(sd, c, false);

    // decompose
    std::string tableau_file, method = "block", table_file, target;
    bool random_tableau = false;
    auto* dc = app.add_subcommand("decompose", "gate sequence for a tableau");
    dc->add_option("--tableau", tableau_file, "tableau text file");
    dc->add_flag("--random", random_tableau, "decompose a uniformly random tableau");
    dc->add_option("--n", n, "qubits (with --random)");
    dc->add_option("--method", method, "block or table")->check(CLI::IsMember({"block", "table"}));
    dc->add_option("--table", table_file, "binary table from search-decomp (method table)");
    dc->add_option("--target", target, "translate the result into this gate set");
    add_common(dc, c, false);

    // sample-clifford
    std::size_t count = 1;
    auto* sc = app.add_subcommand("sample-clifford", "uniformly random Clifford tableaux");
    sc->add_option("--n", n, "qubits")->required();
    sc->add_option("--count", count, "number of samples");
    add_common(sc, c, false);

    // gen-sequences / simulate
    std::string protocol = "exact", gate, model_file;
    std::vector<std::size_t> lengths, seqs{10};
    std::size_t shots = 100;
    bool decompose = false, gate_level = false;
    double p_step = 0.0, p_spam = 0.0;
    std::size_t cap = kDefaultSignListCap;
    auto* gs = app.add_subcommand("gen-sequences", "generate RB sequences");
    auto* sim = app.add_subcommand("simulate", "simulate an RB experiment into a dataset CSV");
    for (auto* sub : {gs, sim}) {
        sub->add_option("--protocol", protocol, "exact, interleaved or approximate")
            ->check(CLI::IsMember({"exact", "interleaved", "approximate"}));
        sub->add_option("--n", n, "qubits");
        sub->add_option("--lengths", lengths, "sequence lengths")->delimiter(',');
        sub->add_option("--seqs", seqs, "sequences per length (one value or one per length)")->delimiter(',');
        sub->add_option("--gate", gate, "interleaved gate: registered name or tableau file");
        sub->add_flag("--decompose", decompose, "attach block decompositions of every step");
    }
    sim->add_option("--shots", shots, "shots per sequence");
    sim->add_option("--model", model_file, "error model JSON");
    sim->add_option("--p-step", p_step, "depolarizing strength per step (without --model)");
    sim->add_option("--p-spam", p_spam, "depolarizing strength before measurement (without --model)");
    sim->add_flag("--gate-level", gate_level, "simulate decomposed steps gate by gate");
    sim->add_option("--cap", cap, "sign-list qubit cap");
    add_common(gs, c, false);
    add_common(sim, c, true);

    // fit / bootstrap
    std::string data, model_tag_str = "main", residuals_out, samples_out;
    std::size_t resamples = 1000;
    auto* ft = app.add_subcommand("fit", "weighted least-squares fit of a dataset");
    auto* bs = app.add_subcommand("bootstrap", "semi-parametric bootstrap of a fit");
    for (auto* sub : {ft, bs}) {
        sub->add_option("--data", data, "dataset CSV")->required();
        sub->add_option("--n", n, "qubits");
        sub->add_option("--model", model_tag_str, "main, main-app, three-param or magesan");
    }
    ft->add_option("--residuals", residuals_out, "residual CSV path");
    std::vector<std::string> windows;
    ft->add_option("--windows", windows, "truncation windows lo:hi (one fit per window)");
    bs->add_option("--resamples", resamples, "number of resampled data sets");
    bs->add_option("--samples", samples_out, "CSV of resampled parameters");
    add_common(ft, c, false);
    add_common(bs, c, true);

    // interleaved
    std::string ref_data, int_data;
    double eps_s = std::nan(""), eps_s_prime = std::nan(""), alpha_in = std::nan("");
    bool printed_form = false;
    auto* il = app.add_subcommand("interleaved", "error per interleaved gate");
    il->add_option("--reference", ref_data, "reference dataset CSV");
    il->add_option("--interleaved", int_data, "interleaved dataset CSV");
    il->add_option("--n", n, "qubits");
    il->add_option("--model", model_tag_str, "fit model");
    il->add_option("--eps-s", eps_s, "reference error per step (instead of datasets)");
    il->add_option("--eps-s-prime", eps_s_prime, "interleaved error per step (instead of datasets)");
    il->add_option("--alpha", alpha_in, "alpha_n (with --eps-s)");
    il->add_flag("--printed-form", printed_form, "use the 1/alpha prefactor");
    add_common(il, c, false);

    // tv-decay / bounds
    std::string dist = "knill-1q";
    double identity_weight = 0.0;
    std::size_t jmax = 20;
    auto* tv = app.add_subcommand("tv-decay", "total-variation distance of j-step distributions");
    auto* bd = app.add_subcommand("bounds", "step-comparison LP and imperfect-depolarization bounds");
    for (auto* sub : {tv, bd}) {
        sub->add_option("--distribution", dist, "knill-1q or a gate-set name or JSON file");
        sub->add_option("--n", n, "qubits");
        sub->add_option("--identity-weight", identity_weight, "probability of an identity step");
        sub->add_flag("--quotient", quotient, "work in the quotient group");
    }
    tv->add_option("--jmax", jmax, "largest j");
    double eps_a = 0.01, e_obs = 0.01;
    std::size_t k_steps = 1, l_len = 10;
    bd->add_option("--eps", eps_a, "observed error per step of the approximate experiment");
    bd->add_option("--k", k_steps, "steps grouped into one aggregate step");
    bd->add_option("--l", l_len, "sequence length for the kappa bounds");
    bd->add_option("--e", e_obs, "observed total error probability for the kappa bounds");
    add_common(tv, c, false);
    add_common(bd, c, false);

    // replay
    std::string replay_manifest;
    auto* rp = app.add_subcommand("replay", "re-run the command recorded in a manifest");
    rp->add_option("manifest", replay_manifest, "manifest JSON")->required();

    std::vector<std::string> rev(argv_in.rbegin(), argv_in.rend());
    rev.push_back("cliffrb-cli");
    std::reverse(rev.begin(), rev.end());
    std::vector<char*> cargs;
    for (auto& s : rev) cargs.push_back(s.data());
    try {
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    auto* sub = app.get_subcommands().front();
    run.command = sub->get_name();

    if (sub == rp) {
        RunManifest m = RunManifest::from_json(read_text_file(replay_manifest));
        auto args = json::parse(m.parameters.at("argv")).get<std::vector<std::string>>();
        return dispatch(args);
    }

    if (sub == en) {
        run.resolve_seed();
        json j;
        j["schema_version"] = kSchemaVersion;
        j["seed"] = c.seed;
        j["n"] = n;
        j["quotient"] = quotient;
        j["count"] = group_order(n, quotient).str();
        if (list) {
            auto elems = enumerate_group(n, quotient);
            j["enumerated"] = elems.size();
        }
        std::cout << group_order(n, quotient).str() << '\n';
        if (!c.out.empty()) {
            write_text_file(c.out, j.dump(2));
            run.manifest.outputs.push_back(c.out);
        }
        run.finish();
        return 0;
    }

    if (sub == sd) {
        run.resolve_seed();
        if (c.out.empty()) throw std::invalid_argument("search-decomp needs --out for the binary table");
        GateSet set = load_gate_set(gate_set);
        DecompositionTable table = cayley_search(set, n, quotient, allow_large);
        std::ostringstream bin;
        table.save_binary(bin);
        write_text_file(c.out, bin.str());
        run.manifest.outputs.push_back(c.out);
        run.extra_output(index_out, table.index_json());
        std::cout << table.index_json() << '\n';
        run.finish();
        return 0;
    }

    if (sub == dc) {
        run.resolve_seed();
        CliffordTableau t;
        if (random_tableau) {
            if (!c.seed_given) std::cerr << "seed: " << c.seed << '\n';
            Rng rng(derive_seed(c.seed, "decompose"));
            t = sample_uniform(n, rng);
        } else if (!tableau_file.empty()) {
            t = CliffordTableau::from_text(read_text_file(tableau_file));
            run.manifest.inputs.push_back(tableau_file);
        } else {
            throw std::invalid_argument("decompose needs --tableau or --random");
        }
        GateSequence seq;
        json j;
        if (method == "block") {
            auto bdc = block_decompose(t);
            seq = bdc.circuit;
            json blocks = json::array();
            for (const auto& [label, cnt] : bdc.blocks) blocks.push_back(json{{"block", label}, {"gates", cnt}});
            j["blocks"] = blocks;
        } else {
            if (table_file.empty()) throw std::invalid_argument("method table needs --table");
            std::ifstream in(table_file, std::ios::binary);
            if (!in) throw std::runtime_error("cannot open '" + table_file + "'");
            auto table = DecompositionTable::load_binary(in);
            seq = table.sequence(t);
            run.manifest.inputs.push_back(table_file);
        }
        if (!target.empty()) seq = translate_sequence(seq, load_gate_set(target));
        j["schema_version"] = kSchemaVersion;
        j["seed"] = c.seed;
        j["tableau"] = t.to_text();
        j["method"] = method;
        j["gates"] = seq.to_string();
        j["gate_count"] = seq.size();
        run.emit(j.dump(2), seq.to_string() + "\n");
        return 0;
    }

    if (sub == sc) {
        run.resolve_seed(true);
        Rng rng(derive_seed(c.seed, "sample-clifford"));
        json j;
        j["schema_version"] = kSchemaVersion;
        j["seed"] = c.seed;
        j["n"] = n;
        json arr = json::array();
        std::string pretty;
        for (std::size_t i = 0; i < count; ++i) {
            auto t = sample_uniform(n, rng);
            arr.push_back(t.to_text());
            pretty += t.to_text() + "\n";
        }
        j["tableaux"] = arr;
        run.emit(j.dump(2), pretty);
        return 0;
    }

    if (sub == gs || sub == sim) {
        run.resolve_seed(true);
        ExperimentDesign design;
        design.lengths = parse_lengths(lengths);
        design.sequences_per_length = seqs;
        design.shots = shots;
        design.master_seed = c.seed;
        design.validate();
        ProtocolSpec ps = make_protocol(protocol, n, gate, decompose, gate_level);
        if (sub == gs) {
            json j;
            j["schema_version"] = kSchemaVersion;
            j["seed"] = c.seed;
            j["protocol"] = protocol;
            json arr = json::array();
            for (std::size_t i = 0; i < design.lengths.size(); ++i) {
                for (std::size_t s = 0; s < design.sequences_at(i); ++s) {
                    arr.push_back(json::parse(generate_sequence(ps, design.lengths[i], s, c.seed).to_json()));
                }
            }
            j["sequences"] = arr;
            run.emit(j.dump(2));
            return 0;
        }
        ErrorModel model = load_model(model_file, p_step, p_spam);
        if (!model_file.empty()) run.manifest.inputs.push_back(model_file);
        RBDataset ds = run_experiment(design, ps, model, c.threads, cap);
        std::ostringstream pretty;
        for (const auto& st : length_statistics(ds)) {
            pretty << "l=" << st.length << "  F=" << fmt(st.mean) << "  sd(mean)=" << fmt(std::sqrt(st.variance_of_mean), 3)
                   << '\n';
        }
        run.emit(ds.to_csv(), pretty.str());
        return 0;
    }

    if (sub == ft || sub == bs) {
        run.resolve_seed(true);
        RBDataset ds = RBDataset::from_csv(read_text_file(data), n);
        run.manifest.inputs.push_back(data);
        RBModel model = model_from_tag(model_tag_str);
        if (sub == ft) {
            if (!windows.empty()) {
                std::vector<std::pair<std::size_t, std::size_t>> wins;
                for (const auto& w : windows) {
                    auto colon = w.find(':');
                    if (colon == std::string::npos) throw std::invalid_argument("window must be lo:hi");
                    wins.emplace_back(std::stoul(w.substr(0, colon)), std::stoul(w.substr(colon + 1)));
                }
                json arr = json::array();
                std::string pretty;
                for (const auto& row : truncation_scan(ds, model, wins)) {
                    json r = json::parse(row.report.to_json());
                    r["window"] = {row.lo, row.hi};
                    arr.push_back(r);
                    pretty += "window [" + std::to_string(row.lo) + ", " + std::to_string(row.hi) + "]\n" +
                              fit_pretty(row.report);
                }
                json j{{"schema_version", kSchemaVersion}, {"seed", c.seed}, {"truncation_scan", arr}};
                run.emit(j.dump(2), pretty);
                return 0;
            }
            FitReport rep = fit(ds, model);
            json j = json::parse(rep.to_json());
            j["schema_version"] = kSchemaVersion;
            j["seed"] = c.seed;
            run.extra_output(residuals_out, rep.residuals_csv());
            run.emit(j.dump(2), fit_pretty(rep));
            return 0;
        }
        BootstrapOptions bo;
        bo.n_resamples = resamples;
        bo.threads = c.threads;
        BootstrapReport rep = bootstrap(ds, model, c.seed, bo);
        json j = json::parse(rep.to_json());
        j["schema_version"] = kSchemaVersion;
        j["seed"] = c.seed;
        run.extra_output(samples_out, rep.samples_csv());
        std::ostringstream pretty;
        auto names = parameter_names(model);
        for (std::size_t i = 0; i < rep.original.size(); ++i) {
            pretty << names[i] << ": " << fmt(rep.original[i], 8) << "  bias " << fmt(rep.bias[i], 3) << "  se "
                   << fmt(rep.standard_errors[i], 3) << (rep.bias_significant[i] ? "  (bias significant)" : "") << '\n';
        }
        run.emit(j.dump(2), pretty.str());
        return 0;
    }

    if (sub == il) {
        run.resolve_seed();
        InterleavedResult r;
        json j;
        if (!ref_data.empty() || !int_data.empty()) {
            if (ref_data.empty() || int_data.empty()) throw std::invalid_argument("need both --reference and --interleaved");
            RBModel model = model_from_tag(model_tag_str);
            FitReport a = fit(RBDataset::from_csv(read_text_file(ref_data), n), model);
            FitReport b = fit(RBDataset::from_csv(read_text_file(int_data), n), model);
            run.manifest.inputs.push_back(ref_data);
            run.manifest.inputs.push_back(int_data);
            r = interleaved_gate_error(a, b, printed_form);
            j["eps_s"] = a.eps_s();
            j["eps_s_prime"] = b.eps_s();
            j["alpha"] = a.alpha;
        } else {
            if (std::isnan(eps_s) || std::isnan(eps_s_prime)) throw std::invalid_argument("need datasets or --eps-s and --eps-s-prime");
            double alpha = std::isnan(alpha_in) ? alpha_for(n) : alpha_in;
            r = interleaved_gate_error(eps_s, eps_s_prime, alpha, 0.0, 0.0, printed_form);
            j["eps_s"] = eps_s;
            j["eps_s_prime"] = eps_s_prime;
            j["alpha"] = alpha;
        }
        j["schema_version"] = kSchemaVersion;
        j["seed"] = c.seed;
        j["printed_form"] = printed_form;
        j["eps_g"] = r.eps_g;
        j["standard_error"] = r.standard_error;
        run.emit(j.dump(2), "eps_g = " + fmt(r.eps_g) + " +- " + fmt(r.standard_error, 3) + "\n");
        return 0;
    }

    if (sub == tv || sub == bd) {
        run.resolve_seed();
        StepDistribution sdist = load_distribution(dist, n, identity_weight);
        GroupDistribution g = GroupDistribution::from_steps(sdist, quotient);
        if (sub == tv) {
            auto series = tv_series(g, jmax);
            std::ostringstream csv;
            csv << std::setprecision(17) << "j,v\n";
            for (std::size_t i = 0; i < series.size(); ++i) csv << i + 1 << ',' << series[i] << '\n';
            run.emit(csv.str());
            return 0;
        }
        double alpha = alpha_for(n);
        ComparisonBound cb = step_comparison_bound(g, eps_a, alpha, k_steps);
        KappaReport kr = kappa_bounds(exact_inversion_aggregates(g, l_len), l_len, e_obs);
        json j;
        j["schema_version"] = kSchemaVersion;
        j["seed"] = c.seed;
        j["step_comparison"] = json{{"k", k_steps}, {"eps_k", cb.eps_k}, {"delta_max", cb.delta_max}, {"delta_min", cb.delta_min}};
        j["kappa"] = json::parse(kr.to_json());
        std::string pretty = "delta in [" + fmt(cb.delta_min) + ", " + fmt(cb.delta_max) + "]\nkappa_max " +
                             fmt(kr.kappa_max) + "  kappa_min " + fmt(kr.kappa_min) + "\n";
        run.emit(j.dump(2), pretty);
        return 0;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return dispatch(args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
