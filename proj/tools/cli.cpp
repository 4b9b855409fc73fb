#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qcompress/channelsynth.hpp"
#include "qcompress/curvebound.hpp"
#include "qcompress/dimension.hpp"
#include "qcompress/errors.hpp"
#include "qcompress/fixtures.hpp"
#include "qcompress/io.hpp"
#include "qcompress/rng.hpp"

namespace qcompress {

using nlohmann::ordered_json;

namespace {

struct Options {
    std::string input;
    std::uint64_t seed = 0;
    bool json = false;
    bool text = false;
    int trials = 100;
    double tol = -1;  // verification tolerance; negative means the default
    int draws = 3;
    bool given = false;
    bool timings = false;
    std::string scheme_in, scheme_out, out_path;
    std::vector<std::string> gen_args;
};

// Child seeds for the analysis stages, so that each stage is reproducible
// on its own.
std::uint64_t stage_seed(std::uint64_t seed, std::uint64_t stage) { return Rng(seed).split(stage).seed(); }

class Stopwatch {
public:
    void lap(ordered_json& into, const char* name) {
        const auto now = std::chrono::steady_clock::now();
        into[name] = std::chrono::duration<double, std::milli>(now - last_).count();
        last_ = now;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

// nan/inf are not JSON numbers
ordered_json num(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

void flatten(const ordered_json& j, const std::string& path, std::ostream& out) {
    const bool scalar_array =
        j.is_array() && std::all_of(j.begin(), j.end(), [](const ordered_json& e) { return e.is_primitive(); });
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            flatten(it.value(), path.empty() ? it.key() : path + "." + it.key(), out);
    } else if (j.is_array() && !scalar_array) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "[" + std::to_string(i) + "]", out);
    } else {
        out << path << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
    }
}

void emit(const ordered_json& report, const Options& o, std::ostream& out) {
    if (o.json || !o.text)
        out << report.dump(2) << "\n";
    else
        flatten(report, "", out);
}

Tolerances tolerances(const Options& o) {
    Tolerances t;
    if (o.tol > 0) t.stat = o.tol;
    return t;
}

ObservableSet load(const Options& o, const Tolerances& tol) {
    const Fixture f = parse_observable_file(read_file(o.input), tol);
    return make_observable_set(f.ops, tol);
}

ordered_json header(const char* command, const Options& o) {
    return ordered_json{{"tool", "qcompress"}, {"version", kToolVersion}, {"command", command}, {"seed", o.seed}};
}

ordered_json block_json(const ReducedObservableSet& red, const ObservableSet& can) {
    ordered_json blocks = ordered_json::array();
    for (const auto& b : red.structure.blocks) blocks.push_back({{"dim", b.dim}, {"multiplicity", b.multiplicity}});
    double resid = 0;
    for (const auto& op : can.operators) resid = std::max(resid, block_residual(red.structure, op));
    return {{"blocks", blocks}, {"reduced_dim", red.reduced_dim}, {"max_block_residual", resid}};
}

ordered_json dimension_json(const DimensionReport& r) {
    ordered_json steps = ordered_json::array();
    for (const auto& s : r.steps)
        steps.push_back({{"target_block", s.problem.target},
                         {"target_dim", s.problem.target_dim},
                         {"kept_blocks", s.problem.kept},
                         {"redundant", s.outcome.feasible},
                         {"linear_consistent", s.outcome.linear_consistent},
                         {"objective", num(s.outcome.objective_residual)},
                         {"marginal", s.outcome.marginal},
                         {"resolved_tighter", s.outcome.resolved_tighter},
                         {"iterations", s.outcome.iterations}});
    return {{"compression_dimension", r.compression_dimension},
            {"classical_register", r.classical_register},
            {"lower_bound_min_block", r.lower_bound_min_block},
            {"upper_bound_max_block", r.upper_bound_max_block},
            {"redundant_blocks", r.redundant_blocks},
            {"kept_blocks", r.kept_blocks},
            {"steps", steps}};
}

ordered_json bound_json(const GeometricBound& g, PairChoice choice) {
    const auto& f = g.factorization;
    const auto& d = f.diagnostics;
    return {{"bound", g.bound},
            {"pair", choice == PairChoice::Given ? "given" : "random-draws"},
            {"draws", g.draws},
            {"real_factor_degrees", f.real_factor_degrees},
            {"complex_orbit_sizes", f.complex_orbit_sizes},
            {"min_real_degree", f.min_real_degree},
            {"branch_points", f.branch_points.size()},
            {"squarefree_degree", d.squarefree_degree},
            {"loop_product_consistent", d.loop_product_consistent},
            {"hyperbolic", d.hyperbolic},
            {"max_imag_on_real_slices", d.max_imag_on_real_slices}};
}

ordered_json scheme_report_json(const CompressionScheme& sc, const SchemeReport& rep) {
    return {{"d", sc.d},
            {"n", sc.n},
            {"compress_kraus", sc.compress.kraus.size()},
            {"decompress_kraus", sc.decompress.kraus.size()},
            {"max_residual", rep.max_residual},
            {"random_residual", rep.random_residual},
            {"basis_residual", rep.basis_residual},
            {"states_tested", rep.states_tested},
            {"compress_cptp", rep.compress_cptp.ok},
            {"decompress_cptp", rep.decompress_cptp.ok},
            {"dual_unitality", rep.dual_unitality},
            {"ok", rep.ok}};
}

int cmd_analyze(const Options& o, std::ostream& out) {
    const Tolerances tol = tolerances(o);
    ordered_json report = header("analyze", o), times;
    Stopwatch sw;
    const ObservableSet obs = load(o, tol);
    report["input"] = {{"path", o.input}, {"dim", obs.dim}, {"operators", obs.operators.size()}};
    sw.lap(times, "load");
    const DimensionAnalysis a = analyze_dimension(obs, stage_seed(o.seed, 1), tol);
    report["block_structure"] = block_json(a.reduced, a.canonical);
    report["dimension"] = dimension_json(a.report);
    sw.lap(times, "dimension");
    const PairChoice choice = o.given ? PairChoice::Given : PairChoice::RandomDraws;
    const GeometricBound g = geometric_lower_bound(obs, choice, stage_seed(o.seed, 2), o.draws, tol);
    report["geometric_bound"] = bound_json(g, choice);
    sw.lap(times, "geometric_bound");
    const CompressionScheme sc = build_optimal_scheme(a.reduced, a.report, tol);
    const SchemeReport rep = verify_scheme(sc, obs, o.trials, stage_seed(o.seed, 3), tol);
    report["scheme"] = scheme_report_json(sc, rep);
    sw.lap(times, "scheme");
    if (o.timings) report["timings_ms"] = times;
    emit(report, o, out);
    return kExitOk;
}

int cmd_compress(const Options& o, std::ostream& out) {
    const Tolerances tol = tolerances(o);
    const ObservableSet obs = load(o, tol);
    const DimensionAnalysis a = analyze_dimension(obs, stage_seed(o.seed, 1), tol);
    const CompressionScheme sc = build_optimal_scheme(a.reduced, a.report, tol);
    write_file(o.scheme_out, scheme_json(sc));
    ordered_json report = header("compress", o);
    report["scheme_out"] = o.scheme_out;
    report["d"] = sc.d;
    report["n"] = sc.n;
    report["kept_blocks"] = sc.kept_blocks;
    emit(report, o, out);
    return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
    const Tolerances tol = tolerances(o);
    const ObservableSet obs = load(o, tol);
    const CompressionScheme sc = parse_scheme(read_file(o.scheme_in));
    const SchemeReport rep = verify_scheme(sc, obs, o.trials, stage_seed(o.seed, 3), tol);
    ordered_json report = header("verify", o);
    report["scheme"] = o.scheme_in;
    report["trials"] = o.trials;
    report["tolerance"] = tol.stat;
    report["result"] = scheme_report_json(sc, rep);
    emit(report, o, out);
    return rep.ok ? kExitOk : kExitVerify;
}

int cmd_gen(const Options& o, std::ostream& out) {
    const Fixture f = fixture_by_name(o.gen_args);
    const std::string text = observable_file_json(f);
    if (o.out_path.empty())
        out << text;
    else
        write_file(o.out_path, text);
    return kExitOk;
}

int cmd_lower_bound(const Options& o, std::ostream& out) {
    const Tolerances tol = tolerances(o);
    const ObservableSet obs = load(o, tol);
    const PairChoice choice = o.given ? PairChoice::Given : PairChoice::RandomDraws;
    ordered_json report = header("lower-bound", o), times;
    Stopwatch sw;
    const GeometricBound g = geometric_lower_bound(obs, choice, stage_seed(o.seed, 2), o.draws, tol);
    sw.lap(times, "geometric_bound");
    report["geometric_bound"] = bound_json(g, choice);
    if (o.timings) report["timings_ms"] = times;
    emit(report, o, out);
    return kExitOk;
}

int cmd_two_proj(const Options& o, std::ostream& out) {
    const Tolerances tol = tolerances(o);
    const Fixture f = parse_observable_file(read_file(o.input), tol);
    if (f.ops.size() != 2) throw DimensionMismatch("two-proj expects exactly two operators");
    const TwoProjectionForm form = two_projection_form(f.ops[0], f.ops[1], tol);
    ordered_json report = header("two-proj", o);
    report["dim"] = f.dim;
    report["corners"] = {{"M_and_N", form.corners[0]},
                         {"M_and_Nperp", form.corners[1]},
                         {"Mperp_and_N", form.corners[2]},
                         {"Mperp_and_Nperp", form.corners[3]}};
    report["generic_pairs"] = form.r;
    report["mu"] = form.mu;
    report["flags"] = form.flags;
    report["template_residual"] = form.template_residual;
    report["unitarity_residual"] = form.unitarity_residual;
    emit(report, o, out);
    return kExitOk;
}

void common(CLI::App* sub, Options& o, bool input = true) {
    if (input) sub->add_option("input", o.input, "observable file (JSON)")->required();
    sub->add_option("--seed", o.seed, "seed for all randomness");
    auto* j = sub->add_flag("--json", o.json, "JSON report (default)");
    auto* t = sub->add_flag("--text", o.text, "plain text report");
    j->excludes(t);
    sub->add_option("--tol", o.tol, "statistics tolerance for scheme verification");
    sub->add_flag("--timings", o.timings, "include wall-clock timings");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Compression of quantum measurement statistics", "qcompress"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    auto* analyze = app.add_subcommand("analyze", "block structure, compression dimension, geometric bound, scheme check");
    common(analyze, o);
    analyze->add_option("--trials", o.trials, "random states for the scheme check")->check(CLI::PositiveNumber);
    analyze->add_option("--draws", o.draws, "random pairs for the geometric bound")->check(CLI::PositiveNumber);
    analyze->add_flag("--given", o.given, "use the first two operators as the pair");

    auto* compress = app.add_subcommand("compress", "build and serialize an optimal compression scheme");
    common(compress, o);
    compress->add_option("--scheme-out", o.scheme_out, "output scheme file")->required();

    auto* verify = app.add_subcommand("verify", "check a serialized scheme against an observable file");
    common(verify, o);
    verify->add_option("--scheme", o.scheme_in, "scheme file")->required();
    verify->add_option("--trials", o.trials, "random states")->check(CLI::NonNegativeNumber);

    auto* gen = app.add_subcommand("gen", "write an example observable file");
    gen->add_option("example", o.gen_args,
                    "irred D | degree3 | twoproj D SEED | generic D SEED | identity D | planted1 | planted2 | "
                    "planted-neg DELTA REST SEED")
        ->required();
    gen->add_option("--out", o.out_path, "output path (default stdout)");

    auto* lower = app.add_subcommand("lower-bound", "geometric lower bound from the determinantal curve");
    common(lower, o);
    lower->add_option("--draws", o.draws, "random pairs")->check(CLI::PositiveNumber);
    lower->add_flag("--given", o.given, "use the first two operators as the pair");

    auto* twoproj = app.add_subcommand("two-proj", "canonical form of two orthogonal projections");
    common(twoproj, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitParse;
    }

    try {
        if (*analyze) return cmd_analyze(o, out);
        if (*compress) return cmd_compress(o, out);
        if (*verify) return cmd_verify(o, out);
        if (*gen) return cmd_gen(o, out);
        if (*lower) return cmd_lower_bound(o, out);
        if (*twoproj) return cmd_two_proj(o, out);
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const DimensionMismatch& e) {
        err << "dimension mismatch: " << e.what() << "\n";
        return kExitDimension;
    } catch (const NumericError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitParse;
}

}  // namespace qcompress
