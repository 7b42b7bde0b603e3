#include "hslice/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cinttypes>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hslice/cube.hpp"
#include "hslice/decompose.hpp"
#include "hslice/hyperplane.hpp"
#include "hslice/io.hpp"
#include "hslice/lemma_lab.hpp"
#include "hslice/report.hpp"
#include "hslice/rng.hpp"
#include "hslice/scales.hpp"
#include "hslice/wiggle.hpp"
#include "hslice/witness.hpp"

namespace hslice {

namespace {

using nlohmann::json;

std::string fmt(const char* f, ...) {
    char buf[160];
    va_list ap;
    va_start(ap, f);
    vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

double parse_double(const std::string& text) {
    char* end = nullptr;
    double v = strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0')
        throw std::invalid_argument("bad number: '" + text + "'");
    return v;
}

long double parse_long_double(const std::string& text) {
    char* end = nullptr;
    long double v = strtold(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0')
        throw std::invalid_argument("bad number: '" + text + "'");
    return v;
}

// "paper" (or empty) -> {}, otherwise "key=value,key=value"
std::map<std::string, double> parse_kv_doubles(const std::string& text) {
    std::map<std::string, double> kv;
    if (text.empty() || text == "paper") return kv;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t comma = text.find(',', pos);
        std::string item =
            text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        size_t eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw std::invalid_argument("expected key=value, got '" + item + "'");
        kv[item.substr(0, eq)] = parse_double(item.substr(eq + 1));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return kv;
}

DecompConstants parse_constants(const std::string& text, int k, int n) {
    if (text.empty() || text == "paper") return DecompConstants::paper(k, n);
    std::optional<int> S;
    std::optional<double> W, tau;
    for (const auto& [key, val] : parse_kv_doubles(text)) {
        if (key == "S")
            S = static_cast<int>(val);
        else if (key == "W")
            W = val;
        else if (key == "tau")
            tau = val;
        else
            throw std::invalid_argument("unknown decomposition constant: " + key);
    }
    return DecompConstants::with_overrides(k, n, S, W, tau);
}

double standard_normal(RngStream& rng) {
    double u = rng.uniform01();
    double v = rng.uniform01();
    double r = std::sqrt(-2.0 * std::log1p(-u));
    return r * std::cos(2.0 * 3.14159265358979323846 * v);
}

AnyCollection generate_collection(const std::string& kind, int n, int k, uint64_t seed) {
    if (n < 2 || n > 100000) throw std::invalid_argument("gen needs 2 <= n <= 100000");
    if (kind == "levels") {
        // edges are enumerated over uint32 vertex masks downstream
        if (n > 30) throw std::invalid_argument("levels needs n <= 30");
        // the n offsets strictly between consecutive attainable coordinate sums
        ExactCollection c;
        c.n = n;
        for (int i = 0; i < n; ++i) {
            ExactHyperplane h;
            h.a.assign(n, Rational(1));
            h.b = Rational(-n + 1 + 2 * i);
            c.hyperplanes.push_back(std::move(h));
        }
        return c;
    }
    if (kind != "random-gaussian" && kind != "random-unit")
        throw std::invalid_argument("unknown gen kind: " + kind);
    if (k < 0 || k > 1000000) throw std::invalid_argument("gen needs 0 <= k <= 1000000");
    FloatCollection c;
    c.n = n;
    for (int i = 0; i < k; ++i) {
        RngStream rng(seed, static_cast<uint64_t>(i));
        FloatHyperplane h;
        h.a.resize(n);
        double norm2 = 0.0;
        for (int j = 0; j < n; ++j) {
            h.a[j] = standard_normal(rng);
            norm2 += h.a[j] * h.a[j];
        }
        if (norm2 == 0.0) {
            h.a[0] = 1.0;
            norm2 = 1.0;
        }
        double inv = 1.0 / std::sqrt(norm2);
        for (int j = 0; j < n; ++j) h.a[j] *= inv;
        h.b = kind == "random-gaussian" ? standard_normal(rng) : 0.0;
        c.hyperplanes.push_back(std::move(h));
    }
    return c;
}

std::vector<double> doubles_from_json(const json& j) {
    if (!j.is_array()) throw io::IoError("expected a list of numbers");
    std::vector<double> out;
    for (const json& x : j) {
        if (x.is_string())
            out.push_back(parse_double(x.get<std::string>()));
        else if (x.is_number())
            out.push_back(x.get<double>());
        else
            throw io::IoError("expected a number");
    }
    return out;
}

std::vector<scales::Real> reals_from_json(const json& j) {
    if (!j.is_array()) throw io::IoError("expected a list of numbers");
    std::vector<scales::Real> out;
    for (const json& x : j) {
        if (x.is_string())
            out.push_back(parse_long_double(x.get<std::string>()));
        else if (x.is_number())
            out.push_back(x.get<double>());
        else
            throw io::IoError("expected a number");
    }
    return out;
}

std::vector<std::pair<double, double>> ranges_from_json(const json& j) {
    if (!j.is_array()) throw io::IoError("ranges must be a list of [lo, hi] pairs");
    std::vector<std::pair<double, double>> out;
    for (const json& r : j) {
        if (!r.is_array() || r.size() != 2) throw io::IoError("each range must be [lo, hi]");
        out.emplace_back(r[0].get<double>(), r[1].get<double>());
    }
    return out;
}

long double real_or(const json& j, const char* key, long double def) {
    if (!j.contains(key)) return def;
    const json& x = j.at(key);
    if (x.is_string()) return parse_long_double(x.get<std::string>());
    return x.get<double>();
}

FloatCollection float_collection_from_check(const json& check) {
    AnyCollection any;
    if (check.contains("input")) {
        any = io::load_collection(check.at("input").get<std::string>());
    } else if (check.contains("collection")) {
        any = io::collection_from_json_text(check.at("collection").dump());
    } else if (check.contains("gen")) {
        const json& g = check.at("gen");
        any = generate_collection(g.at("kind").get<std::string>(), g.at("n").get<int>(),
                                  g.value("k", 0), g.value("seed", uint64_t{0}));
    } else {
        throw io::IoError("hyperplane_claims needs one of: input, collection, gen");
    }
    if (const auto* ec = std::get_if<ExactCollection>(&any)) return to_float(*ec);
    return std::get<FloatCollection>(any);
}

std::vector<EstimateReport> run_lab_case(const json& file, uint64_t baseSeed,
                                         uint64_t baseTrials, int workers, io::Manifest& m) {
    if (!file.is_object() || !file.contains("checks") || !file.at("checks").is_array())
        throw io::IoError("lab case file needs a \"checks\" list");
    std::vector<EstimateReport> rows;
    int idx = 0;
    for (const json& check : file.at("checks")) {
        std::string type = check.at("check").get<std::string>();
        uint64_t trials = check.value("trials", baseTrials);
        uint64_t seed = check.value("seed", baseSeed + static_cast<uint64_t>(idx));
        size_t before = rows.size();

        if (type == "lo") {
            LoCheckOptions opts;
            opts.trials = trials;
            opts.seed = seed;
            opts.workers = workers;
            opts.forceMonteCarlo = check.value("force_mc", false);
            opts.exactCap = check.value("exact_cap", opts.exactCap);
            std::vector<double> bias;
            if (check.contains("bias")) bias = doubles_from_json(check.at("bias"));
            rows.push_back(check_lo_bound(doubles_from_json(check.at("w")),
                                          check.value("b", 0.0), check.at("t").get<double>(),
                                          bias, opts));
        } else if (type == "many_scales") {
            McOptions opts{trials, seed, workers};
            std::vector<scales::Real> w;
            scales::Real delta;
            if (check.contains("geometric")) {
                const json& g = check.at("geometric");
                delta = real_or(g, "delta", 1.0L);
                w = scales::geometric_scale_vector(g.at("s").get<int>(), delta);
            } else {
                w = reals_from_json(check.at("w"));
                delta = real_or(check, "delta", 0.0L);
                if (delta <= 0) throw io::IoError("many_scales needs delta > 0");
            }
            rows.push_back(check_many_scales(w, real_or(check, "b", 0.0L), delta, opts).report);
        } else if (type == "continuous_lo") {
            ContinuousLoOptions opts;
            opts.trials = trials;
            opts.seed = seed;
            opts.workers = workers;
            opts.forceMonteCarlo = check.value("force_mc", false);
            rows.push_back(check_continuous_lo(ranges_from_json(check.at("ranges")),
                                               check.value("b", 0.0),
                                               check.at("t").get<double>(), opts));
        } else if (type == "chernoff") {
            McOptions opts{trials, seed, workers};
            rows.push_back(check_chernoff(ranges_from_json(check.at("ranges")),
                                          check.at("t").get<double>(), opts));
        } else if (type == "hyperplane_claims") {
            HyperplaneClaimsOptions opts;
            opts.trials = trials;
            opts.seed = seed;
            opts.workers = workers;
            opts.xBudget = check.value("x_budget", opts.xBudget);
            opts.maxRows = check.value("max_rows", opts.maxRows);
            opts.samplerFormulasAnyM = check.value("formulas_any_m", false);
            if (check.contains("params"))
                for (auto it = check.at("params").begin(); it != check.at("params").end(); ++it)
                    opts.samplerOverrides[it.key()] = it.value().get<double>();
            HyperplaneClaimsReport rep = check_hyperplane_claims(float_collection_from_check(check), opts);
            m.add(fmt("check[%d].k1_star_size", idx), static_cast<uint64_t>(rep.k1Star.size()));
            m.add(fmt("check[%d].k2_margin_violations", idx), rep.k2MarginViolations);
            for (auto& r : rep.rows) rows.push_back(std::move(r));
        } else {
            throw io::IoError("unknown lab check type: " + type);
        }

        m.add(fmt("check[%d]", idx), type);
        m.add(fmt("check[%d].rows", idx), static_cast<uint64_t>(rows.size() - before));
        m.add(fmt("check[%d].seed", idx), seed);
        ++idx;
    }
    return rows;
}

void emit_manifest(const io::Manifest& m, const std::string& path) {
    std::string text = manifest_text(m);
    std::cout << text;
    if (!path.empty()) io::write_text_file(path, text);
}

struct Options {
    std::string input, output, manifest;
    std::string kind, params = "paper", constants = "paper", unslicedCsv, breakdownCsv;
    std::string delta = "1";
    uint64_t seed = 0, budget = 10000, trials = 0;
    int workers = 1, cap = 24, n = 0, k = 0, geometricS = 0;
    bool formulasAnyM = false, noWiggle = false, noCheck = false;
};

int cmd_gen(const Options& o) {
    AnyCollection c = generate_collection(o.kind, o.n, o.kind == "levels" ? o.n : o.k, o.seed);
    if (o.output.empty()) throw std::invalid_argument("gen needs --output");
    io::save_collection(c, o.output);
    io::Manifest m;
    m.add("subcommand", "gen");
    m.add("kind", o.kind);
    m.add("n", o.n);
    m.add("k", static_cast<int>(size_of(c)));
    m.add("seed", o.seed);
    m.add("mode", mode_of(c) == NumericMode::Exact ? "exact" : "float");
    m.add("output", o.output);
    emit_manifest(m, o.manifest);
    return 0;
}

int cmd_verify(const Options& o) {
    AnyCollection c = io::load_collection(o.input);
    CoverOptions opts;
    opts.cap = o.cap;
    opts.workers = o.workers;
    CoverReport rep = verify_cover(c, opts);
    if (!o.output.empty()) io::write_text_file(o.output, io::cover_report_text(rep));
    if (!o.unslicedCsv.empty()) io::write_text_file(o.unslicedCsv, io::unsliced_to_csv(rep));
    io::Manifest m;
    m.add("subcommand", "verify");
    m.add("input", o.input);
    m.add("seed", o.seed);
    m.add("workers", o.workers);
    m.add("n", rep.n);
    m.add("total_edges", rep.totalEdges);
    m.add("sliced_edges", rep.slicedEdges);
    m.add("unsliced_count", rep.unslicedCount);
    m.add("degenerate_incidences", rep.degenerateIncidences);
    m.add("fully_covered", std::string(rep.fullyCovered() ? "true" : "false"));
    m.add("summary", fmt("%" PRIu64 "/%" PRIu64 " sliced", rep.slicedEdges, rep.totalEdges));
    emit_manifest(m, o.manifest);
    return 0;
}

int cmd_witness(const Options& o) {
    AnyCollection c = io::load_collection(o.input);
    WitnessConfig cfg;
    cfg.seed = o.seed;
    cfg.budget = o.budget;
    cfg.workers = o.workers;
    cfg.cap = o.cap;
    cfg.wiggleEnabled = !o.noWiggle;
    cfg.samplerFormulasAnyM = o.formulasAnyM;
    cfg.samplerOverrides = parse_kv_doubles(o.params);
    if (o.constants != "paper")
        cfg.constants =
            parse_constants(o.constants, static_cast<int>(size_of(c)), dim_of(c));
    WitnessResult wr = end_to_end_witness(c, cfg);
    if (!o.output.empty()) io::write_text_file(o.output, io::witness_to_json_text(wr));

    io::Manifest m;
    m.add("subcommand", "witness");
    m.add("input", o.input);
    m.add("seed", o.seed);
    m.add("budget", o.budget);
    m.add("workers", o.workers);
    m.add("params", o.params);
    m.add("constants", o.constants);
    m.add("status", std::string(wr.status == WitnessResult::Status::Found ? "found" : "exhausted"));
    m.add("attempts", wr.attempts);
    if (wr.status == WitnessResult::Status::Found) {
        m.add("edge_base_bits_hex", fmt("%x", wr.edge.base));
        m.add("edge_flip_index", static_cast<int>(wr.edge.flip));
    }
    m.add("m", wr.m);
    m.add("rejected_w_search", wr.tally.wSearch);
    m.add("rejected_x_construction", wr.tally.xConstruction);
    m.add("rejected_x_inf_norm", wr.tally.xInfNorm);
    m.add("rejected_rounding_distance", wr.tally.roundingDistance);
    m.add("rejected_final_exact", wr.tally.finalExact);
    m.add("wiggle_perturbed", wr.wigglePerturbed);
    m.add("wiggle_resolved_degenerate", wr.wiggleResolvedDegenerate);

    int exitCode = 0;
    if (!o.breakdownCsv.empty()) {
        const DecompositionResult& dec = wr.decomposition;
        int k = dec.k;
        int mCols = static_cast<int>(dec.N1.size());
        int q = static_cast<int>(dec.N2.size());
        Matrix V(k, mCols);
        std::vector<double> lambda(k);
        RngStream wRng(o.seed, 0);
        std::vector<int> w(q);
        for (int j = 0; j < q; ++j) w[j] = wRng.sign();
        const FloatCollection fc = std::visit(
            [](const auto& col) {
                if constexpr (std::is_same_v<std::decay_t<decltype(col)>, ExactCollection>)
                    return to_float(col);
                else
                    return col;
            },
            c);
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < mCols; ++j) V.at(i, j) = dec.rescaled.at(i, dec.N1[j]);
            double acc = dec.rowScale[i] * fc.hyperplanes[i].b;
            for (int j = 0; j < q; ++j) acc -= dec.rescaled.at(i, dec.N2[j]) * w[j];
            lambda[i] = acc;
        }
        BreakdownOptions bo;
        bo.trials = o.trials ? o.trials : 10000;
        bo.seed = o.seed;
        bo.workers = o.workers;
        BreakdownReport br = close_type_breakdown(V, lambda, wr.params, bo);
        io::write_text_file(o.breakdownCsv, reports_to_csv(br.rows));
        m.add("breakdown_trials", br.trials);
        m.add("breakdown_rows", static_cast<uint64_t>(br.rows.size()));
        m.add("breakdown_type_gaps", br.typeGaps);
        m.add("breakdown_bad_not_near_bad", br.badNotNearBad);
        m.add("breakdown_close_total", br.closeTotal);
        m.add("breakdown_output", o.breakdownCsv);
        if (any_failure(br.rows)) exitCode = 1;
    }
    emit_manifest(m, o.manifest);
    return exitCode;
}

int cmd_decompose(const Options& o) {
    AnyCollection any = io::load_collection(o.input);
    const FloatCollection fc = std::visit(
        [](const auto& col) {
            if constexpr (std::is_same_v<std::decay_t<decltype(col)>, ExactCollection>)
                return to_float(col);
            else
                return col;
        },
        any);
    int k = static_cast<int>(fc.hyperplanes.size());
    int n = fc.n;
    Matrix A(k, n);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < n; ++j) A.at(i, j) = fc.hyperplanes[i].a[j];
    DecompConstants constants = parse_constants(o.constants, k, n);
    DecompositionResult r = decompose(A, constants);
    if (!o.output.empty()) io::write_text_file(o.output, io::decomposition_to_json_text(r));

    io::Manifest m;
    m.add("subcommand", "decompose");
    m.add("input", o.input);
    m.add("seed", o.seed);
    m.add("constants", o.constants);
    m.add("k", r.k);
    m.add("n", r.n);
    m.add("S", r.constants.S);
    m.add("W", r.constants.W);
    m.add("tau", r.constants.tau);
    m.add("k1_size", static_cast<uint64_t>(r.K1.size()));
    m.add("k2_size", static_cast<uint64_t>(r.K2.size()));
    m.add("n1_size", static_cast<uint64_t>(r.N1.size()));
    m.add("n2_size", static_cast<uint64_t>(r.N2.size()));
    m.add("renormalizations", r.renormalizations);
    m.add("loop_iterations", r.loopIterations);
    m.add("final_potential", r.finalPotential);
    m.add("potential_bound_held", std::string(r.potentialBoundHeld ? "true" : "false"));

    int exitCode = 0;
    if (!o.noCheck) {
        DecompCheck check = verify_decomposition(A, r);
        m.add("check_ok", std::string(check.ok ? "true" : "false"));
        if (!check.ok) {
            for (const auto& item : check.items)
                if (!item.ok)
                    std::cerr << "decomposition check failed: " << item.name << ": "
                              << item.detail << "\n";
            exitCode = 1;
        }
    }
    emit_manifest(m, o.manifest);
    return exitCode;
}

int cmd_scales(const Options& o) {
    long double delta = parse_long_double(o.delta);
    std::vector<scales::Real> v;
    if (o.geometricS > 0) {
        v = scales::geometric_scale_vector(o.geometricS, delta);
    } else if (!o.input.empty()) {
        json j = json::parse(io::read_text_file(o.input), nullptr, false);
        if (j.is_discarded() || !j.contains("v")) throw io::IoError("vector file needs {\"v\": [...]}");
        v = reals_from_json(j.at("v"));
    } else {
        throw std::invalid_argument("scales needs --input or --geometric");
    }
    scales::ScaleCertificate cert = scales::greedy_scales(v, delta);
    bool ok = scales::verify_certificate(v, cert);
    if (!o.output.empty()) io::write_text_file(o.output, io::certificate_to_json_text(cert));

    io::Manifest m;
    m.add("subcommand", "scales");
    if (!o.input.empty()) m.add("input", o.input);
    if (o.geometricS > 0) m.add("geometric_s", o.geometricS);
    m.add("seed", o.seed);
    m.add("delta", o.delta);
    m.add("coordinates", static_cast<uint64_t>(v.size()));
    m.add("scales_found", cert.s());
    m.add("certificate_verified", std::string(ok ? "true" : "false"));
    emit_manifest(m, o.manifest);
    return ok ? 0 : 1;
}

int cmd_lab(const Options& o, bool seedGiven, bool trialsGiven) {
    json file = json::parse(io::read_text_file(o.input), nullptr, false);
    if (file.is_discarded()) throw io::IoError("malformed lab case file: " + o.input);
    uint64_t baseSeed = seedGiven ? o.seed : file.value("seed", uint64_t{0});
    uint64_t baseTrials = trialsGiven && o.trials ? o.trials : file.value("trials", uint64_t{100000});

    io::Manifest m;
    m.add("subcommand", "lab");
    m.add("input", o.input);
    m.add("seed", baseSeed);
    m.add("trials", baseTrials);
    m.add("workers", o.workers);
    std::vector<EstimateReport> rows = run_lab_case(file, baseSeed, baseTrials, o.workers, m);
    std::string csv = reports_to_csv(rows);
    uint64_t failures = 0;
    for (const auto& r : rows) failures += r.verdict == Verdict::Fail ? 1 : 0;
    m.add("rows", static_cast<uint64_t>(rows.size()));
    m.add("failures", failures);
    if (!o.output.empty()) {
        io::write_text_file(o.output, csv);
        m.add("output", o.output);
        emit_manifest(m, o.manifest);
    } else {
        emit_manifest(m, o.manifest);
        std::cout << csv;
    }
    return failures ? 1 : 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    Options o;
    CLI::App app{"hyperplane slicing toolkit: covers of the hypercube, decomposition, sampling"};
    app.require_subcommand(1);

    auto addCommon = [&](CLI::App* sub) {
        sub->add_option("--seed", o.seed, "master seed")->envname("HSLICE_SEED");
        sub->add_option("--workers", o.workers, "worker thread count")
            ->envname("HSLICE_WORKERS");
        sub->add_option("--manifest", o.manifest, "also write the run manifest to this file");
    };

    CLI::App* gen = app.add_subcommand("gen", "generate a hyperplane collection");
    gen->add_option("--kind", o.kind, "levels | random-gaussian | random-unit")->required();
    gen->add_option("--n", o.n, "cube dimension")->required();
    gen->add_option("--k", o.k, "hyperplane count (ignored for levels)");
    gen->add_option("--output", o.output, "collection file to write")
        ->required()
        ->envname("HSLICE_OUTPUT");
    addCommon(gen);

    CLI::App* verify = app.add_subcommand("verify", "exhaustively verify edge coverage");
    verify->add_option("--input", o.input, "collection file")->required()->envname("HSLICE_INPUT");
    verify->add_option("--output", o.output, "cover report file")->envname("HSLICE_OUTPUT");
    verify->add_option("--unsliced-csv", o.unslicedCsv, "CSV of unsliced edges");
    verify->add_option("--cap", o.cap, "max dimension for full enumeration")
        ->envname("HSLICE_CAP");
    addCommon(verify);

    CLI::App* witness = app.add_subcommand("witness", "search for an unsliced edge");
    witness->add_option("--input", o.input, "collection file")->required()->envname("HSLICE_INPUT");
    witness->add_option("--output", o.output, "witness report file")->envname("HSLICE_OUTPUT");
    witness->add_option("--budget", o.budget, "attempt budget")->envname("HSLICE_BUDGET");
    witness->add_option("--params", o.params, "paper | key=value,... sampler overrides")
        ->envname("HSLICE_PARAMS");
    witness->add_option("--constants", o.constants, "paper | S=..,W=..,tau=..")
        ->envname("HSLICE_CONSTANTS");
    witness->add_option("--cap", o.cap, "max dimension for the exact recheck")
        ->envname("HSLICE_CAP");
    witness->add_flag("--formulas-any-m", o.formulasAnyM,
                      "evaluate the parameter formulas below the m >= 16 floor");
    witness->add_flag("--no-wiggle", o.noWiggle, "skip the degeneracy-removing perturbation");
    witness->add_option("--breakdown", o.breakdownCsv, "close-index breakdown CSV file");
    witness->add_option("--trials", o.trials, "breakdown trial count")->envname("HSLICE_TRIALS");
    addCommon(witness);

    CLI::App* decomp = app.add_subcommand("decompose", "matrix decomposition with certificates");
    decomp->add_option("--input", o.input, "collection file")->required()->envname("HSLICE_INPUT");
    decomp->add_option("--output", o.output, "decomposition file")->envname("HSLICE_OUTPUT");
    decomp->add_option("--constants", o.constants, "paper | S=..,W=..,tau=..")
        ->envname("HSLICE_CONSTANTS");
    decomp->add_flag("--no-check", o.noCheck, "skip the independent postcondition recheck");
    addCommon(decomp);

    CLI::App* scalesCmd = app.add_subcommand("scales", "greedy scale certificate for a vector");
    scalesCmd->add_option("--input", o.input, "vector file {\"v\": [...]}")
        ->envname("HSLICE_INPUT");
    scalesCmd->add_option("--geometric", o.geometricS, "use the s-scale geometric vector");
    scalesCmd->add_option("--delta", o.delta, "scale size")->required();
    scalesCmd->add_option("--output", o.output, "certificate file")->envname("HSLICE_OUTPUT");
    addCommon(scalesCmd);

    CLI::App* lab = app.add_subcommand("lab", "run a case file of bound checks");
    lab->add_option("--input", o.input, "case file")->required()->envname("HSLICE_INPUT");
    lab->add_option("--output", o.output, "CSV report file")->envname("HSLICE_OUTPUT");
    lab->add_option("--trials", o.trials, "default trial count")->envname("HSLICE_TRIALS");
    addCommon(lab);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(gen)) return cmd_gen(o);
        if (app.got_subcommand(verify)) return cmd_verify(o);
        if (app.got_subcommand(witness)) return cmd_witness(o);
        if (app.got_subcommand(decomp)) return cmd_decompose(o);
        if (app.got_subcommand(scalesCmd)) return cmd_scales(o);
        if (app.got_subcommand(lab))
            return cmd_lab(o, lab->count("--seed") > 0, lab->count("--trials") > 0);
        return 2;
    } catch (const CapExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args);
}

}  // namespace hslice
