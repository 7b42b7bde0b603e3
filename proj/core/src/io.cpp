#include "hslice/io.hpp"

#include <json.hpp>

#include <cinttypes>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hslice/report.hpp"

namespace hslice::io {

using nlohmann::json;

namespace {

std::string fmt(const char* f, ...) {
    char buf[128];
    va_list ap;
    va_start(ap, f);
    vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

std::string long_double_to_string(long double x) { return fmt("%.21Lg", x); }

long double long_double_from_json(const json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        char* end = nullptr;
        long double v = strtold(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0')
            throw IoError("bad numeric string: '" + s + "'");
        return v;
    }
    if (j.is_number()) return j.get<double>();
    throw IoError("expected a number or numeric string");
}

json parse(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw IoError("malformed JSON");
    return j;
}

Rational rational_from_json(const json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return parse_rational(std::to_string(j.get<long long>()));
    throw IoError("exact coefficients must be strings like \"p/q\" (or integers)");
}

double double_from_json(const json& j) {
    if (!j.is_number()) throw IoError("float coefficients must be numbers");
    return j.get<double>();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json certificate_to_json(const scales::ScaleCertificate& cert) {
    json j;
    j["delta"] = long_double_to_string(cert.delta);
    j["groups"] = cert.groups;
    json norms = json::array();
    for (long double g : cert.groupNorms) norms.push_back(long_double_to_string(g));
    j["group_norms"] = std::move(norms);
    return j;
}

scales::ScaleCertificate certificate_from_json(const json& j) {
    scales::ScaleCertificate cert;
    cert.delta = long_double_from_json(j.at("delta"));
    cert.groups = j.at("groups").get<std::vector<std::vector<int>>>();
    if (j.contains("group_norms"))
        for (const json& g : j.at("group_norms")) cert.groupNorms.push_back(long_double_from_json(g));
    return cert;
}

}  // namespace

std::string collection_to_json_text(const AnyCollection& c) {
    json j;
    j["n"] = dim_of(c);
    j["mode"] = mode_of(c) == NumericMode::Exact ? "exact" : "float";
    json rows = json::array();
    if (const auto* ec = std::get_if<ExactCollection>(&c)) {
        for (const auto& h : ec->hyperplanes) {
            json row;
            json a = json::array();
            for (const auto& q : h.a) a.push_back(to_string(q));
            row["a"] = std::move(a);
            row["b"] = to_string(h.b);
            rows.push_back(std::move(row));
        }
    } else {
        for (const auto& h : std::get<FloatCollection>(c).hyperplanes) {
            json row;
            row["a"] = h.a;
            row["b"] = h.b;
            rows.push_back(std::move(row));
        }
    }
    j["hyperplanes"] = std::move(rows);
    return dump(j);
}

AnyCollection collection_from_json_text(const std::string& text) {
    json j = parse(text);
    if (!j.is_object() || !j.contains("n") || !j.contains("mode") || !j.contains("hyperplanes"))
        throw IoError("collection file needs fields n, mode, hyperplanes");
    if (!j["n"].is_number_integer()) throw IoError("n must be an integer");
    int n = j["n"].get<int>();
    std::string mode = j["mode"].get<std::string>();
    const json& rows = j["hyperplanes"];
    if (!rows.is_array()) throw IoError("hyperplanes must be a list");

    AnyCollection out;
    if (mode == "exact") {
        ExactCollection c;
        c.n = n;
        for (const json& row : rows) {
            ExactHyperplane h;
            for (const json& x : row.at("a")) h.a.push_back(rational_from_json(x));
            h.b = rational_from_json(row.at("b"));
            c.hyperplanes.push_back(std::move(h));
        }
        out = std::move(c);
    } else if (mode == "float") {
        FloatCollection c;
        c.n = n;
        for (const json& row : rows) {
            FloatHyperplane h;
            for (const json& x : row.at("a")) h.a.push_back(double_from_json(x));
            h.b = double_from_json(row.at("b"));
            c.hyperplanes.push_back(std::move(h));
        }
        out = std::move(c);
    } else {
        throw IoError("mode must be \"exact\" or \"float\", got '" + mode + "'");
    }
    validate_collection(out);
    return out;
}

void save_collection(const AnyCollection& c, const std::string& path) {
    write_text_file(path, collection_to_json_text(c));
}

AnyCollection load_collection(const std::string& path) {
    try {
        return collection_from_json_text(read_text_file(path));
    } catch (const json::exception& e) {
        throw IoError(std::string("bad collection file ") + path + ": " + e.what());
    }
}

std::string certificate_to_json_text(const scales::ScaleCertificate& cert) {
    return dump(certificate_to_json(cert));
}

scales::ScaleCertificate certificate_from_json_text(const std::string& text) {
    try {
        return certificate_from_json(parse(text));
    } catch (const json::exception& e) {
        throw IoError(std::string("bad certificate: ") + e.what());
    }
}

std::string decomposition_to_json_text(const DecompositionResult& r) {
    json j;
    j["k"] = r.k;
    j["n"] = r.n;
    j["constants"] = {{"S", r.constants.S},
                      {"W", r.constants.W},
                      {"tau", r.constants.tau},
                      {"paper_defaults", r.constants.paperDefaults}};
    j["K1"] = r.K1;
    j["K2"] = r.K2;
    j["N1"] = r.N1;
    j["N2"] = r.N2;
    j["row_scale"] = r.rowScale;
    j["rescaled"] = r.rescaled.d;  // row-major, r.k rows by r.n columns
    json certs = json::object();
    for (const auto& [row, cert] : r.certificates)
        certs[fmt("%d", row)] = certificate_to_json(cert);
    j["certificates"] = std::move(certs);
    json hist = json::object();
    for (const auto& [row, groups] : r.history) hist[fmt("%d", row)] = groups;
    j["history"] = std::move(hist);
    j["renormalizations"] = r.renormalizations;
    j["loop_iterations"] = r.loopIterations;
    j["final_potential"] = r.finalPotential;
    j["potential_bound_held"] = r.potentialBoundHeld;
    return dump(j);
}

std::string witness_to_json_text(const WitnessResult& r) {
    json j;
    j["status"] = r.status == WitnessResult::Status::Found ? "found" : "exhausted";
    if (r.status == WitnessResult::Status::Found)
        j["edge"] = {{"base_bits_hex", fmt("%x", r.edge.base)},
                     {"flip_index", static_cast<int>(r.edge.flip)}};
    j["attempts"] = r.attempts;
    j["tally"] = {{"w_search", r.tally.wSearch},
                  {"x_construction", r.tally.xConstruction},
                  {"x_inf_norm", r.tally.xInfNorm},
                  {"rounding_distance", r.tally.roundingDistance},
                  {"final_exact", r.tally.finalExact}};
    json w = json::array();
    for (int8_t s : r.w) w.push_back(static_cast<int>(s));
    j["w"] = std::move(w);
    j["m"] = r.m;
    j["degenerate_on_witness"] = r.degenerateOnWitness;
    j["params"] = {{"m", r.params.m},
                   {"rho0", r.params.rho0},
                   {"rho1", r.params.rho1},
                   {"delta_heavy", r.params.deltaHeavy},
                   {"bad_threshold", r.params.badThreshold},
                   {"close_threshold", r.params.closeThreshold},
                   {"near_bad_dot", r.params.nearBadDot},
                   {"activation_levels", r.params.activationLevels},
                   {"paper_defaults", r.params.paperDefaults}};
    j["wiggle"] = {{"perturbed_coefficients", r.wigglePerturbed},
                   {"resolved_degenerate", r.wiggleResolvedDegenerate}};
    j["decomposition"] = {{"k1_size", r.decomposition.K1.size()},
                          {"k2_size", r.decomposition.K2.size()},
                          {"n1_size", r.decomposition.N1.size()},
                          {"n2_size", r.decomposition.N2.size()},
                          {"renormalizations", r.decomposition.renormalizations},
                          {"loop_iterations", r.decomposition.loopIterations}};
    return dump(j);
}

std::string cover_report_text(const CoverReport& rep) {
    std::ostringstream out;
    out << "n=" << rep.n << "\n";
    out << "total_edges=" << rep.totalEdges << "\n";
    out << "sliced_edges=" << rep.slicedEdges << "\n";
    out << "unsliced_count=" << rep.unslicedCount << "\n";
    out << "degenerate_incidences=" << rep.degenerateIncidences << "\n";
    out << "fully_covered=" << (rep.fullyCovered() ? "true" : "false") << "\n";
    for (size_t i = 0; i < rep.perHyperplaneSliceCounts.size(); ++i)
        out << "slice_count[" << i << "]=" << rep.perHyperplaneSliceCounts[i] << "\n";
    return out.str();
}

std::string unsliced_to_csv(const CoverReport& rep) {
    std::string out = "base_bits_hex,flip_index\n";
    for (EdgeId e : rep.unsliced) out += fmt("%x,%d\n", e.base, static_cast<int>(e.flip));
    return out;
}

void Manifest::add(std::string key, std::string value) {
    entries.emplace_back(std::move(key), std::move(value));
}
void Manifest::add(std::string key, uint64_t value) {
    entries.emplace_back(std::move(key), fmt("%" PRIu64, value));
}
void Manifest::add(std::string key, int value) { entries.emplace_back(std::move(key), fmt("%d", value)); }
void Manifest::add(std::string key, double value) {
    entries.emplace_back(std::move(key), format_double(value));
}

std::string manifest_text(const Manifest& m) {
    std::string out;
    for (const auto& [k, v] : m.entries) out += k + "=" + v + "\n";
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failed on " + path);
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << content;
    out.flush();
    if (!out) throw IoError("write failed on " + path);
}

}  // namespace hslice::io
