#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hslice/cli.hpp"
#include "hslice/io.hpp"

using namespace hslice;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int code = 0;
    std::string out, err;
};

RunResult run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    std::streambuf* oldOut = std::cout.rdbuf(out.rdbuf());
    std::streambuf* oldErr = std::cerr.rdbuf(err.rdbuf());
    int code;
    try {
        code = run_cli(args);
    } catch (...) {
        std::cout.rdbuf(oldOut);
        std::cerr.rdbuf(oldErr);
        throw;
    }
    std::cout.rdbuf(oldOut);
    std::cerr.rdbuf(oldErr);
    return {code, out.str(), err.str()};
}

bool has_line(const std::string& text, const std::string& line) {
    if (text.rfind(line + "\n", 0) == 0) return true;
    return text.find("\n" + line + "\n") != std::string::npos;
}

struct TempDir {
    fs::path dir;
    explicit TempDir(const std::string& name) : dir(fs::temp_directory_path() / name) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    std::string path(const std::string& f) const { return (dir / f).string(); }
};

std::string cases_dir() { return HSLICE_CASES_DIR; }

}  // namespace

TEST_CASE("gen writes a collection plus a manifest, identically on reruns") {
    TempDir tmp("hslice_cli_gen");
    std::string out = tmp.path("levels3.json");
    std::string man = tmp.path("manifest.txt");
    RunResult r = run({"gen", "--kind", "levels", "--n", "3", "--output", out,
                       "--manifest", man});
    CHECK(r.code == 0);
    CHECK(has_line(r.out, "subcommand=gen"));
    CHECK(has_line(r.out, "kind=levels"));
    CHECK(has_line(r.out, "n=3"));
    CHECK(has_line(r.out, "k=3"));
    CHECK(has_line(r.out, "mode=exact"));
    CHECK(io::read_text_file(man) == r.out);

    AnyCollection c = io::load_collection(out);
    REQUIRE(std::holds_alternative<ExactCollection>(c));
    const ExactCollection& ec = std::get<ExactCollection>(c);
    CHECK(ec.n == 3);
    REQUIRE(ec.hyperplanes.size() == 3);
    CHECK(ec.hyperplanes[0].b == Rational(-2));
    CHECK(ec.hyperplanes[2].b == Rational(2));

    // random generators are reproducible byte-for-byte
    std::string a = tmp.path("a.json"), b = tmp.path("b.json");
    CHECK(run({"gen", "--kind", "random-gaussian", "--n", "20", "--k", "3", "--seed", "11",
               "--output", a}).code == 0);
    CHECK(run({"gen", "--kind", "random-gaussian", "--n", "20", "--k", "3", "--seed", "11",
               "--output", b}).code == 0);
    CHECK(io::read_text_file(a) == io::read_text_file(b));
    AnyCollection ca = io::load_collection(a);
    const FloatCollection& fa = std::get<FloatCollection>(ca);
    REQUIRE(fa.hyperplanes.size() == 3);
    for (const auto& h : fa.hyperplanes) {
        double norm2 = 0.0;
        for (double x : h.a) norm2 += x * x;
        CHECK(norm2 == doctest::Approx(1.0).epsilon(1e-12));
    }

    std::string u = tmp.path("unit.json");
    CHECK(run({"gen", "--kind", "random-unit", "--n", "6", "--k", "2", "--output", u}).code == 0);
    AnyCollection cu = io::load_collection(u);
    for (const auto& h : std::get<FloatCollection>(cu).hyperplanes)
        CHECK(h.b == 0.0);
}

TEST_CASE("verify covers the level collection 12/12") {
    TempDir tmp("hslice_cli_verify");
    std::string col = tmp.path("levels3.json");
    REQUIRE(run({"gen", "--kind", "levels", "--n", "3", "--output", col}).code == 0);

    std::string rep = tmp.path("report.txt"), csv = tmp.path("unsliced.csv");
    RunResult r = run({"verify", "--input", col, "--output", rep, "--unsliced-csv", csv});
    CHECK(r.code == 0);
    CHECK(has_line(r.out, "total_edges=12"));
    CHECK(has_line(r.out, "sliced_edges=12"));
    CHECK(has_line(r.out, "unsliced_count=0"));
    CHECK(has_line(r.out, "degenerate_incidences=0"));
    CHECK(has_line(r.out, "fully_covered=true"));
    CHECK(has_line(r.out, "summary=12/12 sliced"));
    CHECK(io::read_text_file(csv) == "base_bits_hex,flip_index\n");
    CHECK(io::read_text_file(rep).find("fully_covered=true\n") != std::string::npos);

    RunResult again = run({"verify", "--input", col});
    CHECK(again.out == r.out);  // manifests carry no paths or timestamps
}

TEST_CASE("exit codes: cap exceeded is 3, usage problems are 2") {
    TempDir tmp("hslice_cli_codes");
    std::string big = tmp.path("big.json");
    io::write_text_file(big, R"({"n": 26, "mode": "float", "hyperplanes": []})");
    RunResult capped = run({"verify", "--input", big});
    CHECK(capped.code == 3);
    CHECK(capped.err.find("error:") != std::string::npos);

    CHECK(run({"verify"}).code == 2);                       // missing required option
    CHECK(run({"frobnicate"}).code == 2);                   // unknown subcommand
    CHECK(run({}).code == 2);                               // no subcommand
    CHECK(run({"verify", "--input", tmp.path("nope.json")}).code == 2);
    CHECK(run({"gen", "--kind", "mystery", "--n", "4", "--output", tmp.path("x")}).code == 2);
    CHECK(run({"scales", "--delta", "1"}).code == 2);       // neither input nor geometric
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("witness finds an edge, reports exhaustion, and runs the breakdown") {
    TempDir tmp("hslice_cli_witness");
    FloatCollection fc;
    fc.n = 5;
    fc.hyperplanes.push_back(FloatHyperplane{{2.0, 0.125, 0.125, 0.125, 0.125}, 0.5});
    std::string col = tmp.path("one5.json");
    io::save_collection(AnyCollection{fc}, col);

    std::string wj = tmp.path("witness.json");
    RunResult r = run({"witness", "--input", col, "--output", wj, "--seed", "3",
                       "--formulas-any-m"});
    CHECK(r.code == 0);
    CHECK(has_line(r.out, "subcommand=witness"));
    CHECK(has_line(r.out, "status=found"));
    json wit = json::parse(io::read_text_file(wj));
    CHECK(wit["status"] == "found");

    // a fully sliced collection exhausts the budget but still exits 0
    std::string lv = tmp.path("levels4.json");
    REQUIRE(run({"gen", "--kind", "levels", "--n", "4", "--output", lv}).code == 0);
    RunResult ex = run({"witness", "--input", lv, "--budget", "64", "--formulas-any-m"});
    CHECK(ex.code == 0);
    CHECK(has_line(ex.out, "status=exhausted"));
    CHECK(has_line(ex.out, "attempts=64"));

    // breakdown CSV on a well-behaved constant collection with gentle noise
    FloatCollection flat;
    flat.n = 16;
    flat.hyperplanes.push_back(FloatHyperplane{std::vector<double>(16, 0.25), 0.0});
    std::string fcol = tmp.path("flat16.json");
    io::save_collection(AnyCollection{flat}, fcol);
    std::string bcsv = tmp.path("breakdown.csv");
    RunResult br = run({"witness", "--input", fcol, "--seed", "2", "--params",
                        "rho0=0.05,rho1=0.05", "--breakdown", bcsv, "--trials", "2000"});
    CHECK(br.code == 0);
    CHECK(has_line(br.out, "status=found"));
    CHECK(has_line(br.out, "breakdown_trials=2000"));
    CHECK(has_line(br.out, "breakdown_type_gaps=0"));
    CHECK(has_line(br.out, "breakdown_bad_not_near_bad=0"));
    std::string csv = io::read_text_file(bcsv);
    CHECK(csv.rfind("quantity,estimate,ci_lo,ci_hi,paper_bound,vacuous_flag\n", 0) == 0);
}

TEST_CASE("decompose emits sizes, certificates, and verifies itself") {
    TempDir tmp("hslice_cli_decompose");
    FloatCollection sp;
    sp.n = 8;
    std::vector<double> a(8, 1e-5);
    a[0] = 1000.0;
    sp.hyperplanes.push_back(FloatHyperplane{a, 1000.0});
    std::string col = tmp.path("spiked.json");
    io::save_collection(AnyCollection{sp}, col);

    std::string dj = tmp.path("dec.json");
    RunResult r = run({"decompose", "--input", col, "--output", dj, "--constants", "S=1,W=1"});
    CHECK(r.code == 0);
    CHECK(has_line(r.out, "subcommand=decompose"));
    CHECK(has_line(r.out, "k=1"));
    CHECK(has_line(r.out, "S=1"));
    CHECK(has_line(r.out, "W=1"));
    CHECK(has_line(r.out, "k1_size=0"));
    CHECK(has_line(r.out, "k2_size=1"));
    CHECK(has_line(r.out, "n2_size=1"));
    CHECK(has_line(r.out, "renormalizations=1"));
    CHECK(has_line(r.out, "check_ok=true"));
    json dec = json::parse(io::read_text_file(dj));
    CHECK(dec["K2"] == json::array({0}));
    CHECK(dec["certificates"]["0"]["delta"] == "100");

    // paper constants on a flat collection: no loop at all
    std::string lv = tmp.path("levels3.json");
    REQUIRE(run({"gen", "--kind", "levels", "--n", "3", "--output", lv}).code == 0);
    RunResult flat = run({"decompose", "--input", lv});
    CHECK(flat.code == 0);
    CHECK(has_line(flat.out, "constants=paper"));
    CHECK(has_line(flat.out, "loop_iterations=0"));
    CHECK(has_line(flat.out, "k1_size=3"));
    CHECK(has_line(flat.out, "n2_size=0"));
    CHECK(has_line(flat.out, "check_ok=true"));
}

TEST_CASE("scales certifies geometric and file-provided vectors") {
    TempDir tmp("hslice_cli_scales");
    std::string cj = tmp.path("cert.json");
    RunResult r = run({"scales", "--geometric", "150", "--delta", "1", "--output", cj});
    CHECK(r.code == 0);
    CHECK(has_line(r.out, "subcommand=scales"));
    CHECK(has_line(r.out, "coordinates=150"));
    CHECK(has_line(r.out, "scales_found=150"));
    CHECK(has_line(r.out, "certificate_verified=true"));
    scales::ScaleCertificate cert = io::certificate_from_json_text(io::read_text_file(cj));
    CHECK(cert.s() == 150);

    std::string vj = tmp.path("v.json");
    io::write_text_file(vj, R"({"v": [100, 1, 1]})");
    RunResult file = run({"scales", "--input", vj, "--delta", "1"});
    CHECK(file.code == 0);
    CHECK(has_line(file.out, "coordinates=3"));
    CHECK(has_line(file.out, "scales_found=2"));
    CHECK(has_line(file.out, "certificate_verified=true"));
}

TEST_CASE("lab runs the bundled default cases clean and deterministically") {
    TempDir tmp("hslice_cli_lab");
    std::string input = cases_dir() + "/default.json";
    std::string csv1 = tmp.path("rows1.csv");
    std::string csv4 = tmp.path("rows4.csv");

    RunResult r1 = run({"lab", "--input", input, "--output", csv1});
    CHECK(r1.code == 0);
    CHECK(has_line(r1.out, "subcommand=lab"));
    CHECK(has_line(r1.out, "seed=2026"));
    CHECK(has_line(r1.out, "trials=20000"));
    CHECK(has_line(r1.out, "rows=16"));
    CHECK(has_line(r1.out, "failures=0"));
    CHECK(has_line(r1.out, "check[10]=hyperplane_claims"));
    CHECK(has_line(r1.out, "check[10].rows=5"));
    CHECK(has_line(r1.out, "check[10].k1_star_size=2"));
    CHECK(has_line(r1.out, "check[10].k2_margin_violations=0"));

    std::string firstBytes = io::read_text_file(csv1);
    RunResult r2 = run({"lab", "--input", input, "--output", csv1});
    CHECK(r2.code == 0);
    CHECK(r2.out == r1.out);
    CHECK(io::read_text_file(csv1) == firstBytes);

    // worker count must not change a single byte of the table
    RunResult r4 = run({"lab", "--input", input, "--output", csv4, "--workers", "4"});
    CHECK(r4.code == 0);
    CHECK(io::read_text_file(csv4) == io::read_text_file(csv1));

    std::string table = io::read_text_file(csv1);
    CHECK(table.rfind("quantity,estimate,ci_lo,ci_hi,paper_bound,vacuous_flag\n", 0) == 0);
    int lines = 0;
    for (char ch : table)
        if (ch == '\n') ++lines;
    CHECK(lines == 17);  // header + 16 rows
    CHECK(table.find("lo_probability_exact[len=4,mt=4]") != std::string::npos);
    CHECK(table.find("many_scales_probability[s=200]") != std::string::npos);
    CHECK(table.find("prob_margin_fail_any") != std::string::npos);

    // with no --output the table goes to stdout after the manifest
    RunResult inline_run = run({"lab", "--input", input});
    CHECK(inline_run.code == 0);
    CHECK(inline_run.out.find("quantity,estimate,ci_lo,ci_hi,paper_bound,vacuous_flag\n") !=
          std::string::npos);
}

TEST_CASE("lab seed and trial precedence, including environment variables") {
    TempDir tmp("hslice_cli_lab_seeds");
    std::string cf = tmp.path("case.json");
    io::write_text_file(cf, R"({
      "seed": 5, "trials": 1000,
      "checks": [
        { "check": "lo", "w": [1, 1, 1, 1, 1, 1, 1, 1, 1, 1], "b": 0, "t": 1, "force_mc": true }
      ]
    })");

    RunResult base = run({"lab", "--input", cf});
    CHECK(base.code == 0);
    CHECK(has_line(base.out, "seed=5"));
    CHECK(has_line(base.out, "trials=1000"));
    CHECK(has_line(base.out, "check[0].seed=5"));

    RunResult flags = run({"lab", "--input", cf, "--seed", "9", "--trials", "500"});
    CHECK(has_line(flags.out, "seed=9"));
    CHECK(has_line(flags.out, "trials=500"));
    CHECK(has_line(flags.out, "check[0].seed=9"));

    setenv("HSLICE_SEED", "77", 1);
    RunResult env = run({"lab", "--input", cf});
    unsetenv("HSLICE_SEED");
    CHECK(has_line(env.out, "seed=77"));

    setenv("HSLICE_INPUT", cf.c_str(), 1);
    RunResult envInput = run({"lab"});
    unsetenv("HSLICE_INPUT");
    CHECK(envInput.code == 0);
    CHECK(has_line(envInput.out, "input=" + cf));
}
