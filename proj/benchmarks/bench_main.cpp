#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "hslice/cube.hpp"
#include "hslice/decompose.hpp"
#include "hslice/hyperplane.hpp"
#include "hslice/lemma_lab.hpp"
#include "hslice/matrix.hpp"
#include "hslice/rng.hpp"
#include "hslice/scales.hpp"
#include "hslice/witness.hpp"

namespace {

using namespace hslice;

ExactCollection levels(int n) {
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

Matrix random_matrix(int k, int n, uint64_t seed) {
    Matrix A(k, n);
    for (int i = 0; i < k; ++i) {
        RngStream rng(seed, static_cast<uint64_t>(i));
        for (int j = 0; j < n; ++j) {
            double mag = 0.1 + 0.9 * rng.uniform01();
            A.at(i, j) = rng.sign() > 0 ? mag : -mag;
        }
    }
    return A;
}

Matrix unit_rows(int k, int m, uint64_t seed) {
    Matrix V = random_matrix(k, m, seed);
    for (int i = 0; i < k; ++i) {
        double norm = std::sqrt(dot(V.row(i), V.row(i), m));
        for (int j = 0; j < m; ++j) V.at(i, j) /= norm;
    }
    return V;
}

void BM_VerifyCoverLevels(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    ExactCollection c = levels(n);
    AnyCollection any{c};
    for (auto _ : state) {
        CoverReport rep = verify_cover(any);
        benchmark::DoNotOptimize(rep.slicedEdges);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(edge_count(n)));
}
BENCHMARK(BM_VerifyCoverLevels)->Arg(10)->Arg(14)->Arg(16);

void BM_GramStats(benchmark::State& state) {
    int k = static_cast<int>(state.range(0));
    Matrix V = unit_rows(k, 1024, 7);
    for (auto _ : state) {
        GramStats g = gram_stats(V);
        benchmark::DoNotOptimize(g.S.data());
    }
}
BENCHMARK(BM_GramStats)->Arg(16)->Arg(64)->Arg(256);

void BM_DecomposePaper(benchmark::State& state) {
    int k = static_cast<int>(state.range(0));
    int n = static_cast<int>(state.range(1));
    Matrix A = random_matrix(k, n, 11);
    DecompConstants constants = DecompConstants::paper(k, n);
    for (auto _ : state) {
        DecompositionResult r = decompose(A, constants);
        benchmark::DoNotOptimize(r.N2.size());
    }
}
BENCHMARK(BM_DecomposePaper)->Args({8, 256})->Args({32, 1024})->Args({64, 4096});

void BM_ExactLoProbability(benchmark::State& state) {
    int len = static_cast<int>(state.range(0));
    std::vector<Rational> w(len, Rational(1));
    for (auto _ : state) {
        Rational p = exact_lo_probability(w, Rational(0), Rational(1));
        benchmark::DoNotOptimize(p.get_num().get_ui());
    }
}
BENCHMARK(BM_ExactLoProbability)->Arg(8)->Arg(14)->Arg(20);

void BM_SamplePoint(benchmark::State& state) {
    int k = static_cast<int>(state.range(0));
    int m = 256;
    Matrix V = unit_rows(k, m, 13);
    std::vector<double> lambda(k, 0.0);
    SamplerParams params = SamplerParams::paper(m);
    RngStream rng(1, 0);
    for (auto _ : state) {
        PointSample s = sample_point(V, lambda, params, rng);
        benchmark::DoNotOptimize(s.X.data());
    }
}
BENCHMARK(BM_SamplePoint)->Arg(4)->Arg(16)->Arg(64);

void BM_RoundMuP(benchmark::State& state) {
    int m = static_cast<int>(state.range(0));
    std::vector<double> p(m);
    RngStream init(2, 0);
    for (int j = 0; j < m; ++j) p[j] = 0.5 * init.uniform_pm1();
    RngStream rng(3, 0);
    for (auto _ : state) {
        std::vector<int8_t> y = round_mu_p(p, rng);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * m);
}
BENCHMARK(BM_RoundMuP)->Arg(64)->Arg(1024)->Arg(16384);

void BM_GreedyScales(benchmark::State& state) {
    int s = static_cast<int>(state.range(0));
    std::vector<scales::Real> v = scales::geometric_scale_vector(s, 1.0L);
    for (auto _ : state) {
        scales::ScaleCertificate cert = scales::greedy_scales(v, 1.0L);
        benchmark::DoNotOptimize(cert.groups.size());
    }
}
BENCHMARK(BM_GreedyScales)->Arg(100)->Arg(400);

void BM_WitnessSearch(benchmark::State& state) {
    int k = static_cast<int>(state.range(0));
    FloatCollection c;
    c.n = 16;
    for (int i = 0; i < k; ++i) {
        RngStream rng(500 + static_cast<uint64_t>(i), 0);
        FloatHyperplane h;
        h.a.resize(16);
        double norm2 = 0.0;
        for (int j = 0; j < 16; ++j) {
            double u = rng.uniform01();
            double v = rng.uniform01();
            h.a[j] = std::sqrt(-2.0 * std::log1p(-u)) *
                     std::cos(2.0 * 3.14159265358979323846 * v);
            norm2 += h.a[j] * h.a[j];
        }
        for (int j = 0; j < 16; ++j) h.a[j] /= std::sqrt(norm2);
        h.b = 0.0;
        c.hyperplanes.push_back(std::move(h));
    }
    AnyCollection any{c};
    uint64_t seed = 0;
    for (auto _ : state) {
        WitnessConfig cfg;
        cfg.seed = seed++;
        cfg.budget = 10000;
        WitnessResult r = end_to_end_witness(any, cfg);
        benchmark::DoNotOptimize(r.attempts);
    }
}
BENCHMARK(BM_WitnessSearch)->Arg(1)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
