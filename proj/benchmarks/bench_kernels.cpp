#include <benchmark/benchmark.h>

#include <limits>

#include "copulascore/copulas.hpp"
#include "copulascore/dist_math.hpp"
#include "copulascore/inference.hpp"
#include "copulascore/sim_harness.hpp"

using namespace copulascore;

static void BM_NormQuantile(benchmark::State& state) {
    double p = 0.001;
    for (auto _ : state) {
        benchmark::DoNotOptimize(norm_quantile(p));
        p = p < 0.998 ? p + 0.001 : 0.001;
    }
}
BENCHMARK(BM_NormQuantile);

static void BM_BvnRectProb(benchmark::State& state) {
    const double rho = static_cast<double>(state.range(0)) / 100.0;
    const BvnSpec spec(1.0, 1.0, rho);
    const double inf = std::numeric_limits<double>::infinity();
    for (auto _ : state) {
        benchmark::DoNotOptimize(bvn_rect_prob(spec, -2.24, 2.24, 2.23, inf));
    }
}
BENCHMARK(BM_BvnRectProb)->Arg(0)->Arg(50)->Arg(95)->Arg(99);

static void BM_CriticalValues(benchmark::State& state) {
    const LongRunCov omega{1.3, 0.4, 0.8};
    const auto h = state.range(0) == 0 ? Hypothesis::Equal : Hypothesis::LexSuperiority;
    for (auto _ : state) {
        benchmark::DoNotOptimize(critical_values(omega, 0.05, h));
    }
}
BENCHMARK(BM_CriticalValues)->Arg(0)->Arg(1);

static void BM_GaussianCopulaLogdensity(benchmark::State& state) {
    const EquiCorr ec(5, 0.5);
    const std::vector<double> u{0.1, 0.3, 0.5, 0.7, 0.9};
    for (auto _ : state) {
        benchmark::DoNotOptimize(gaussian_copula_logdensity(ec, u));
    }
}
BENCHMARK(BM_GaussianCopulaLogdensity);

static void BM_ScoreReplication(benchmark::State& state) {
    DgpSpec spec;
    spec.n = static_cast<int>(state.range(0));
    const auto setting = Setting::standard(SettingLabel::II);
    std::uint64_t rep = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(score_replication(spec, setting, 1, rep++));
    }
}
BENCHMARK(BM_ScoreReplication)->Arg(150)->Arg(300)->Unit(benchmark::kMicrosecond);

static void BM_TwoStepTest(benchmark::State& state) {
    DgpSpec spec;
    spec.n = 300;
    const auto scored = score_replication(spec, Setting::standard(SettingLabel::II), 1, 0);
    const auto d = score_diffs(scored.forecaster1, scored.forecaster2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(two_step_test(d, HacConfig{}, 0.05, Hypothesis::Equal));
    }
}
BENCHMARK(BM_TwoStepTest)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
