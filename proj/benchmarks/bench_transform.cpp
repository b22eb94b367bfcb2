#include "mubsa/mub_family.hpp"
#include "mubsa/protocol.hpp"
#include "mubsa/rng.hpp"
#include "mubsa/transform.hpp"

#include <benchmark/benchmark.h>

#include <complex>

namespace {

Eigen::VectorXcd random_vector(int d, std::uint64_t seed) {
    mubsa::RandomSource rng(seed);
    Eigen::VectorXcd x(d);
    for (int i = 0; i < d; ++i) x[i] = {rng.gaussian(), rng.gaussian()};
    return x / x.norm();
}

void FastSpectrumSweep(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const mubsa::MubTransformer tx(d);
    const Eigen::VectorXcd x = random_vector(d, 1);
    for (auto _ : state) {
        for (int k = 1; k <= d + 1; ++k) {
            benchmark::DoNotOptimize(tx.analyze(x, k));
        }
    }
    state.SetComplexityN(d);
}
BENCHMARK(FastSpectrumSweep)->Arg(127)->Arg(251)->Arg(1021)->Complexity();

void NaiveSpectrumSweep(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const mubsa::MubFamily family = mubsa::MubFamily::build(d);
    const Eigen::VectorXcd x = random_vector(d, 1);
    for (auto _ : state) {
        for (int k = 1; k <= d + 1; ++k) {
            benchmark::DoNotOptimize(mubsa::mub_analyze_naive(family, x, k));
        }
    }
    state.SetComplexityN(d);
}
BENCHMARK(NaiveSpectrumSweep)->Arg(127)->Arg(251)->Complexity();

void FamilyVerification(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const mubsa::MubFamily family = mubsa::MubFamily::build(d);
    for (auto _ : state) {
        benchmark::DoNotOptimize(mubsa::verify_mub(family, 1e-10));
    }
}
BENCHMARK(FamilyVerification)->Arg(13)->Arg(31)->Arg(127);

void ChannelRound(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const mubsa::MubFamily family = mubsa::channel_family(d);
    mubsa::RandomSource rng(7);
    std::vector<mubsa::UserAssignment> users;
    for (int u = 1; u <= 2 * (d + 1); ++u) {
        users.push_back(mubsa::assign_user(d, 2, u));
    }
    for (auto _ : state) {
        Eigen::VectorXcd x = Eigen::VectorXcd::Zero(d);
        for (const auto& a : users) {
            x += mubsa::encode_user_round({0.6, 0.4}, a, family, rng);
        }
        benchmark::DoNotOptimize(x);
    }
}
BENCHMARK(ChannelRound)->Arg(5)->Arg(127);

} // namespace

BENCHMARK_MAIN();
