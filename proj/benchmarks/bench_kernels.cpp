#include <benchmark/benchmark.h>

#include <random>

#include "mixadc/crb.hpp"
#include "mixadc/dictionary.hpp"
#include "mixadc/special_functions.hpp"

using namespace mixadc;

namespace {

RadarSystem desk_imaging_system() { return RadarSystem(10, 10, 5.0, 0.5, gen_code(10, 32, 1)); }

CVec random_vec(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    CVec v(n);
    for (auto& z : v) z = {n01(rng), n01(rng)};
    return v;
}

void BM_DictionaryApply(benchmark::State& st) {
    const DictionaryOperator op(desk_imaging_system(), Grid(128, 64));
    const CVec a = random_vec(op.cols(), 2);
    for (auto _ : st) benchmark::DoNotOptimize(op.apply(a));
}
BENCHMARK(BM_DictionaryApply)->Unit(benchmark::kMicrosecond);

void BM_DictionaryAdjoint(benchmark::State& st) {
    const DictionaryOperator op(desk_imaging_system(), Grid(128, 64));
    const CVec z = random_vec(op.rows(), 3);
    for (auto _ : st) benchmark::DoNotOptimize(op.adjoint(z));
}
BENCHMARK(BM_DictionaryAdjoint)->Unit(benchmark::kMicrosecond);

void BM_WeightedGram(benchmark::State& st) {
    const DictionaryOperator op(desk_imaging_system(), Grid(128, 64));
    const RVec p = random_vec(op.cols(), 4).cwiseAbs2();
    for (auto _ : st) benchmark::DoNotOptimize(op.weighted_gram(p));
}
BENCHMARK(BM_WeightedGram)->Unit(benchmark::kMillisecond);

void BM_QuadraticForms(benchmark::State& st) {
    const DictionaryOperator op(desk_imaging_system(), Grid(128, 64));
    const CVec b = random_vec(op.rows(), 5);
    CMat q = b * b.adjoint();
    q.diagonal().array() += 1.0;
    for (auto _ : st) benchmark::DoNotOptimize(op.quadratic_forms(q));
}
BENCHMARK(BM_QuadraticForms)->Unit(benchmark::kMillisecond);

void BM_SpecialFunctions(benchmark::State& st) {
    double x = -40.0, acc = 0.0;
    for (auto _ : st) {
        acc += special::log_phi(x) + special::f_prime(x) + special::g_func(x);
        x = x > 40.0 ? -40.0 : x + 0.013;
    }
    benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_SpecialFunctions);

Scene paper_scene() {
    return Scene{{{0.3927, 1.3, std::polar(1.0, 0.785)}, {0.4418, 1.4, std::polar(0.1, 0.785)}}, 0.001};
}

void BM_FimBlocks(benchmark::State& st) {
    const RadarSystem sys(10, 10, 5.0, 0.5, gen_code(10, 64, 1));
    const Scene sc = paper_scene();
    for (auto _ : st) benchmark::DoNotOptimize(fim_hp_blocks(sys, sc));
}
BENCHMARK(BM_FimBlocks)->Unit(benchmark::kMicrosecond);

void BM_FimGram(benchmark::State& st) {
    const RadarSystem sys(10, 10, 5.0, 0.5, gen_code(10, 64, 1));
    const Scene sc = paper_scene();
    for (auto _ : st) benchmark::DoNotOptimize(fim_hp_khatri_rao(sys, sc));
}
BENCHMARK(BM_FimGram)->Unit(benchmark::kMicrosecond);

void BM_MixedBounds(benchmark::State& st) {
    const RadarSystem sys(10, 10, 5.0, 0.5, gen_code(10, 64, 1));
    const Scene sc = paper_scene();
    const AdcConfig adc(delta_pattern(AdcPattern::mixed1, 10),
                        gen_thresholds(10, 64, avg_received_power(sys, sc), 2));
    for (auto _ : st) benchmark::DoNotOptimize(crb_mixed_bounds(sys, sc, adc));
}
BENCHMARK(BM_MixedBounds)->Unit(benchmark::kMicrosecond);

}  // namespace
