#include <benchmark/benchmark.h>

#include "mixadc/harness.hpp"
#include "mixadc/likelihood.hpp"
#include "mixadc/mlikes.hpp"
#include "mixadc/refine.hpp"

using namespace mixadc;

namespace {

struct DeskRmse {
    RadarSystem sys{2, 4, 2.0, 0.5, gen_code(2, 16, 7)};
    Grid grid{32, 64};
    Scene scene;
    MeasurementSet meas;

    explicit DeskRmse(std::vector<int> delta) : meas(make(std::move(delta))) {}

    MeasurementSet make(std::vector<int> delta) {
        scene.targets = {{grid.theta(9), grid.omega(20), std::polar(1.0, 0.785)},
                         {grid.theta(22), grid.omega(46), std::polar(1.0, 0.785)}};
        scene.noise_var = 1.0 / 31.6;
        const CMat h = gen_thresholds(4, 16, avg_received_power(sys, scene), 3);
        return quantize_mixed(simulate(sys, scene, 4), AdcConfig(std::move(delta), h));
    }
};

void BM_MlikesDeskRmse(benchmark::State& st) {
    const DeskRmse d(delta_pattern(AdcPattern::mixed1, 4));
    const DictionaryOperator op(d.sys, d.grid);
    for (auto _ : st) benchmark::DoNotOptimize(mlikes_run(d.meas, op));
}
BENCHMARK(BM_MlikesDeskRmse)->Unit(benchmark::kMillisecond);

void BM_NllGrad(benchmark::State& st) {
    const DeskRmse d(delta_pattern(AdcPattern::mixed1, 4));
    std::vector<TargetEstimate> est;
    for (const auto& t : d.scene.targets) est.push_back({t.theta + 0.01, t.omega, 5.0 * t.amp});
    for (auto _ : st) benchmark::DoNotOptimize(nll_grad(est, 5.0, d.meas, d.sys));
}
BENCHMARK(BM_NllGrad)->Unit(benchmark::kMicrosecond);

void BM_CyclicRefine(benchmark::State& st) {
    const DeskRmse d(delta_pattern(AdcPattern::mixed1, 4));
    const double eta = std::sqrt(31.6);
    std::vector<TargetEstimate> init;
    for (const auto& t : d.scene.targets) init.push_back({t.theta, t.omega, eta * t.amp});
    for (auto _ : st) benchmark::DoNotOptimize(cyclic_refine(init, eta, d.meas, d.sys, d.grid));
}
BENCHMARK(BM_CyclicRefine)->Unit(benchmark::kMillisecond);

void BM_ImagingTrialDesk(benchmark::State& st) {
    ExperimentConfig cfg = default_config(Experiment::imaging, Scale::desk);
    cfg.run.workers = 1;
    for (auto _ : st) benchmark::DoNotOptimize(run_imaging_trial(cfg, 0));
}
BENCHMARK(BM_ImagingTrialDesk)->Unit(benchmark::kSecond)->Iterations(1);

}  // namespace
