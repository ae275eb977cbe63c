// mixadc: experiment runner for mixed-ADC PMCW MIMO radar.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mixadc/harness.hpp"
#include "selftest.hpp"

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string scale;
};

mixadc::ExperimentConfig resolve(mixadc::Experiment e, const Flags& f) {
    // --scale picks the base profile; values in the config file override it.
    const mixadc::Scale base = f.scale.empty() ? mixadc::Scale::paper : mixadc::parse_scale(f.scale);
    mixadc::ExperimentConfig cfg = mixadc::default_config(e, base);
    if (!f.config.empty()) cfg = mixadc::load_config(f.config, cfg);
    if (cfg.experiment != e) {
        throw mixadc::DomainError(std::string("config: file describes '") + mixadc::experiment_name(cfg.experiment) +
                                  "' but subcommand is '" + mixadc::experiment_name(e) + "'");
    }
    if (f.seed) cfg.run.seed = *f.seed;
    if (!f.out.empty()) cfg.run.out_dir = f.out;
    cfg.validate();
    return cfg;
}

int error_record(const std::string& sub, const char* type, const std::string& msg, int code) {
    nlohmann::json j = {{"status", "error"}, {"subcommand", sub}, {"type", type}, {"message", msg}, {"exit_code", code}};
    std::cerr << j.dump() << std::endl;
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixed-ADC PMCW MIMO radar: CRBs, mLIKES imaging and Monte-Carlo experiments"};
    app.require_subcommand(1);
    Flags flags;
    std::string sub;

    auto add_common = [&](CLI::App* s) {
        s->add_option("--config", flags.config, "JSON experiment config")->check(CLI::ExistingFile);
        s->add_option("--seed", flags.seed, "master seed (u64)");
        s->add_option("--out", flags.out, "output directory");
        s->add_option("--scale", flags.scale, "dimension profile")->check(CLI::IsMember({"paper", "desk"}));
    };
    auto* crb = app.add_subcommand("crb-sweep", "root CRB versus dynamic range r");
    auto* rmse = app.add_subcommand("rmse", "Monte-Carlo RMSE of mLIKES + refinement against the CRB");
    auto* img = app.add_subcommand("imaging", "angle-Doppler images: MF, LIKES, 1bLIKES, mLIKES");
    auto* self = app.add_subcommand("selftest", "fast internal consistency checks");
    for (auto* s : {crb, rmse, img, self}) add_common(s);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (self->parsed()) {
            sub = "selftest";
            return mixadc::tools::run_selftest(std::cout) ? 0 : 1;
        }
        mixadc::Experiment e = mixadc::Experiment::crb_sweep;
        if (crb->parsed()) {
            sub = "crb-sweep";
        } else if (rmse->parsed()) {
            sub = "rmse";
            e = mixadc::Experiment::rmse;
        } else {
            sub = "imaging";
            e = mixadc::Experiment::imaging;
        }
        const auto cfg = resolve(e, flags);
        const auto t0 = std::chrono::steady_clock::now();
        const auto files = mixadc::run_and_write(cfg);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (const auto& f : files) std::cout << f << '\n';
        std::cout << sub << " (" << mixadc::scale_name(cfg.scale) << ") finished in " << secs << " s\n";
        return 0;
    } catch (const mixadc::DomainError& e) {
        return error_record(sub, "domain_error", e.what(), 2);
    } catch (const mixadc::DimensionError& e) {
        return error_record(sub, "dimension_error", e.what(), 2);
    } catch (const mixadc::NumericalError& e) {
        return error_record(sub, "numerical_error", e.what(), 3);
    } catch (const std::exception& e) {
        return error_record(sub, "runtime_error", e.what(), 4);
    }
}
