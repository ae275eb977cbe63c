#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>

#include "mixadc/harness.hpp"

namespace mixadc {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << std::setprecision(12);
    return f;
}

}  // namespace

void write_crb_csv(const std::string& path, const std::vector<CrbSweepRow>& rows, int k) {
    auto f = open_out(path);
    f << "r [ratio],receiver";
    for (int i = 1; i <= k; ++i) f << ",rcrb_theta_" << i << " [rad]";
    for (int i = 1; i <= k; ++i) f << ",rcrb_omega_" << i << " [rad/PRI]";
    for (int i = 1; i <= k; ++i) f << ",rcrb_bR_" << i << " [amplitude]";
    for (int i = 1; i <= k; ++i) f << ",rcrb_bI_" << i << " [amplitude]";
    f << ",singular [bool],condition [ratio]\n";
    for (const auto& r : rows) {
        f << r.r << ',' << r.receiver;
        for (Eigen::Index i = 0; i < r.root_crb.size(); ++i) f << ',' << r.root_crb(i);
        f << ',' << (r.singular ? 1 : 0) << ',' << r.condition << '\n';
    }
}

void write_rmse_csv(const std::string& path, const RmseResult& res) {
    auto f = open_out(path);
    f << "r [ratio],parameter,rmse [native units],rcrb [native units],rmse_over_rcrb [ratio],trials [count]\n";
    for (const auto& r : res.rows) {
        f << r.r << ',' << r.parameter << ',' << r.rmse << ',' << r.rcrb << ',' << r.rmse / r.rcrb << ',' << r.trials
          << '\n';
    }
}

void write_khat_csv(const std::string& path, const RmseResult& res) {
    auto f = open_out(path);
    f << "r [ratio],k_hat [count],trials [count]\n";
    for (const auto& [r, hist] : res.k_hat_histogram) {
        for (const auto& [k, n] : hist) f << r << ',' << k << ',' << n << '\n';
    }
}

void write_matrix(const std::string& path, const RMat& m) {
    auto f = open_out(path);
    f << std::scientific << std::setprecision(9);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) f << (j ? " " : "") << m(i, j);
        f << '\n';
    }
}

void write_pgm(const std::string& path, const RMat& m, double dynamic_db) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    const double peak = m.maxCoeff();
    f << "P5\n" << m.cols() << ' ' << m.rows() << "\n255\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            double db = (peak > 0.0 && m(i, j) > 0.0) ? 10.0 * std::log10(m(i, j) / peak) : -dynamic_db;
            db = std::clamp(db, -dynamic_db, 0.0);
            f.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * (1.0 + db / dynamic_db)))));
        }
    }
}

void write_targets_csv(const std::string& path, const std::vector<Target>& targets) {
    auto f = open_out(path);
    f << "theta [deg],omega [rad/PRI],b_R [amplitude],b_I [amplitude],power [dB]\n";
    for (const auto& t : targets) {
        f << rad2deg(t.theta) << ',' << t.omega << ',' << t.amp.real() << ',' << t.amp.imag() << ','
          << 10.0 * std::log10(std::norm(t.amp)) << '\n';
    }
}

std::vector<std::string> run_and_write(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    cfg.validate();
    const fs::path dir(cfg.run.out_dir);
    fs::create_directories(dir);
    std::vector<std::string> written;
    auto path = [&](const std::string& name) {
        written.push_back((dir / name).string());
        return written.back();
    };
    {
        auto f = open_out(path("config_used.json"));
        f << config_to_json(cfg) << '\n';
    }
    switch (cfg.experiment) {
        case Experiment::crb_sweep: {
            const auto rows = run_crb_sweep(cfg);
            write_crb_csv(path("crb_sweep.csv"), rows, 2);
            break;
        }
        case Experiment::rmse: {
            const auto res = run_rmse_mc(cfg);
            write_rmse_csv(path("rmse.csv"), res);
            write_khat_csv(path("khat.csv"), res);
            break;
        }
        case Experiment::imaging: {
            const auto res = run_imaging(cfg);
            auto summary = open_out(path("imaging_summary.csv"));
            summary << "trial [index],method,recovered [count],truth [count],seconds [s]\n";
            for (std::size_t t = 0; t < res.runs.size(); ++t) {
                const auto& run = res.runs[t];
                const std::string sfx = "_" + std::to_string(t);
                write_targets_csv(path("targets_truth" + sfx + ".csv"), run.truth.targets);
                write_targets_csv(path("targets_refined" + sfx + ".csv"), run.refined);
                for (const auto& m : run.methods) {
                    write_matrix(path("image_" + m.name + sfx + ".txt"), m.image);
                    if (cfg.run.write_pgm) write_pgm(path("image_" + m.name + sfx + ".pgm"), m.image);
                    if (m.recovered >= 0) write_targets_csv(path("detections_" + m.name + sfx + ".csv"), m.detections);
                    summary << t << ',' << m.name << ',' << m.recovered << ',' << run.truth.targets.size() << ','
                            << m.seconds << '\n';
                }
            }
            break;
        }
    }
    return written;
}

}  // namespace mixadc
