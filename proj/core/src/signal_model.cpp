#include "mixadc/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mixadc/rng.hpp"

namespace mixadc {

RadarSystem::RadarSystem(int m_tx, int m_rx, double d_tx, double d_rx, CMat code)
    : m_tx_(m_tx), m_rx_(m_rx), d_tx_(d_tx), d_rx_(d_rx), code_(std::move(code)) {
    if (m_tx_ < 1 || m_rx_ < 1 || code_.cols() < 1) {
        throw DimensionError("RadarSystem: M_t, M_r and N must all be >= 1");
    }
    if (code_.rows() != m_tx_) {
        std::ostringstream os;
        os << "RadarSystem: code has " << code_.rows() << " rows, expected M_t = " << m_tx_;
        throw DimensionError(os.str());
    }
    for (Eigen::Index i = 0; i < code_.size(); ++i) {
        if (std::abs(std::abs(code_(i)) - 1.0) > 1e-9) {
            throw DomainError("RadarSystem: code entries must be unimodular");
        }
    }
}

void Scene::validate() const {
    if (!(noise_var > 0.0)) throw DomainError("Scene: noise_var must be > 0");
    for (const auto& t : targets) {
        if (!(std::abs(t.theta) < kPi / 2.0)) throw DomainError("Scene: |theta| must be < pi/2");
        if (!std::isfinite(t.omega)) throw DomainError("Scene: omega must be finite");
    }
}

Grid::Grid(int k_theta, int k_omega) : k_theta_(k_theta), k_omega_(k_omega) {
    if (k_theta < 1 || k_omega < 1) throw DimensionError("Grid: sizes must be >= 1");
}

int Grid::nearest_theta(double theta) const {
    const int k = static_cast<int>(std::floor((theta + kPi / 2.0) / theta_step()));
    return std::clamp(k, 0, k_theta_ - 1);
}

int Grid::nearest_omega(double omega) const {
    const int k = static_cast<int>(std::lround((wrap_phase(omega) + kPi) / omega_step()));
    return ((k % k_omega_) + k_omega_) % k_omega_;
}

double wrap_phase(double omega) {
    double w = std::fmod(omega + kPi, 2.0 * kPi);
    if (w < 0.0) w += 2.0 * kPi;
    return w - kPi;
}

namespace {

void check_theta(double theta) {
    if (!(std::abs(theta) < kPi / 2.0)) {
        throw DomainError("steering vector: theta must satisfy |theta| < pi/2");
    }
}

CVec ula(int m, double spacing, double theta) {
    check_theta(theta);
    CVec a(m);
    const double phase = -2.0 * kPi * spacing * std::sin(theta);
    for (int i = 0; i < m; ++i) a(i) = std::polar(1.0, phase * i);
    return a;
}

CVec ula_deriv(int m, double spacing, double theta) {
    CVec a = ula(m, spacing, theta);
    const double dphase = -2.0 * kPi * spacing * std::cos(theta);
    for (int i = 0; i < m; ++i) a(i) *= kJ * (dphase * i);
    return a;
}

}  // namespace

CVec steering_tx(const RadarSystem& sys, double theta) { return ula(sys.m_tx(), sys.d_tx(), theta); }
CVec steering_rx(const RadarSystem& sys, double theta) { return ula(sys.m_rx(), sys.d_rx(), theta); }
CVec steering_tx_deriv(const RadarSystem& sys, double theta) {
    return ula_deriv(sys.m_tx(), sys.d_tx(), theta);
}
CVec steering_rx_deriv(const RadarSystem& sys, double theta) {
    return ula_deriv(sys.m_rx(), sys.d_rx(), theta);
}

CVec doppler_vec(int n_pri, double omega) {
    CVec d(n_pri);
    for (int n = 0; n < n_pri; ++n) d(n) = std::polar(1.0, omega * n);
    return d;
}

CMat gen_code(int m_tx, int n_pri, std::uint64_t seed) {
    Rng rng(seed);
    CMat c(m_tx, n_pri);
    // Top bit of each draw: platform independent, unlike bernoulli_distribution.
    for (int n = 0; n < n_pri; ++n) {
        for (int m = 0; m < m_tx; ++m) c(m, n) = (rng() >> 63) ? 1.0 : -1.0;
    }
    return c;
}

CVec slow_time_response(const RadarSystem& sys, double theta, double omega) {
    CVec v = sys.code().transpose() * steering_tx(sys, theta);
    return v.cwiseProduct(doppler_vec(sys, omega));
}

namespace {

CVec kron(const CVec& outer, const CVec& inner) {
    CVec out(outer.size() * inner.size());
    for (Eigen::Index i = 0; i < outer.size(); ++i) out.segment(i * inner.size(), inner.size()) = outer(i) * inner;
    return out;
}

}  // namespace

CVec atom(const RadarSystem& sys, double theta, double omega) {
    return kron(slow_time_response(sys, theta, omega), steering_rx(sys, theta));
}

AtomDerivatives atom_with_derivatives(const RadarSystem& sys, double theta, double omega) {
    const CVec d = doppler_vec(sys, omega);
    const CVec ar = steering_rx(sys, theta);
    const CVec dar = steering_rx_deriv(sys, theta);
    const CVec v = (sys.code().transpose() * steering_tx(sys, theta)).cwiseProduct(d);
    const CVec dv_theta = (sys.code().transpose() * steering_tx_deriv(sys, theta)).cwiseProduct(d);
    CVec dv_omega = v;
    for (Eigen::Index n = 0; n < v.size(); ++n) dv_omega(n) *= kJ * static_cast<double>(n);
    return {kron(v, ar), kron(dv_theta, ar) + kron(v, dar), kron(dv_omega, ar)};
}

CMat dictionary(const RadarSystem& sys, const Grid& grid) {
    CMat a(sys.n_samples(), grid.size());
    for (int ko = 0; ko < grid.k_omega(); ++ko) {
        for (int kt = 0; kt < grid.k_theta(); ++kt) {
            a.col(grid.column(kt, ko)) = atom(sys, grid.theta(kt), grid.omega(ko));
        }
    }
    return a;
}

CVec noise_free_signal(const RadarSystem& sys, const std::vector<Target>& targets) {
    CVec x = CVec::Zero(sys.n_samples());
    for (const auto& t : targets) x += t.amp * atom(sys, t.theta, t.omega);
    return x;
}

CVec complex_noise(Eigen::Index n, double var, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(var / 2.0));
    CVec e(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        e(i) = {re, im};
    }
    return e;
}

CMat simulate(const RadarSystem& sys, const Scene& scene, std::uint64_t seed) {
    scene.validate();
    CVec x = noise_free_signal(sys, scene.targets) + complex_noise(sys.n_samples(), scene.noise_var, seed);
    return unvec(x, sys.m_rx(), sys.n_pri());
}

CVec vec(const CMat& x) { return Eigen::Map<const CVec>(x.data(), x.size()); }

CMat unvec(const CVec& x, int rows, int cols) {
    if (x.size() != static_cast<Eigen::Index>(rows) * cols) throw DimensionError("unvec: size mismatch");
    return Eigen::Map<const CMat>(x.data(), rows, cols);
}

}  // namespace mixadc
