#pragma once

#include <cstdint>
#include <vector>

#include "mixadc/types.hpp"

namespace mixadc {

/// PMCW MIMO array: transmit/receive ULAs and the slow-time code matrix.
///
/// Element spacings are in wavelengths. The code matrix is M_t x N with
/// unimodular entries; construction rejects anything else.
class RadarSystem {
public:
    RadarSystem(int m_tx, int m_rx, double d_tx, double d_rx, CMat code);

    int m_tx() const { return m_tx_; }
    int m_rx() const { return m_rx_; }
    int n_pri() const { return static_cast<int>(code_.cols()); }
    double d_tx() const { return d_tx_; }
    double d_rx() const { return d_rx_; }
    const CMat& code() const { return code_; }

    /// Length of vec(X), i.e. N * M_r.
    int n_samples() const { return n_pri() * m_rx_; }

private:
    int m_tx_;
    int m_rx_;
    double d_tx_;
    double d_rx_;
    CMat code_;
};

struct Target {
    double theta = 0.0;  // rad
    double omega = 0.0;  // rad / PRI
    cplx amp{0.0, 0.0};
};

struct Scene {
    std::vector<Target> targets;
    double noise_var = 1.0;

    /// Throws DomainError if noise_var <= 0 or an angle is outside (-pi/2, pi/2).
    void validate() const;
};

/// Uniform angle-Doppler grid. Angles are cell midpoints of (-pi/2, pi/2);
/// Doppler points start at -pi and step 2*pi/K_omega. Dictionary columns are
/// ordered angle-fastest: column = k_omega * K_theta + k_theta.
class Grid {
public:
    Grid(int k_theta, int k_omega);

    int k_theta() const { return k_theta_; }
    int k_omega() const { return k_omega_; }
    int size() const { return k_theta_ * k_omega_; }
    double theta_step() const { return kPi / k_theta_; }
    double omega_step() const { return 2.0 * kPi / k_omega_; }

    double theta(int k) const { return -kPi / 2.0 + (k + 0.5) * theta_step(); }
    double omega(int k) const { return -kPi + k * omega_step(); }
    int column(int k_th, int k_om) const { return k_om * k_theta_ + k_th; }
    int theta_index(int column) const { return column % k_theta_; }
    int omega_index(int column) const { return column / k_theta_; }

    /// Nearest grid index (Doppler wraps modulo 2*pi).
    int nearest_theta(double theta) const;
    int nearest_omega(double omega) const;

private:
    int k_theta_;
    int k_omega_;
};

/// Wrap an angle into [-pi, pi).
double wrap_phase(double omega);

CVec steering_tx(const RadarSystem& sys, double theta);
CVec steering_rx(const RadarSystem& sys, double theta);
/// d/dtheta of the steering vectors.
CVec steering_tx_deriv(const RadarSystem& sys, double theta);
CVec steering_rx_deriv(const RadarSystem& sys, double theta);

/// Slow-time steering vector, entry n = exp(j n omega).
CVec doppler_vec(int n_pri, double omega);
inline CVec doppler_vec(const RadarSystem& sys, double omega) { return doppler_vec(sys.n_pri(), omega); }

/// Random +/-1 slow-time code, equiprobable, deterministic in `seed`.
CMat gen_code(int m_tx, int n_pri, std::uint64_t seed);

/// v(theta, omega) = (C^T a_t(theta)) .* d(omega), length N.
CVec slow_time_response(const RadarSystem& sys, double theta, double omega);

/// Dictionary atom v(theta, omega) (x) a_r(theta): vec of a_r v^T, length N*M_r.
CVec atom(const RadarSystem& sys, double theta, double omega);

struct AtomDerivatives {
    CVec value;
    CVec d_theta;
    CVec d_omega;
};

/// Atom together with its analytic partial derivatives.
AtomDerivatives atom_with_derivatives(const RadarSystem& sys, double theta, double omega);

/// Explicit (N*M_r) x (K_theta*K_omega) dictionary. Memory heavy; the
/// structured DictionaryOperator is what the solvers use.
CMat dictionary(const RadarSystem& sys, const Grid& grid);

/// Noise-free vec(X) = sum_k b_k atom(theta_k, omega_k).
CVec noise_free_signal(const RadarSystem& sys, const std::vector<Target>& targets);

/// Circular white Gaussian noise, per-entry variance `var` (var/2 per part).
CVec complex_noise(Eigen::Index n, double var, std::uint64_t seed);

/// X = sum_k a_r b_k (C^T a_t .* d)^T + E as an M_r x N matrix.
CMat simulate(const RadarSystem& sys, const Scene& scene, std::uint64_t seed);

/// Column-major vec of an M x N matrix and its inverse.
CVec vec(const CMat& x);
CMat unvec(const CVec& x, int rows, int cols);

}  // namespace mixadc
