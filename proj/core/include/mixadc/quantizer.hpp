#pragma once

#include <cstdint>
#include <vector>

#include "mixadc/signal_model.hpp"

namespace mixadc {

/// Receiver ADC assignment: delta[m] = 1 puts receive channel m on a
/// high-precision I/Q pair, 0 on one-bit comparators against H(m, n).
class AdcConfig {
public:
    AdcConfig(std::vector<int> delta, CMat thresholds);

    const std::vector<int>& delta() const { return delta_; }
    const CMat& thresholds() const { return thresholds_; }
    int m_rx() const { return static_cast<int>(delta_.size()); }
    int n_pri() const { return static_cast<int>(thresholds_.cols()); }
    /// Number of high-precision channels L.
    int num_high_precision() const { return num_hp_; }
    bool is_high_precision(int m) const { return delta_[static_cast<std::size_t>(m)] != 0; }

    /// Indices into vec(X) (n * M_r + m ordering) of high-precision and
    /// one-bit samples, each in increasing order.
    const std::vector<int>& hp_rows() const { return hp_rows_; }
    const std::vector<int>& onebit_rows() const { return onebit_rows_; }

    /// h_1 = vec(H[delta_bar, :]).
    CVec onebit_thresholds() const;

private:
    std::vector<int> delta_;
    CMat thresholds_;
    int num_hp_ = 0;
    std::vector<int> hp_rows_;
    std::vector<int> onebit_rows_;
};

/// Named receive configurations used by the experiments.
enum class AdcPattern { high_precision, one_bit, mixed1, mixed2, mixed3 };

/// delta vector for a pattern: MixedL puts the first 1, 2 or ceil(M_r/2)
/// channels on high-precision ADCs.
std::vector<int> delta_pattern(AdcPattern pattern, int m_rx);
const char* pattern_name(AdcPattern pattern);
AdcPattern parse_pattern(const std::string& name);

/// Mixed-ADC output split into the high-precision block y0 = vec(Y[delta,:])
/// and the sign block y1 = vec(Y[delta_bar,:]).
struct MeasurementSet {
    CVec y0;
    CVec y1;
    AdcConfig adc;

    int m_rx() const { return adc.m_rx(); }
    int n_pri() const { return adc.n_pri(); }

    /// Y = diag(delta) X + diag(delta_bar) Z reassembled as M_r x N.
    CMat assemble() const;
};

/// sign(Re) + j sign(Im) with sign(0) = +1.
cplx signc(cplx x);
CMat signc(const CMat& x);
CVec signc(const CVec& x);

/// Eight-level (by default) threshold matrix. Real and imaginary parts are
/// drawn independently and uniformly from the n_levels equispaced values
/// spanning [-sqrt(p_out), sqrt(p_out)]. The draw depends only on the seed,
/// so a fixed seed yields the same level pattern for every p_out.
CMat gen_thresholds(int m_rx, int n_pri, double p_out, std::uint64_t seed, int n_levels = 8);

/// The level set used by gen_thresholds.
std::vector<double> threshold_levels(double p_out, int n_levels = 8);

/// Mixed-ADC quantization of an unquantized M_r x N snapshot.
MeasurementSet quantize_mixed(const CMat& x, const AdcConfig& adc);

/// Average received power per entry of X: mean_{m,n} |E X(m,n)|^2 + sigma^2,
/// evaluated exactly for the system's code.
double avg_received_power(const RadarSystem& sys, const Scene& scene);

}  // namespace mixadc
