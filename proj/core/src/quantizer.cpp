#include "mixadc/quantizer.hpp"

#include <cmath>
#include <sstream>

#include "mixadc/rng.hpp"

namespace mixadc {

AdcConfig::AdcConfig(std::vector<int> delta, CMat thresholds)
    : delta_(std::move(delta)), thresholds_(std::move(thresholds)) {
    if (static_cast<Eigen::Index>(delta_.size()) != thresholds_.rows()) {
        throw DimensionError("AdcConfig: delta length must equal threshold rows (M_r)");
    }
    for (int d : delta_) {
        if (d != 0 && d != 1) throw DomainError("AdcConfig: delta entries must be 0 or 1");
        num_hp_ += d;
    }
    const int m = m_rx();
    for (int n = 0; n < n_pri(); ++n) {
        for (int r = 0; r < m; ++r) (delta_[static_cast<std::size_t>(r)] ? hp_rows_ : onebit_rows_).push_back(n * m + r);
    }
}

CVec AdcConfig::onebit_thresholds() const {
    CVec h(static_cast<Eigen::Index>(onebit_rows_.size()));
    for (std::size_t i = 0; i < onebit_rows_.size(); ++i) h(static_cast<Eigen::Index>(i)) = thresholds_(onebit_rows_[i]);
    return h;
}

std::vector<int> delta_pattern(AdcPattern pattern, int m_rx) {
    std::vector<int> d(static_cast<std::size_t>(m_rx), 0);
    int n_hp = 0;
    switch (pattern) {
        case AdcPattern::high_precision: n_hp = m_rx; break;
        case AdcPattern::one_bit: n_hp = 0; break;
        case AdcPattern::mixed1: n_hp = 1; break;
        case AdcPattern::mixed2: n_hp = 2; break;
        case AdcPattern::mixed3: n_hp = (m_rx + 1) / 2; break;
    }
    for (int i = 0; i < std::min(n_hp, m_rx); ++i) d[static_cast<std::size_t>(i)] = 1;
    return d;
}

const char* pattern_name(AdcPattern pattern) {
    switch (pattern) {
        case AdcPattern::high_precision: return "hp";
        case AdcPattern::one_bit: return "1b";
        case AdcPattern::mixed1: return "mixed1";
        case AdcPattern::mixed2: return "mixed2";
        case AdcPattern::mixed3: return "mixed3";
    }
    return "?";
}

AdcPattern parse_pattern(const std::string& name) {
    for (auto p : {AdcPattern::high_precision, AdcPattern::one_bit, AdcPattern::mixed1, AdcPattern::mixed2,
                   AdcPattern::mixed3}) {
        if (name == pattern_name(p)) return p;
    }
    throw DomainError("unknown ADC pattern '" + name + "' (hp, 1b, mixed1, mixed2, mixed3)");
}

CMat MeasurementSet::assemble() const {
    CVec y(static_cast<Eigen::Index>(m_rx()) * n_pri());
    const auto& hp = adc.hp_rows();
    const auto& ob = adc.onebit_rows();
    for (std::size_t i = 0; i < hp.size(); ++i) y(hp[i]) = y0(static_cast<Eigen::Index>(i));
    for (std::size_t i = 0; i < ob.size(); ++i) y(ob[i]) = y1(static_cast<Eigen::Index>(i));
    return unvec(y, m_rx(), n_pri());
}

cplx signc(cplx x) { return {x.real() >= 0.0 ? 1.0 : -1.0, x.imag() >= 0.0 ? 1.0 : -1.0}; }

CMat signc(const CMat& x) { return x.unaryExpr([](cplx v) { return signc(v); }); }
CVec signc(const CVec& x) { return x.unaryExpr([](cplx v) { return signc(v); }); }

std::vector<double> threshold_levels(double p_out, int n_levels) {
    if (!(p_out >= 0.0)) throw DomainError("threshold_levels: p_out must be >= 0");
    if (n_levels < 2) throw DomainError("threshold_levels: need at least two levels");
    const double h_max = std::sqrt(p_out);
    const double step = 2.0 * h_max / (n_levels - 1);
    std::vector<double> levels(static_cast<std::size_t>(n_levels));
    for (int i = 0; i < n_levels; ++i) levels[static_cast<std::size_t>(i)] = -h_max + step * i;
    return levels;
}

CMat gen_thresholds(int m_rx, int n_pri, double p_out, std::uint64_t seed, int n_levels) {
    const auto levels = threshold_levels(p_out, n_levels);
    Rng rng(seed);
    std::uniform_int_distribution<int> pick(0, n_levels - 1);
    CMat h(m_rx, n_pri);
    for (int n = 0; n < n_pri; ++n) {
        for (int m = 0; m < m_rx; ++m) {
            const double re = levels[static_cast<std::size_t>(pick(rng))];
            const double im = levels[static_cast<std::size_t>(pick(rng))];
            h(m, n) = {re, im};
        }
    }
    return h;
}

MeasurementSet quantize_mixed(const CMat& x, const AdcConfig& adc) {
    if (x.rows() != adc.m_rx() || x.cols() != adc.n_pri()) {
        std::ostringstream os;
        os << "quantize_mixed: X is " << x.rows() << "x" << x.cols() << ", ADC config expects " << adc.m_rx()
           << "x" << adc.n_pri();
        throw DimensionError(os.str());
    }
    const auto& hp = adc.hp_rows();
    const auto& ob = adc.onebit_rows();
    CVec y0(static_cast<Eigen::Index>(hp.size()));
    CVec y1(static_cast<Eigen::Index>(ob.size()));
    for (std::size_t i = 0; i < hp.size(); ++i) y0(static_cast<Eigen::Index>(i)) = x(hp[i]);
    for (std::size_t i = 0; i < ob.size(); ++i) {
        y1(static_cast<Eigen::Index>(i)) = signc(x(ob[i]) - adc.thresholds()(ob[i]));
    }
    return {std::move(y0), std::move(y1), adc};
}

double avg_received_power(const RadarSystem& sys, const Scene& scene) {
    const CVec s = noise_free_signal(sys, scene.targets);
    return s.squaredNorm() / static_cast<double>(s.size()) + scene.noise_var;
}

}  // namespace mixadc
