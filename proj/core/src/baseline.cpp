#include "mixadc/baseline.hpp"

namespace mixadc {

RMat matched_filter(const CVec& x, const DictionaryOperator& op) {
    if (x.size() != op.rows()) throw DimensionError("matched_filter: data length mismatch");
    const CVec corr = op.adjoint(x);
    const RVec n2 = op.column_norms2();
    RVec img = corr.cwiseAbs2().cwiseQuotient(n2.cwiseAbs2());
    return Eigen::Map<const RMat>(img.data(), op.grid().k_theta(), op.grid().k_omega());
}

RMat matched_filter(const MeasurementSet& meas, const DictionaryOperator& op) {
    if (!meas.adc.onebit_rows().empty()) {
        throw DomainError("matched_filter: requires high-precision data on every channel, got sign measurements");
    }
    return matched_filter(meas.y0, op);
}

}  // namespace mixadc
