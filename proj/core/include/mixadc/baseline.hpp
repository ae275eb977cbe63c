#pragma once

#include "mixadc/dictionary.hpp"
#include "mixadc/quantizer.hpp"

namespace mixadc {

/// Matched-filter angle-Doppler image |a^H x|^2 / ||a||^4 as a
/// K_theta x K_omega matrix (row = angle index). A unit-amplitude on-grid
/// target reads 1 at its own cell.
RMat matched_filter(const CVec& x, const DictionaryOperator& op);

/// Same, for a measurement set; requires every channel to be high precision.
RMat matched_filter(const MeasurementSet& meas, const DictionaryOperator& op);

}  // namespace mixadc
