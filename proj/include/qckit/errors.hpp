#pragma once

#include <stdexcept>
#include <string>

namespace qckit {

/// Thrown when a computation cannot certify the accuracy that was asked of
/// it (truncation window too small, spectral band too narrow for the
/// requested tolerance, and so on).  Distinct from std::invalid_argument,
/// which we reserve for structurally bad inputs: here the input made sense
/// but the numbers don't reach the bar.
class tolerance_error : public std::runtime_error {
public:
    explicit tolerance_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace qckit
