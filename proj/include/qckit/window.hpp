#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace qckit {

/// An interval on the line with explicit endpoint conventions.  Counting
/// questions on point sets are riddled with off-by-one-point bugs at
/// endpoints, so every query carries its closed/open flags instead of
/// relying on a convention the caller has to remember.
struct Window {
    double lo = 0.0;
    double hi = 0.0;
    bool closed_lo = true;
    bool closed_hi = false;

    Window() = default;
    Window(double lo_, double hi_, bool closed_lo_ = true, bool closed_hi_ = false)
        : lo(lo_), hi(hi_), closed_lo(closed_lo_), closed_hi(closed_hi_) {
        if (!std::isfinite(lo) || !std::isfinite(hi))
            throw std::invalid_argument("Window: endpoints must be finite");
        if (lo > hi)
            throw std::invalid_argument("Window: lo > hi");
    }

    static Window half_open(double lo, double hi) { return Window(lo, hi, true, false); }
    static Window closed(double lo, double hi) { return Window(lo, hi, true, true); }

    double length() const { return hi - lo; }

    bool contains(double x) const {
        if (x < lo || x > hi) return false;
        if (x == lo && !closed_lo) return false;
        if (x == hi && !closed_hi) return false;
        return true;
    }
};

} // namespace qckit
