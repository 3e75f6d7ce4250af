#pragma once

#include <cmath>

namespace qckit {
namespace detail {

/// Golden-section search for a local minimum of fn over [a, b].  Assumes fn
/// is unimodal there; 80 iterations contract the interval by ~1e-16, i.e.
/// to floating-point resolution for the scales this library works at.
template <typename Fn>
double golden_min(Fn&& fn, double a, double b, int iters = 80) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = fn(c), fd = fn(d);
    for (int it = 0; it < iters; ++it) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - inv_phi * (b - a);
            fc = fn(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + inv_phi * (b - a);
            fd = fn(d);
        }
    }
    return fc < fd ? c : d;
}

} // namespace detail
} // namespace qckit
