#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qckit/errors.hpp"
#include "qckit/multiset.hpp"
#include "qckit/spectrum.hpp"
#include "qckit/summation.hpp"

namespace qckit {

/// Gaussian test function h(x) = e^{-pi ((x-center)/scale)^2} and its
/// closed-form transform.  Gaussians are the only test family on purpose:
/// the transform needs no quadrature and the super-exponential decay makes
/// every truncation certifiable.
struct GaussianTest {
    double scale = 1.0;
    double center = 0.0;

    GaussianTest() = default;
    GaussianTest(double s, double c) : scale(s), center(c) {
        if (!(scale > 0.0) || !std::isfinite(scale))
            throw std::invalid_argument("GaussianTest: scale must be positive and finite");
        if (!std::isfinite(center))
            throw std::invalid_argument("GaussianTest: center must be finite");
    }

    double h(double x) const {
        double u = (x - center) / scale;
        return std::exp(-std::numbers::pi * u * u);
    }

    /// hhat(g) = scale * e^{-2 pi i center g} * e^{-pi (scale g)^2};
    /// in particular hhat(0) = scale, the integral of h.
    std::complex<double> hhat(double g) const {
        double m = scale * std::exp(-std::numbers::pi * (scale * g) * (scale * g));
        return std::polar(m, -2.0 * std::numbers::pi * center * g);
    }
};

struct PoissonReport {
    std::complex<double> lhs;  // sum of c_lambda hhat(lambda) over |lambda| <= cutoff
    std::complex<double> rhs;  // sum of b_gamma h(gamma) over |gamma| <= cutoff
    double residual = 0.0;
    /// Certified bounds on what the two truncations can have dropped.
    double lambda_tail_bound = 0.0;
    double gamma_tail_bound = 0.0;
};

namespace detail {

/// Bounds sum_{j>=0} per_unit_cap * e^{-pi (u0 + j*step)^2} by the leading
/// term over a geometric envelope.  Infinite when u0 is not positive, i.e.
/// when the cutoff has not even cleared the bulk of the Gaussian.
inline double gaussian_tail(double per_unit_cap, double u0, double step) {
    if (!(u0 > 0.0)) return std::numeric_limits<double>::infinity();
    double lead = std::exp(-std::numbers::pi * u0 * u0);
    double ratio = std::exp(-2.0 * std::numbers::pi * u0 * step);
    return per_unit_cap * lead / (1.0 - ratio);
}

} // namespace detail

/// Two-sided check of sum c_lambda hhat(lambda) = sum b_gamma h(gamma) on a
/// Gaussian test function, truncating each side at its cutoff and refusing
/// to report a residual whose certifiable truncation error exceeds
/// tail_tol.  On failure the fix is always the same: enlarge the cutoffs
/// (and with them the window/band the inputs carry).
inline PoissonReport poisson_residual(const PointMultiset& A, const Spectrum& S,
                                      const GaussianTest& h, double lambda_cutoff,
                                      double gamma_cutoff, double tail_tol = 1e-12) {
    if (!(lambda_cutoff > 0.0) || !std::isfinite(lambda_cutoff) ||
        !(gamma_cutoff > 0.0) || !std::isfinite(gamma_cutoff))
        throw std::invalid_argument("poisson_residual: cutoffs must be positive and finite");
    if (!(tail_tol > 0.0))
        throw std::invalid_argument("poisson_residual: tail_tol must be positive");
    if (A.window_lo() > -lambda_cutoff || A.window_hi() < lambda_cutoff)
        throw std::invalid_argument(
            "poisson_residual: lambda cutoff reaches outside the completeness window");
    if (S.band_lo() > -gamma_cutoff || S.band_hi() < gamma_cutoff)
        throw std::invalid_argument(
            "poisson_residual: gamma cutoff reaches outside the spectral band");

    PoissonReport rep;

    // Point side: |hhat| = scale * e^{-pi (scale |lambda|)^2} regardless of
    // the test center, and each unit interval beyond the cutoff holds at
    // most k1 points.
    double k1 = static_cast<double>(A.max_window_count(1.0));
    rep.lambda_tail_bound = detail::gaussian_tail(
        2.0 * k1 * h.scale, h.scale * lambda_cutoff, h.scale);

    // Spectral side: h decays away from its center, and each unit band
    // beyond the cutoff carries at most the observed unit-band mass.  The
    // worst side is the one the center leans toward.
    double m1 = S.max_unit_band_mass();
    rep.gamma_tail_bound = detail::gaussian_tail(
        2.0 * m1, (gamma_cutoff - std::abs(h.center)) / h.scale, 1.0 / h.scale);

    if (rep.lambda_tail_bound + rep.gamma_tail_bound > tail_tol)
        throw tolerance_error(
            "poisson_residual: certified truncation tails total " +
            std::to_string(rep.lambda_tail_bound + rep.gamma_tail_bound) +
            " > tail_tol = " + std::to_string(tail_tol) +
            "; increase the cutoffs");

    complex_sum lhs;
    const auto& pts = A.points();
    const auto& mults = A.mults();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (std::abs(pts[i]) > lambda_cutoff) continue;
        lhs.add(static_cast<double>(mults[i]) * h.hhat(pts[i]));
    }
    complex_sum rhs;
    for (const auto& a : S.atoms()) {
        if (std::abs(a.gamma) > gamma_cutoff) continue;
        rhs.add(a.b * h.h(a.gamma));
    }

    rep.lhs = lhs.value();
    rep.rhs = rhs.value();
    rep.residual = std::abs(rep.lhs - rep.rhs);
    return rep;
}

} // namespace qckit
