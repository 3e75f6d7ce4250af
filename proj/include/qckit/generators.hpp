#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qckit/minimize.hpp"
#include "qckit/multiset.hpp"
#include "qckit/window.hpp"

namespace qckit {

/// The arithmetic progression αℤ + shift restricted to a window.
struct LatticeSpec {
    double alpha = 1.0;
    double shift = 0.0;
    Window window;
};

inline PointMultiset gen_lattice(const LatticeSpec& spec) {
    if (!(spec.alpha > 0.0) || !std::isfinite(spec.alpha))
        throw std::invalid_argument("gen_lattice: alpha must be positive and finite");
    if (!std::isfinite(spec.shift))
        throw std::invalid_argument("gen_lattice: shift must be finite");

    // Index bounds padded by one step so that rounding in the division can
    // never drop an endpoint; the exact window test below prunes the pad.
    double nlo = std::floor((spec.window.lo - spec.shift) / spec.alpha) - 1.0;
    double nhi = std::ceil((spec.window.hi - spec.shift) / spec.alpha) + 1.0;
    std::vector<WeightedPoint> pts;
    pts.reserve(static_cast<std::size_t>(std::max(0.0, nhi - nlo + 1.0)));
    bool zero_free = true;
    for (double n = nlo; n <= nhi; n += 1.0) {
        double x = spec.alpha * n + spec.shift;
        if (x < spec.window.lo || x > spec.window.hi) continue;
        if (x == 0.0) zero_free = false;
        pts.push_back({x, 1});
    }
    return build_multiset(std::move(pts), Window::closed(spec.window.lo, spec.window.hi),
                          zero_free);
}

/// Multiset union: coincident coordinates add their multiplicities.
/// All parts must declare the same completeness window, otherwise the
/// union's window would be a lie.
inline PointMultiset gen_union(const std::vector<PointMultiset>& parts,
                               double merge_tol = 0.0) {
    if (parts.empty())
        throw std::invalid_argument("gen_union: need at least one part");
    double lo = parts.front().window_lo();
    double hi = parts.front().window_hi();
    std::vector<WeightedPoint> all;
    for (const auto& p : parts) {
        if (p.window_lo() != lo || p.window_hi() != hi)
            throw std::invalid_argument("gen_union: mismatched completeness windows");
        for (std::size_t k = 0; k < p.points().size(); ++k)
            all.push_back({p.points()[k], p.mults()[k]});
    }
    bool zero_free = true;
    for (const auto& e : all)
        if (e.x == 0.0) zero_free = false;
    return build_multiset(std::move(all), Window::closed(lo, hi), zero_free, merge_tol);
}

inline PointMultiset gen_union(const std::vector<LatticeSpec>& specs,
                               double merge_tol = 0.0) {
    std::vector<PointMultiset> parts;
    parts.reserve(specs.size());
    for (const auto& s : specs) parts.push_back(gen_lattice(s));
    return gen_union(parts, merge_tol);
}

/// One term c·e^{2πiωx} of a trigonometric polynomial; frequencies are in
/// cycles, so ω = 1 means period 1.
struct TrigTerm {
    std::complex<double> c;
    double omega = 0.0;
};

struct TrigPolySpec {
    std::vector<TrigTerm> terms;
    Window window;
    /// Caller's promise that the terms come in conjugate pairs, making the
    /// polynomial real-valued on ℝ.  Checked, not trusted.
    bool real_valued = true;
};

struct TrigPolyZeros {
    PointMultiset zeros;
    /// Roots where |p'| fell below the multiplicity threshold; these were
    /// recorded with multiplicity 2, but tangency cannot be certified
    /// numerically, hence the explicit flag.
    std::vector<double> flagged_double;
};

namespace detail {

struct RealTrigPoly {
    // p(x) = Σ [Re c · cos(2πωx) − Im c · sin(2πωx)] over all terms; for a
    // conjugate-symmetric term list this equals Σ c e^{2πiωx} exactly.
    const std::vector<TrigTerm>& terms;

    double operator()(double x) const {
        double s = 0.0;
        for (const auto& t : terms) {
            double th = 2.0 * std::numbers::pi * t.omega * x;
            s += t.c.real() * std::cos(th) - t.c.imag() * std::sin(th);
        }
        return s;
    }
    double deriv(double x) const {
        double s = 0.0;
        for (const auto& t : terms) {
            double w = 2.0 * std::numbers::pi * t.omega;
            double th = w * x;
            s += -t.c.real() * std::sin(th) * w - t.c.imag() * std::cos(th) * w;
        }
        return s;
    }
};

inline double bisect_root(const RealTrigPoly& p, double a, double b, double fa) {
    // fa = p(a); p(b) has the opposite strict sign.
    for (int it = 0; it < 200 && (b - a) > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
        double m = 0.5 * (a + b);
        double fm = p(m);
        if (fm == 0.0) return m;
        if ((fm > 0) == (fa > 0)) { a = m; fa = fm; }
        else b = m;
    }
    return 0.5 * (a + b);
}

} // namespace detail

/// Finds the real zeros of a real-valued trigonometric polynomial inside
/// its window by a uniform scan plus bisection.  scan_step must be smaller
/// than half the narrowest zero gap; if the observed sign pattern
/// contradicts that promise the function throws instead of guessing.
///
/// Tangential (double) zeros are detected heuristically: if the polynomial
/// dips toward zero without crossing, or |p'| at a root is below
/// mult_threshold, the root gets multiplicity 2 and is flagged.  Dips that
/// come close to zero but not close enough to call are errors: they look
/// exactly like a pair of nearby simple roots at this resolution.
inline TrigPolyZeros gen_trig_poly_zeros(const TrigPolySpec& spec, double scan_step,
                                         double mult_threshold) {
    if (!spec.real_valued)
        throw std::invalid_argument("gen_trig_poly_zeros: realness flag must be set "
                                    "(complex-valued polynomials have no real zero set)");
    if (!(scan_step > 0.0) || !std::isfinite(scan_step) ||
        scan_step >= spec.window.length())
        throw std::invalid_argument("gen_trig_poly_zeros: scan_step must be in (0, window length)");
    if (!(mult_threshold > 0.0))
        throw std::invalid_argument("gen_trig_poly_zeros: mult_threshold must be positive");

    double scale = 0.0;
    for (const auto& t : spec.terms) scale += std::abs(t.c);
    if (!(scale > 0.0))
        throw std::invalid_argument("gen_trig_poly_zeros: zero polynomial");

    // Realness check: every term must have a conjugate partner at -omega.
    for (const auto& t : spec.terms) {
        if (t.omega == 0.0) {
            if (std::abs(t.c.imag()) > 1e-12 * scale)
                throw std::invalid_argument("gen_trig_poly_zeros: constant term not real");
            continue;
        }
        std::complex<double> partner = 0.0;
        for (const auto& u : spec.terms)
            if (std::abs(u.omega + t.omega) <= 1e-12 * (1.0 + std::abs(t.omega)))
                partner += u.c;
        if (std::abs(partner - std::conj(t.c)) > 1e-12 * scale)
            throw std::invalid_argument(
                "gen_trig_poly_zeros: term list is not conjugate-symmetric, p is not real");
    }

    detail::RealTrigPoly p{spec.terms};
    const double lo = spec.window.lo, hi = spec.window.hi;
    const double ztol = 1e-12 * scale;          // "this grid value is a zero"
    const double tangent_tol = 1e-9 * scale;    // refined dip minimum: call it tangential
    const double suspicious_tol = 1e-7 * scale; // refined dip minimum: refuse to decide

    std::size_t cells = static_cast<std::size_t>(std::ceil((hi - lo) / scan_step));
    std::vector<double> xs(cells + 1), vals(cells + 1);
    for (std::size_t k = 0; k <= cells; ++k) {
        xs[k] = (k == cells) ? hi : lo + static_cast<double>(k) * scan_step;
        vals[k] = p(xs[k]);
    }

    auto sgn = [&](double v) -> int {
        if (std::abs(v) <= ztol) return 0;
        return v > 0 ? 1 : -1;
    };

    std::vector<double> roots;
    // Grid points that are themselves zeros.
    for (std::size_t k = 0; k <= cells; ++k)
        if (sgn(vals[k]) == 0) roots.push_back(xs[k]);

    // Strict sign changes; remember which cells fired for the resolution check.
    std::vector<std::size_t> crossing_cells;
    for (std::size_t k = 0; k < cells; ++k) {
        int s0 = sgn(vals[k]), s1 = sgn(vals[k + 1]);
        if (s0 * s1 == -1) {
            crossing_cells.push_back(k);
            roots.push_back(detail::bisect_root(p, xs[k], xs[k + 1], vals[k]));
        }
    }
    for (std::size_t i = 1; i < crossing_cells.size(); ++i)
        if (crossing_cells[i] == crossing_cells[i - 1] + 1)
            throw std::runtime_error(
                "gen_trig_poly_zeros: sign changes in adjacent scan cells near x = " +
                std::to_string(xs[crossing_cells[i]]) +
                "; zero gap is below the scan resolution, decrease scan_step");

    // Dips: a local minimum of |p| on the grid, with constant sign around it,
    // can hide a root pair or a tangential zero.  Refine and decide.
    std::vector<double> flagged;
    for (std::size_t k = 1; k < cells; ++k) {
        int s = sgn(vals[k]);
        if (s == 0 || sgn(vals[k - 1]) != s || sgn(vals[k + 1]) != s) continue;
        if (!(std::abs(vals[k]) < std::abs(vals[k - 1]) &&
              std::abs(vals[k]) <= std::abs(vals[k + 1]))) continue;
        if (std::abs(vals[k]) > 0.5 * scale) continue;  // nowhere near zero

        double a = xs[k - 1], b = xs[k + 1];
        double xm = s > 0 ? detail::golden_min([&](double x) { return p(x); }, a, b)
                          : detail::golden_min([&](double x) { return -p(x); }, a, b);
        double m = p(xm);
        if (s > 0 ? (m < -ztol) : (m > ztol)) {
            // The grid stepped over a genuine crossing pair; both brackets
            // are now strict, so recover the two roots.
            roots.push_back(detail::bisect_root(p, a, xm, vals[k - 1]));
            roots.push_back(detail::bisect_root(p, xm, b, m));
        } else if (std::abs(m) <= tangent_tol) {
            roots.push_back(xm);
            flagged.push_back(xm);
        } else if (std::abs(m) <= suspicious_tol) {
            throw std::runtime_error(
                "gen_trig_poly_zeros: near-zero dip at x = " + std::to_string(xm) +
                " (|p| = " + std::to_string(std::abs(m)) +
                ") is indistinguishable from a root pair at this precision");
        }
        // else: benign dip, no root.
    }

    std::sort(roots.begin(), roots.end());
    double span = std::max({1.0, std::abs(lo), std::abs(hi)});
    double dedup = 1e-9 * span;

    std::vector<WeightedPoint> pts;
    std::vector<double> flagged_out;
    std::size_t i = 0;
    bool zero_free = true;
    while (i < roots.size()) {
        std::size_t j = i + 1;
        while (j < roots.size() && roots[j] - roots[j - 1] <= dedup) ++j;
        double r = roots[i + (j - i) / 2];
        bool tangential = std::abs(p.deriv(r)) < mult_threshold;
        for (double f : flagged)
            if (std::abs(f - r) <= dedup) tangential = true;
        pts.push_back({r, tangential ? 2 : 1});
        if (tangential) flagged_out.push_back(r);
        if (r == 0.0) zero_free = false;
        i = j;
    }

    TrigPolyZeros out;
    out.zeros = build_multiset(std::move(pts), Window::closed(lo, hi), zero_free, dedup);
    out.flagged_double = std::move(flagged_out);
    return out;
}

} // namespace qckit
