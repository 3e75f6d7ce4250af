#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qckit/errors.hpp"
#include "qckit/minimize.hpp"
#include "qckit/multiset.hpp"
#include "qckit/parallel.hpp"
#include "qckit/summation.hpp"

namespace qckit {

/// Result of testing one candidate translation against the point sequence.
/// index_shift is the integer h realizing the best order-preserving match
/// a_n + tau ~ a_{n+h}; for genuinely almost periodic sets the optimal
/// bijection is order-preserving, so searching shifts is exhaustive.
struct AlmostPeriodReport {
    double tau = 0.0;
    double epsilon = 0.0;
    bool matched = false;
    long index_shift = 0;
    double max_mismatch = std::numeric_limits<double>::infinity();
};

struct Decomposition {
    double density = 0.0;
    long n_lo = 0;                  // first materialized index
    std::vector<double> phi_values; // phi(n) for n = n_lo .. n_lo + size - 1
    double sup_phi = 0.0;

    long n_hi() const { return n_lo + static_cast<long>(phi_values.size()) - 1; }
    double phi(long n) const {
        long off = n - n_lo;
        if (off < 0 || off >= static_cast<long>(phi_values.size()))
            throw std::out_of_range("Decomposition::phi: index " + std::to_string(n) +
                                    " outside [" + std::to_string(n_lo) + ", " +
                                    std::to_string(n_hi()) + "]");
        return phi_values[static_cast<std::size_t>(off)];
    }
};

struct DensityRow {
    double length = 0.0;
    std::int64_t count = 0;
    double density = 0.0;
    double eta = 0.0;  // |count/length - d|
};

struct DensityReport {
    double d = 0.0;
    std::vector<DensityRow> rows;
};

struct PartialSumRow {
    double cutoff = 0.0;
    double value = 0.0;
};

struct Alpha0Report {
    double value = 0.0;
    /// max |S_i - S_j| over the upper half of the cutoff schedule.
    double cauchy_defect = 0.0;
    std::vector<PartialSumRow> partials;
    std::vector<double> successive_defects;
};

/// Sup mismatch of the order-preserving matching between two sorted
/// sequences of equal length (x_i matched to y_i).  Exposed because the
/// optimality of this matching against all bijections is a property the
/// tests exercise directly.
inline double monotone_sup_mismatch(const std::vector<double>& x,
                                    const std::vector<double>& y) {
    if (x.size() != y.size())
        throw std::invalid_argument("monotone_sup_mismatch: length mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        worst = std::max(worst, std::abs(x[i] - y[i]));
    return worst;
}

namespace detail {

struct MatchSetup {
    long h_center = 0;      // round(d * tau)
    long h_halfwidth = 0;   // candidate band radius
    std::size_t i_lo = 0;   // interior expanded-index range (inclusive)
    std::size_t i_hi = 0;
};

/// Shared preamble of the matching routines: estimates the density and the
/// window-count spread, derives the candidate shift band and the interior
/// index range whose partners are guaranteed to stay inside the window.
inline MatchSetup match_setup(const PointMultiset& A, double tau, double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw std::invalid_argument("is_almost_period: epsilon must be positive");
    if (!std::isfinite(tau))
        throw std::invalid_argument("is_almost_period: tau must be finite");
    if (A.total_mass() < 2)
        throw std::invalid_argument("is_almost_period: need at least two points");

    const auto& e = A.expanded();
    double span = A.window_length();
    double d_hat = static_cast<double>(A.total_mass()) / span;

    // Empirical spread of window counts at scale ~|tau|: how many indices a
    // translation by tau can plausibly shift the sequence by, beyond d*tau.
    double wlen = std::min(std::max(1.0, std::min(std::abs(tau) + 1.0, span / 8.0)), span);
    std::int64_t cmin = std::numeric_limits<std::int64_t>::max(), cmax = 0;
    for (int j = 0; j <= 16; ++j) {
        double x = A.window_lo() + (span - wlen) * static_cast<double>(j) / 16.0;
        x = std::max(x, A.window_lo());
        // rounding may push x + wlen an ulp past the window edge; clamp
        std::int64_t c = A.count_in_window(
            Window::half_open(x, std::min(x + wlen, A.window_hi())));
        cmin = std::min(cmin, c);
        cmax = std::max(cmax, c);
    }
    long k2 = static_cast<long>(cmax - cmin);

    MatchSetup ms;
    ms.h_center = std::lround(d_hat * tau);
    ms.h_halfwidth = static_cast<long>(std::ceil(d_hat * epsilon)) + k2 + 2;

    double margin = std::abs(tau) + epsilon +
                    static_cast<double>(ms.h_halfwidth + 2) / d_hat + 1.0;
    auto lo_it = std::lower_bound(e.begin(), e.end(), A.window_lo() + margin);
    auto hi_it = std::upper_bound(e.begin(), e.end(), A.window_hi() - margin);
    if (lo_it >= hi_it)
        throw std::invalid_argument(
            "is_almost_period: completeness window too small to exclude boundary "
            "effects for |tau| = " + std::to_string(std::abs(tau)));
    ms.i_lo = static_cast<std::size_t>(lo_it - e.begin());
    ms.i_hi = static_cast<std::size_t>(hi_it - e.begin()) - 1;
    return ms;
}

/// Best order-preserving match over the candidate shift band.  Returns
/// (h, sup mismatch); candidates are abandoned early once they exceed the
/// incumbent, which keeps τ-scans cheap.
inline std::pair<long, double> best_shift(const PointMultiset& A, double tau,
                                          const MatchSetup& ms) {
    const auto& e = A.expanded();
    long n = static_cast<long>(e.size());
    double best = std::numeric_limits<double>::infinity();
    long best_h = ms.h_center;
    for (long h = ms.h_center - ms.h_halfwidth; h <= ms.h_center + ms.h_halfwidth; ++h) {
        double worst = 0.0;
        for (std::size_t i = ms.i_lo; i <= ms.i_hi; ++i) {
            long j = static_cast<long>(i) + h;
            if (j < 0 || j >= n) { worst = std::numeric_limits<double>::infinity(); break; }
            worst = std::max(worst, std::abs(e[i] + tau - e[static_cast<std::size_t>(j)]));
            if (worst >= best) break;
        }
        if (worst < best) { best = worst; best_h = h; }
    }
    return {best_h, best};
}

} // namespace detail

/// Tests whether tau is an epsilon-almost period of A: is there an integer
/// shift h with sup_n |a_n + tau - a_{n+h}| < epsilon over the interior of
/// the window?  Indices whose partner could fall outside the completeness
/// window are excluded, so a finite sample never produces a spurious
/// mismatch (it can produce a spurious match only within the declared
/// boundary margin, which the window-size check keeps honest).
inline AlmostPeriodReport is_almost_period(const PointMultiset& A, double tau,
                                           double epsilon) {
    auto ms = detail::match_setup(A, tau, epsilon);
    auto [h, worst] = detail::best_shift(A, tau, ms);
    AlmostPeriodReport rep;
    rep.tau = tau;
    rep.epsilon = epsilon;
    rep.index_shift = h;
    rep.max_mismatch = worst;
    rep.matched = worst < epsilon;
    return rep;
}

/// Scans [tau_range.lo, tau_range.hi] on a uniform grid and refines every
/// run of matching grid points by golden-section minimization of the
/// mismatch.  The grid step bounds the detection resolution: a true almost
/// period tau* is found provided some grid point within step/2 of it still
/// matches, so pick tau_step comfortably below epsilon.
inline std::vector<double> find_almost_periods(const PointMultiset& A, double epsilon,
                                               const Window& tau_range, double tau_step) {
    if (!(tau_step > 0.0) || !std::isfinite(tau_step))
        throw std::invalid_argument("find_almost_periods: tau_step must be positive");
    if (tau_range.length() < 0.0 || !(tau_range.length() >= 0.0))
        throw std::invalid_argument("find_almost_periods: bad range");
    std::size_t steps = static_cast<std::size_t>(std::floor(tau_range.length() / tau_step));
    if (steps == 0 && tau_range.length() == 0.0)
        throw std::invalid_argument("find_almost_periods: empty range");

    std::vector<double> taus(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k)
        taus[k] = tau_range.lo + static_cast<double>(k) * tau_step;

    std::vector<double> mismatch(taus.size());
    parallel_for(taus.size(), [&](std::size_t k) {
        auto ms = detail::match_setup(A, taus[k], epsilon);
        mismatch[k] = detail::best_shift(A, taus[k], ms).second;
    });

    auto mis_at = [&](double t) {
        auto ms = detail::match_setup(A, t, epsilon);
        return detail::best_shift(A, t, ms).second;
    };

    std::vector<double> found;
    std::size_t k = 0;
    while (k < taus.size()) {
        if (!(mismatch[k] < epsilon)) { ++k; continue; }
        std::size_t run_end = k;
        std::size_t best = k;
        while (run_end + 1 < taus.size() && mismatch[run_end + 1] < epsilon) {
            ++run_end;
            if (mismatch[run_end] < mismatch[best]) best = run_end;
        }
        double a = taus[best] - tau_step, b = taus[best] + tau_step;
        double t = detail::golden_min(mis_at, a, b, 70);
        if (mis_at(t) < epsilon) {
            if (found.empty() || std::abs(t - found.back()) > tau_step / 2)
                found.push_back(t);
        }
        k = run_end + 1;
    }
    return found;
}

/// Density estimate from nested centered windows.  The returned d comes
/// from the largest window; the eta column records |count/len - d| for each
/// length so callers can see the convergence instead of trusting a rate.
inline DensityReport estimate_density(const PointMultiset& A,
                                      const std::vector<double>& window_lengths) {
    if (window_lengths.empty())
        throw std::invalid_argument("estimate_density: no window lengths");
    for (std::size_t i = 0; i < window_lengths.size(); ++i) {
        double L = window_lengths[i];
        if (!(L > 0.0) || !std::isfinite(L))
            throw std::invalid_argument("estimate_density: lengths must be positive");
        if (i > 0 && !(L > window_lengths[i - 1]))
            throw std::invalid_argument("estimate_density: lengths must increase");
        if (-L / 2 < A.window_lo() || L / 2 > A.window_hi())
            throw std::invalid_argument("estimate_density: length " + std::to_string(L) +
                                        " exceeds the completeness window");
    }
    DensityReport rep;
    for (double L : window_lengths) {
        DensityRow row;
        row.length = L;
        row.count = A.count_in_window(Window::half_open(-L / 2, L / 2));
        row.density = static_cast<double>(row.count) / L;
        rep.rows.push_back(row);
    }
    rep.d = rep.rows.back().density;
    if (!(rep.d > 0.0))
        throw std::invalid_argument("estimate_density: empty largest window, no density");
    for (auto& row : rep.rows) row.eta = std::abs(row.density - rep.d);
    return rep;
}

/// Splits the sequence as a_n = n/d + phi(n) over the full materialized
/// index range.  phi is exactly a_n - n/d by construction; whether it is
/// bounded and almost periodic is what the diagnostics downstream measure.
inline Decomposition decompose(const PointMultiset& A, double d) {
    if (!(d > 0.0) || !std::isfinite(d))
        throw std::invalid_argument("decompose: density must be positive");
    if (!A.has_origin())
        throw std::invalid_argument("decompose: no element >= 0, index origin undefined");
    Decomposition dec;
    dec.density = d;
    dec.n_lo = A.n_min();
    dec.phi_values.resize(A.expanded().size());
    for (long n = A.n_min(); n <= A.n_max(); ++n) {
        double phi = A.a(n) - static_cast<double>(n) / d;
        dec.phi_values[static_cast<std::size_t>(n - dec.n_lo)] = phi;
        dec.sup_phi = std::max(dec.sup_phi, std::abs(phi));
    }
    return dec;
}

/// Integer shifts h in [h_lo, h_hi] with sup_n |phi(n+h) - phi(n)| < epsilon
/// over the overlapping index range.
inline std::vector<long> phi_almost_periods(const Decomposition& D, double epsilon,
                                            long h_lo, long h_hi) {
    if (!(epsilon > 0.0))
        throw std::invalid_argument("phi_almost_periods: epsilon must be positive");
    if (h_lo > h_hi)
        throw std::invalid_argument("phi_almost_periods: empty shift range");
    std::vector<long> hs;
    for (long h = h_lo; h <= h_hi; ++h) {
        long lo = std::max(D.n_lo, D.n_lo - h);
        long hi = std::min(D.n_hi(), D.n_hi() - h);
        if (lo > hi) continue;  // no overlap at this shift
        double worst = 0.0;
        for (long n = lo; n <= hi && worst < epsilon; ++n)
            worst = std::max(worst, std::abs(D.phi(n + h) - D.phi(n)));
        if (worst < epsilon) hs.push_back(h);
    }
    return hs;
}

/// The diagnostic series sum_{0<|n|<=N} [phi(n+tau) - phi(n)] / n for an
/// integer shift tau.  For an almost periodic phi these partial sums stay
/// bounded in N; the caller inspects stability, nothing is asserted here.
inline double krein_levin_sum(const Decomposition& D, long tau, long N) {
    if (N < 1) throw std::invalid_argument("krein_levin_sum: N must be >= 1");
    long need_lo = std::min(-N, -N + tau);
    long need_hi = std::max(N, N + tau);
    if (need_lo < D.n_lo || need_hi > D.n_hi())
        throw std::invalid_argument("krein_levin_sum: index range [" +
                                    std::to_string(need_lo) + ", " + std::to_string(need_hi) +
                                    "] exceeds the decomposition range");
    neumaier_sum s;
    for (long n = 1; n <= N; ++n) {
        s.add((D.phi(n + tau) - D.phi(n)) / static_cast<double>(n));
        s.add((D.phi(-n + tau) - D.phi(-n)) / static_cast<double>(-n));
    }
    return s.value();
}

/// Symmetric partial sums S_N = sum_{|a_n| < N} 1/a_n along a cutoff
/// schedule.  Terms are accumulated outward in order of |a_n| so the
/// near-cancellation between the two sides happens termwise.
inline Alpha0Report alpha0(const PointMultiset& A, const std::vector<double>& cutoffs) {
    if (cutoffs.empty())
        throw std::invalid_argument("alpha0: empty cutoff schedule");
    for (std::size_t i = 0; i < cutoffs.size(); ++i) {
        if (!(cutoffs[i] > 0.0) || !std::isfinite(cutoffs[i]))
            throw std::invalid_argument("alpha0: cutoffs must be positive");
        if (i > 0 && !(cutoffs[i] > cutoffs[i - 1]))
            throw std::invalid_argument("alpha0: cutoffs must increase");
    }
    if (cutoffs.back() > std::min(-A.window_lo(), A.window_hi()))
        throw std::invalid_argument("alpha0: largest cutoff exceeds the completeness window");
    if (A.contains_zero())
        throw std::invalid_argument("alpha0: 0 is a point of A, the sum is undefined");

    const auto& e = A.expanded();
    // Walk outward from the origin, merging the two sides by |a|.
    auto first_nonneg = std::lower_bound(e.begin(), e.end(), 0.0);
    long pos = static_cast<long>(first_nonneg - e.begin());  // next index on the right
    long neg = pos - 1;                                      // next index on the left

    neumaier_sum s;
    Alpha0Report rep;
    for (double cut : cutoffs) {
        for (;;) {
            double rv = pos < static_cast<long>(e.size())
                            ? e[static_cast<std::size_t>(pos)]
                            : std::numeric_limits<double>::infinity();
            double lv = neg >= 0 ? -e[static_cast<std::size_t>(neg)]
                                 : std::numeric_limits<double>::infinity();
            double next = std::min(rv, lv);
            if (next >= cut) break;
            if (rv <= lv) {
                s.add(1.0 / e[static_cast<std::size_t>(pos)]);
                ++pos;
            } else {
                s.add(1.0 / e[static_cast<std::size_t>(neg)]);
                --neg;
            }
        }
        rep.partials.push_back({cut, s.value()});
    }
    rep.value = rep.partials.back().value;
    for (std::size_t i = 1; i < rep.partials.size(); ++i)
        rep.successive_defects.push_back(
            std::abs(rep.partials[i].value - rep.partials[i - 1].value));
    std::size_t tail_from = rep.partials.size() / 2;
    for (std::size_t i = tail_from; i < rep.partials.size(); ++i)
        for (std::size_t j = i + 1; j < rep.partials.size(); ++j)
            rep.cauchy_defect = std::max(
                rep.cauchy_defect, std::abs(rep.partials[i].value - rep.partials[j].value));
    return rep;
}

} // namespace qckit
