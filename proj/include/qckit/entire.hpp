#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qckit/errors.hpp"
#include "qckit/multiset.hpp"
#include "qckit/parallel.hpp"
#include "qckit/spectrum.hpp"
#include "qckit/summation.hpp"

namespace qckit {

struct ComplexPoint {
    double x = 0.0;
    double y = 0.0;

    ComplexPoint() = default;
    ComplexPoint(double x_, double y_) : x(x_), y(y_) {
        if (!std::isfinite(x) || !std::isfinite(y))
            throw std::invalid_argument("ComplexPoint: coordinates must be finite");
    }
    std::complex<double> z() const { return {x, y}; }
};

struct EvalConfig {
    enum class Tail { none, first_order };

    /// Symmetric index cutoff N for the zero product; defaults to the full
    /// range the completeness window supports.
    std::optional<long> product_truncation;
    Tail tail_correction = Tail::first_order;
    /// Frequency cutoff for spectral sums; when unset it is chosen so the
    /// certified series tail stays below abs_tol/10.
    std::optional<double> series_cutoff;
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    /// Keep the zero-frequency atom's -pi*i*b0 (upper half plane; mirrored
    /// below) in the spectral log-derivative.  The plain positive-frequency
    /// sum misses exactly that constant, as the high-y limit shows, so this
    /// defaults to on; turning it off reproduces the bare sum for
    /// comparison.
    bool include_zero_atom = true;
    /// Density override for the product tail model; estimated from the
    /// completeness window when unset.
    std::optional<double> density;
};

struct LogDerivResult {
    std::complex<double> value;
    /// |S_N - S_{N/2}|: empirical Cauchy defect of the pair sum.
    double cauchy_defect = 0.0;
    /// Magnitude of the applied first-order tail term (0 when disabled).
    double tail_magnitude = 0.0;
};

namespace detail {

inline void validate_eval_config(const EvalConfig& cfg) {
    if (!(cfg.abs_tol > 0.0) || !(cfg.rel_tol > 0.0))
        throw std::invalid_argument("EvalConfig: tolerances must be positive");
    if (cfg.product_truncation && *cfg.product_truncation < 1)
        throw std::invalid_argument("EvalConfig: product truncation must be >= 1");
    if (cfg.series_cutoff && !(*cfg.series_cutoff > 0.0))
        throw std::invalid_argument("EvalConfig: series cutoff must be positive");
    if (cfg.density && !(*cfg.density > 0.0))
        throw std::invalid_argument("EvalConfig: density override must be positive");
}

struct ProductContext {
    long N = 0;        // pairs actually summed
    double d_hat = 0;  // density for the tail model
    double s_bar = 0;  // tail average of a_n + a_{-n}
};

/// Shared setup for the product-side evaluators: checks the standing
/// assumptions (0 not in A, a symmetric index range exists), resolves the
/// truncation, and fits the two tail-model constants.
///
/// The tail model comes from the decomposition a_{+-n} ~ +-n/d + phi(+-n):
/// the log of a factor pair is, to leading order in 1/n,
///   log[(1 - z/a_n)(1 - z/a_{-n})] ~ d^2 (z s_n - z^2) / n^2,
/// with s_n = a_n + a_{-n} = phi(n) + phi(-n).  Summing n > N with the
/// first-order integral sum_{n>N} n^{-2} ~ 1/N and the empirical tail mean
/// of s_n gives the corrections applied below.
inline ProductContext product_context(const PointMultiset& A, const EvalConfig& cfg) {
    validate_eval_config(cfg);
    if (A.contains_zero())
        throw std::invalid_argument("product evaluation: 0 is a point of A");
    if (!A.has_origin() || A.n_min() > -1 || A.n_max() < 1)
        throw std::invalid_argument(
            "product evaluation: need points on both sides of the origin");

    long n_avail = std::min(A.n_max(), -A.n_min());
    ProductContext ctx;
    ctx.N = cfg.product_truncation.value_or(n_avail);
    if (ctx.N > n_avail)
        throw std::invalid_argument(
            "product truncation N = " + std::to_string(ctx.N) +
            " exceeds the available symmetric index range " + std::to_string(n_avail));
    ctx.d_hat = cfg.density
                    ? *cfg.density
                    : static_cast<double>(A.total_mass()) / A.window_length();
    if (cfg.tail_correction == EvalConfig::Tail::first_order) {
        neumaier_sum s;
        long lo = n_avail / 2 + 1;
        for (long n = lo; n <= n_avail; ++n) s.add(A.a(n) + A.a(-n));
        ctx.s_bar = s.value() / static_cast<double>(n_avail - lo + 1);
    }
    return ctx;
}

} // namespace detail

/// The canonical zero product (1 - z/a_0) prod_{n>=1} (1 - z/a_n)(1 - z/a_{-n})
/// truncated at N pairs, evaluated through compensated log accumulation so
/// huge windows neither overflow nor lose the cancellation between the two
/// half-axes.  With the first-order tail correction the truncation error
/// drops from O(1/N) to O(1/N^2).
inline std::complex<double> eval_f(const PointMultiset& A, ComplexPoint zp,
                                   const EvalConfig& cfg = {}) {
    auto ctx = detail::product_context(A, cfg);
    const std::complex<double> z = zp.z();

    complex_sum log_acc;
    std::complex<double> w0 = 1.0 - z / A.a(0);
    if (w0 == std::complex<double>(0.0, 0.0)) return 0.0;
    log_acc.add(std::log(w0));
    for (long n = 1; n <= ctx.N; ++n) {
        std::complex<double> w = (1.0 - z / A.a(n)) * (1.0 - z / A.a(-n));
        if (w == std::complex<double>(0.0, 0.0)) return 0.0;
        log_acc.add(std::log(w));
    }
    if (cfg.tail_correction == EvalConfig::Tail::first_order)
        log_acc.add(ctx.d_hat * ctx.d_hat * (z * ctx.s_bar - z * z) /
                    static_cast<double>(ctx.N));
    return std::exp(log_acc.value());
}

/// The logarithmic derivative f'/f as the pair-summed partial fractions
/// 1/(z-a_0) + sum_n [1/(z-a_n) + 1/(z-a_{-n})], with the same tail model
/// as eval_f (termwise derivative of the log correction).
inline LogDerivResult eval_logderiv_direct(const PointMultiset& A, ComplexPoint zp,
                                           const EvalConfig& cfg = {}) {
    auto ctx = detail::product_context(A, cfg);
    const std::complex<double> z = zp.z();

    if (std::abs(zp.y) < 1e-12) {
        // Close to the real axis the poles at the points themselves bite.
        const auto& e = A.expanded();
        auto it = std::lower_bound(e.begin(), e.end(), zp.x);
        for (long off = -1; off <= 0; ++off) {
            auto jt = it + off;
            if (jt < e.begin() || jt >= e.end()) continue;
            if (std::abs(z - std::complex<double>(*jt, 0.0)) < 1e-12)
                throw std::domain_error(
                    "eval_logderiv_direct: z within 1e-12 of the zero at index " +
                    std::to_string(static_cast<long>(jt - e.begin()) + A.n_min()));
        }
    }

    complex_sum acc;
    acc.add(1.0 / (z - A.a(0)));
    std::complex<double> at_half = 0.0;
    long half = ctx.N / 2;
    for (long n = 1; n <= ctx.N; ++n) {
        acc.add(1.0 / (z - A.a(n)));
        acc.add(1.0 / (z - A.a(-n)));
        if (n == half) at_half = acc.value();
    }

    LogDerivResult res;
    res.cauchy_defect = std::abs(acc.value() - at_half);
    if (cfg.tail_correction == EvalConfig::Tail::first_order) {
        std::complex<double> tail =
            ctx.d_hat * ctx.d_hat * (ctx.s_bar - 2.0 * z) / static_cast<double>(ctx.N);
        acc.add(tail);
        res.tail_magnitude = std::abs(tail);
    }
    res.value = acc.value();
    return res;
}

namespace detail {

/// Picks the frequency cutoff for the spectral log-derivative series so
/// that the certified tail (atoms beyond the cutoff inside the band, plus
/// a power-law extension of the mass beyond the band) stays below tol.
/// side_atoms holds (|gamma|, |b|) for the half plane in play, ascending.
inline double pick_series_cutoff(const std::vector<std::pair<double, double>>& side_atoms,
                                 double band_extent, double abs_y, double tol) {
    double M_edge = 0.0;
    double M_half = 0.0;
    for (const auto& [g, m] : side_atoms) {
        M_edge += m;
        if (g <= band_extent / 2) M_half += m;
    }
    // Fitted growth exponent for the extension M(t) ~ M_edge (t/G)^kappa;
    // clamped hard because this only guards an exponentially small term.
    double kappa = 1.0;
    if (M_half > 0.0 && M_edge > M_half)
        kappa = std::log2(M_edge / M_half);
    kappa = std::clamp(kappa, 0.5, 3.0);

    const double rho = 2.0 * std::numbers::pi * abs_y;
    double beyond = std::numeric_limits<double>::infinity();
    if (rho > kappa / band_extent && band_extent > 0.0)
        beyond = M_edge * std::exp(-rho * band_extent) * rho / (rho - kappa / band_extent);
    if (beyond > tol)
        throw tolerance_error(
            "spectral series: band [" + std::to_string(band_extent) +
            "] too narrow to certify the requested tolerance at |y| = " +
            std::to_string(abs_y));

    // Walk inward from the band edge until the in-band tail would exceed
    // the budget; everything before that point must be summed.
    double tail = beyond;
    double cutoff = band_extent;
    for (std::size_t i = side_atoms.size(); i-- > 0;) {
        double next = tail + side_atoms[i].second * std::exp(-rho * side_atoms[i].first);
        if (next > tol) return cutoff;
        tail = next;
        cutoff = i > 0 ? side_atoms[i - 1].first : 0.0;
    }
    return cutoff;
}

} // namespace detail

/// The spectral side of the log-derivative identity: an exponential series
/// over the positive (y > 0) or negative (y < 0) frequencies, truncated
/// with a certified tail bound, plus the zero-atom constant -pi*i*b_0
/// (mirrored in the lower half plane) when include_zero_atom is set.
inline std::complex<double> eval_logderiv_spectral(const Spectrum& S, ComplexPoint zp,
                                                   const EvalConfig& cfg = {}) {
    detail::validate_eval_config(cfg);
    if (zp.y == 0.0)
        throw std::domain_error("eval_logderiv_spectral: undefined on the real axis");
    if (cfg.include_zero_atom && !S.band_contains(0.0))
        throw std::invalid_argument(
            "eval_logderiv_spectral: band does not cover 0, the zero atom is unknown");

    const bool upper = zp.y > 0.0;
    const double abs_y = std::abs(zp.y);
    const double extent = upper ? S.band_hi() : -S.band_lo();

    std::vector<std::pair<double, double>> side;
    for (const auto& a : S.atoms()) {
        double g = upper ? a.gamma : -a.gamma;
        if (g > 0.0) side.push_back({g, std::abs(a.b)});
    }
    std::sort(side.begin(), side.end());

    double cutoff;
    if (cfg.series_cutoff) {
        cutoff = *cfg.series_cutoff;
        if (cutoff > extent)
            throw std::invalid_argument(
                "eval_logderiv_spectral: series cutoff " + std::to_string(cutoff) +
                " beyond the band extent " + std::to_string(extent));
    } else {
        cutoff = detail::pick_series_cutoff(side, extent, abs_y, cfg.abs_tol / 10.0);
    }

    const std::complex<double> z = zp.z();
    const double two_pi = 2.0 * std::numbers::pi;
    complex_sum acc;
    for (const auto& a : S.atoms()) {
        double g = upper ? a.gamma : -a.gamma;
        if (g <= 0.0 || g > cutoff) continue;
        // e^{2 pi i gamma z} with gamma on the decaying side of the plane
        acc.add(a.b * std::polar(std::exp(-two_pi * std::abs(a.gamma) * abs_y),
                                 two_pi * a.gamma * zp.x));
    }
    std::complex<double> rot = upper ? std::complex<double>(0.0, -two_pi)
                                     : std::complex<double>(0.0, two_pi);
    std::complex<double> out = rot * acc.value();
    if (cfg.include_zero_atom) {
        double b0 = S.zero_mass();
        out += std::complex<double>(0.0, upper ? -std::numbers::pi : std::numbers::pi) * b0;
    }
    return out;
}

/// The finite correction sum g(z) = sum_{0<gamma<1} b_gamma (e^{2 pi i gamma z}-1)/gamma.
/// The band must cover (0,1) entirely; otherwise atoms could be missing and
/// the sum would be silently wrong.
inline std::complex<double> eval_g(const Spectrum& S, ComplexPoint zp) {
    if (S.band_lo() > 0.0 || S.band_hi() < 1.0)
        throw std::invalid_argument(
            "eval_g: spectrum band must cover (0,1); atoms there may be missing");
    const std::complex<double> z = zp.z();
    const double two_pi = 2.0 * std::numbers::pi;
    complex_sum acc;
    for (const auto& a : S.atoms()) {
        if (a.gamma <= 0.0 || a.gamma >= 1.0) continue;
        std::complex<double> e = std::exp(std::complex<double>(0.0, two_pi * a.gamma) * z);
        acc.add(a.b * (e - 1.0) / a.gamma);
    }
    return acc.value();
}

/// F = e^g f: the product regularized to exponential type by the low-
/// frequency correction.  Zero exactly where f is zero.
inline std::complex<double> eval_F(const PointMultiset& A, const Spectrum& S,
                                   ComplexPoint zp, const EvalConfig& cfg = {}) {
    std::complex<double> f = eval_f(A, zp, cfg);
    if (f == std::complex<double>(0.0, 0.0)) return 0.0;
    return std::exp(eval_g(S, zp)) * f;
}

struct TypeCriterionReport {
    /// sum over 0<gamma<1 of |b_gamma| / gamma at this truncation
    double cor2_sum = 0.0;
    /// max |g| over the supplied real grid
    double sup_g_on_R = 0.0;
    bool certified = false;
    std::string verdict;
    /// |b|/gamma mass per dyadic band [2^{-j-1}, 2^{-j}), coarse to fine;
    /// the divergence heuristic looks at how this ladder behaves.
    std::vector<double> band_sums;
};

/// Sufficient-condition check for the zero set to come from an entire
/// function of exponential type: the low-frequency sum must converge.  A
/// finite atom list always gives a finite sum, so divergence can only be
/// flagged as a trend: when the dyadic ladder of contributions keeps
/// producing bands as strong as the strongest one all the way down to the
/// finest populated scale, the truncated sum is growing without sign of
/// settling and certification is refused.
inline TypeCriterionReport check_type_criterion(const Spectrum& S,
                                                const std::vector<double>& x_grid) {
    if (x_grid.empty())
        throw std::invalid_argument("check_type_criterion: empty evaluation grid");
    if (S.band_lo() > 0.0 || S.band_hi() < 1.0)
        throw std::invalid_argument("check_type_criterion: band must cover (0,1)");

    TypeCriterionReport rep;
    neumaier_sum cor2;
    double gamma_min = 1.0;
    for (const auto& a : S.atoms())
        if (a.gamma > 0.0 && a.gamma < 1.0) {
            cor2.add(std::abs(a.b) / a.gamma);
            gamma_min = std::min(gamma_min, a.gamma);
        }
    rep.cor2_sum = cor2.value();

    int deepest = std::min(60, static_cast<int>(std::ceil(-std::log2(gamma_min))) + 1);
    rep.band_sums.assign(static_cast<std::size_t>(deepest), 0.0);
    for (const auto& a : S.atoms()) {
        if (a.gamma <= 0.0 || a.gamma >= 1.0) continue;
        int j = std::min(deepest - 1, static_cast<int>(std::floor(-std::log2(a.gamma))));
        rep.band_sums[static_cast<std::size_t>(j)] += std::abs(a.b) / a.gamma;
    }

    std::vector<double> populated;
    for (double u : rep.band_sums)
        if (u > 0.0) populated.push_back(u);
    double u_max = populated.empty() ? 0.0 : *std::max_element(populated.begin(), populated.end());
    bool divergent = populated.size() >= 4 && populated.back() >= 0.5 * u_max;

    std::vector<double> mags(x_grid.size());
    parallel_for(x_grid.size(), [&](std::size_t i) {
        mags[i] = std::abs(eval_g(S, ComplexPoint(x_grid[i], 0.0)));
    });
    rep.sup_g_on_R = *std::max_element(mags.begin(), mags.end());

    rep.certified = !divergent;
    rep.verdict = divergent ? "divergent-trend-not-certified" : "exponential-type-certified";
    return rep;
}

struct LineAlmostPeriodRow {
    double tau = 0.0;
    double sup_diff = 0.0;
    bool matched = false;
};

struct LineAlmostPeriodReport {
    double y0 = 0.0;
    double epsilon = 0.0;
    std::vector<LineAlmostPeriodRow> rows;
};

/// Samples |E(x + tau + i y0) - E(x + i y0)| over the grid for each
/// candidate translation.  E is any of the evaluators above with its
/// parameters bound; restrictions such as "not on the real axis" are the
/// evaluator's own business and surface as its errors.
inline LineAlmostPeriodReport check_almost_periodicity_on_line(
    const std::function<std::complex<double>(ComplexPoint)>& E, double y0,
    const std::vector<double>& tau_candidates, double epsilon,
    const std::vector<double>& x_grid) {
    if (!(epsilon > 0.0))
        throw std::invalid_argument("check_almost_periodicity_on_line: epsilon must be positive");
    if (tau_candidates.empty() || x_grid.empty())
        throw std::invalid_argument("check_almost_periodicity_on_line: empty grid or candidates");
    if (!std::isfinite(y0))
        throw std::invalid_argument("check_almost_periodicity_on_line: y0 must be finite");

    std::vector<std::complex<double>> base(x_grid.size());
    parallel_for(x_grid.size(), [&](std::size_t i) {
        base[i] = E(ComplexPoint(x_grid[i], y0));
    });

    LineAlmostPeriodReport rep;
    rep.y0 = y0;
    rep.epsilon = epsilon;
    rep.rows.resize(tau_candidates.size());
    for (std::size_t t = 0; t < tau_candidates.size(); ++t) {
        double tau = tau_candidates[t];
        std::vector<double> diffs(x_grid.size());
        parallel_for(x_grid.size(), [&](std::size_t i) {
            diffs[i] = std::abs(E(ComplexPoint(x_grid[i] + tau, y0)) - base[i]);
        });
        LineAlmostPeriodRow row;
        row.tau = tau;
        row.sup_diff = *std::max_element(diffs.begin(), diffs.end());
        row.matched = row.sup_diff < epsilon;
        rep.rows[t] = row;
    }
    return rep;
}

} // namespace qckit
