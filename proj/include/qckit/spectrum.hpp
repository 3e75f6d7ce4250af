#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qckit/generators.hpp"
#include "qckit/multiset.hpp"
#include "qckit/summation.hpp"
#include "qckit/window.hpp"

namespace qckit {

struct SpectralAtom {
    double gamma = 0.0;           // frequency in cycles
    std::complex<double> b = 0.0; // complex mass
};

enum class Provenance { analytic, empirical };

/// The pure-point transform of a point measure: atoms b_gamma at
/// frequencies gamma, known completely over a declared band.  As with
/// point multisets, the band is part of the data; queries outside it are
/// errors rather than zeros.
class Spectrum {
public:
    Spectrum() = default;

    Spectrum(std::vector<SpectralAtom> atoms, double band_lo, double band_hi,
             Provenance prov)
        : atoms_(std::move(atoms)), blo_(band_lo), bhi_(band_hi), prov_(prov) {
        if (!std::isfinite(blo_) || !std::isfinite(bhi_) || blo_ > bhi_)
            throw std::invalid_argument("Spectrum: bad band");
        std::sort(atoms_.begin(), atoms_.end(),
                  [](const SpectralAtom& a, const SpectralAtom& b) { return a.gamma < b.gamma; });
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            const auto& a = atoms_[i];
            if (!std::isfinite(a.gamma) || !std::isfinite(a.b.real()) ||
                !std::isfinite(a.b.imag()))
                throw std::invalid_argument("Spectrum: non-finite atom");
            if (a.gamma < blo_ || a.gamma > bhi_)
                throw std::invalid_argument("Spectrum: atom at " + std::to_string(a.gamma) +
                                            " outside the band");
            if (i > 0 && !(atoms_[i - 1].gamma < a.gamma))
                throw std::invalid_argument("Spectrum: duplicate frequency " +
                                            std::to_string(a.gamma) +
                                            " (merge atoms before constructing)");
        }
    }

    const std::vector<SpectralAtom>& atoms() const { return atoms_; }
    double band_lo() const { return blo_; }
    double band_hi() const { return bhi_; }
    Provenance provenance() const { return prov_; }
    bool band_contains(double g) const { return g >= blo_ && g <= bhi_; }

    /// Mass at the atom nearest to gamma within tol; zero if no atom is
    /// that close.  gamma must lie inside the band.
    std::complex<double> mass_at(double gamma, double tol = 1e-9) const {
        if (!band_contains(gamma))
            throw std::invalid_argument("Spectrum::mass_at: frequency outside band");
        auto it = std::lower_bound(atoms_.begin(), atoms_.end(), gamma,
                                   [](const SpectralAtom& a, double g) { return a.gamma < g; });
        std::complex<double> best = 0.0;
        double bestd = tol;
        if (it != atoms_.end() && std::abs(it->gamma - gamma) <= bestd) {
            bestd = std::abs(it->gamma - gamma);
            best = it->b;
        }
        if (it != atoms_.begin()) {
            --it;
            if (std::abs(it->gamma - gamma) <= bestd) best = it->b;
        }
        return best;
    }

    /// The mass of the zero atom (the mean motion); 0 if absent.
    double zero_mass() const {
        if (!band_contains(0.0)) return 0.0;
        return mass_at(0.0, 1e-12).real();
    }

    /// M(t) = sum of |b_gamma| over 0 < gamma <= t.
    double mass_upto(double t) const {
        double s = 0.0;
        for (const auto& a : atoms_) {
            if (a.gamma <= 0.0) continue;
            if (a.gamma > t) break;
            s += std::abs(a.b);
        }
        return s;
    }

    /// Largest total |b| mass inside any half-open unit frequency window.
    double max_unit_band_mass() const {
        double best = 0.0;
        std::size_t j = 0;
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            if (j < i) j = i;
            while (j < atoms_.size() && atoms_[j].gamma < atoms_[i].gamma + 1.0) ++j;
            double s = 0.0;
            for (std::size_t k = i; k < j; ++k) s += std::abs(atoms_[k].b);
            best = std::max(best, s);
        }
        return best;
    }

    /// Checks the invariants a transform of a real nonempty measure must
    /// satisfy: Hermitian symmetry b(-g) = conj(b(g)) for atoms whose
    /// mirror lies inside the band, and a real positive atom at 0 when the
    /// band covers it.  tol absorbs estimation noise in empirical spectra.
    void validate_measure(double tol = 1e-9) const {
        for (const auto& a : atoms_) {
            if (!band_contains(-a.gamma)) continue;
            auto mirror = mass_at(-a.gamma, std::max(tol, 1e-12));
            if (std::abs(mirror - std::conj(a.b)) > tol * (1.0 + std::abs(a.b)))
                throw std::invalid_argument(
                    "Spectrum: Hermitian symmetry violated at gamma = " +
                    std::to_string(a.gamma));
        }
        if (band_contains(0.0)) {
            auto b0 = mass_at(0.0, 1e-12);
            if (!(b0.real() > 0.0) || std::abs(b0.imag()) > tol * (1.0 + std::abs(b0)))
                throw std::invalid_argument(
                    "Spectrum: zero atom must carry positive real mass (the density)");
        }
    }

private:
    std::vector<SpectralAtom> atoms_;
    double blo_ = 0.0, bhi_ = 0.0;
    Provenance prov_ = Provenance::analytic;
};

/// Exact transform of the lattice measure on alpha*Z + shift, restricted
/// to a band: atoms at k/alpha with mass alpha^{-1} e^{-2 pi i k shift/alpha}.
inline Spectrum lattice_spectrum(const LatticeSpec& spec, const Window& band) {
    if (!(spec.alpha > 0.0) || !std::isfinite(spec.alpha))
        throw std::invalid_argument("lattice_spectrum: alpha must be positive");
    std::vector<SpectralAtom> atoms;
    long k_lo = static_cast<long>(std::ceil(band.lo * spec.alpha - 1e-9));
    long k_hi = static_cast<long>(std::floor(band.hi * spec.alpha + 1e-9));
    for (long k = k_lo; k <= k_hi; ++k) {
        double gamma = static_cast<double>(k) / spec.alpha;
        if (gamma < band.lo || gamma > band.hi) continue;
        // Reduce the phase modulo one turn before calling polar; for the
        // rational shifts the fixtures use this keeps large-k phases exact.
        double turns = std::fmod(static_cast<double>(k) * spec.shift / spec.alpha, 1.0);
        std::complex<double> b =
            std::polar(1.0 / spec.alpha, -2.0 * std::numbers::pi * turns);
        atoms.push_back({gamma, b});
    }
    return Spectrum(std::move(atoms), band.lo, band.hi, Provenance::analytic);
}

/// Linear merge of spectra over a common band.  Atoms closer than
/// gamma_tol coalesce (masses add, frequency is the mass-weighted mean);
/// merged atoms whose mass cancels below drop_tol vanish entirely.
inline Spectrum union_spectrum(const std::vector<Spectrum>& parts,
                               double gamma_tol = 1e-9, double drop_tol = 1e-12) {
    if (parts.empty())
        throw std::invalid_argument("union_spectrum: need at least one part");
    double blo = parts.front().band_lo(), bhi = parts.front().band_hi();
    Provenance prov = Provenance::analytic;
    std::vector<SpectralAtom> all;
    for (const auto& p : parts) {
        if (p.band_lo() != blo || p.band_hi() != bhi)
            throw std::invalid_argument("union_spectrum: band mismatch");
        if (p.provenance() == Provenance::empirical) prov = Provenance::empirical;
        all.insert(all.end(), p.atoms().begin(), p.atoms().end());
    }
    std::sort(all.begin(), all.end(),
              [](const SpectralAtom& a, const SpectralAtom& b) { return a.gamma < b.gamma; });

    std::vector<SpectralAtom> merged;
    std::size_t i = 0;
    while (i < all.size()) {
        std::size_t j = i + 1;
        while (j < all.size() && all[j].gamma - all[j - 1].gamma <= gamma_tol) ++j;
        std::complex<double> mass = 0.0;
        double wg = 0.0, wsum = 0.0;
        for (std::size_t k = i; k < j; ++k) {
            mass += all[k].b;
            double w = std::abs(all[k].b);
            wg += w * all[k].gamma;
            wsum += w;
        }
        double gamma = wsum > 0.0 ? wg / wsum : all[i].gamma;
        if (std::abs(mass) > drop_tol) merged.push_back({gamma, mass});
        i = j;
    }
    return Spectrum(std::move(merged), blo, bhi, prov);
}

struct BohrRow {
    double T = 0.0;
    std::complex<double> value = 0.0;
};

struct BohrReport {
    double gamma = 0.0;
    std::complex<double> value = 0.0;     // estimate at the largest T
    double max_successive_diff = 0.0;     // stability along the schedule
    std::vector<BohrRow> rows;
};

/// Bohr-mean estimate of the atom mass at frequency gamma:
/// (1/2T) sum_{|a_n| <= T} e^{-2 pi i gamma a_n}, reported along a growing
/// T schedule so convergence is visible.
inline BohrReport bohr_coefficient(const PointMultiset& A, double gamma,
                                   const std::vector<double>& T_schedule) {
    if (T_schedule.empty())
        throw std::invalid_argument("bohr_coefficient: empty schedule");
    for (std::size_t i = 0; i < T_schedule.size(); ++i) {
        if (!(T_schedule[i] > 0.0) || !std::isfinite(T_schedule[i]))
            throw std::invalid_argument("bohr_coefficient: T values must be positive");
        if (i > 0 && !(T_schedule[i] > T_schedule[i - 1]))
            throw std::invalid_argument("bohr_coefficient: schedule must increase");
    }
    if (T_schedule.back() > std::min(-A.window_lo(), A.window_hi()))
        throw std::invalid_argument("bohr_coefficient: schedule exceeds the completeness window");
    if (!std::isfinite(gamma))
        throw std::invalid_argument("bohr_coefficient: gamma must be finite");

    const auto& e = A.expanded();
    auto first_nonneg = std::lower_bound(e.begin(), e.end(), 0.0);
    long pos = static_cast<long>(first_nonneg - e.begin());
    long neg = pos - 1;

    complex_sum s;
    BohrReport rep;
    rep.gamma = gamma;
    const double w = -2.0 * std::numbers::pi * gamma;
    for (double T : T_schedule) {
        for (;;) {
            double rv = pos < static_cast<long>(e.size())
                            ? e[static_cast<std::size_t>(pos)]
                            : std::numeric_limits<double>::infinity();
            double lv = neg >= 0 ? -e[static_cast<std::size_t>(neg)]
                                 : std::numeric_limits<double>::infinity();
            double next = std::min(rv, lv);
            if (next > T) break;
            double x = rv <= lv ? e[static_cast<std::size_t>(pos)]
                                : e[static_cast<std::size_t>(neg)];
            s.add(std::polar(1.0, w * x));
            if (rv <= lv) ++pos; else --neg;
        }
        rep.rows.push_back({T, s.value() / (2.0 * T)});
    }
    rep.value = rep.rows.back().value;
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
        rep.max_successive_diff = std::max(
            rep.max_successive_diff, std::abs(rep.rows[i].value - rep.rows[i - 1].value));
    return rep;
}

struct MassGrowthRow {
    double r = 0.0;
    double mass = 0.0;  // sum of |b| over |gamma| <= r
};

struct MassGrowthReport {
    std::vector<MassGrowthRow> rows;
    double kappa_hat = 0.0;  // log-log slope; diagnostic only
};

/// Total-variation growth of the spectrum: the table r -> sum_{|gamma|<=r}
/// |b| plus a fitted power-law exponent.  For measures this grows
/// polynomially; the exponent is what the tail bounds downstream assume.
inline MassGrowthReport mass_growth(const Spectrum& S, const std::vector<double>& r_values) {
    if (S.atoms().empty())
        throw std::invalid_argument("mass_growth: empty spectrum");
    if (r_values.empty())
        throw std::invalid_argument("mass_growth: no radii");
    for (std::size_t i = 0; i < r_values.size(); ++i) {
        double r = r_values[i];
        if (!(r > 0.0) || !std::isfinite(r))
            throw std::invalid_argument("mass_growth: radii must be positive");
        if (i > 0 && !(r > r_values[i - 1]))
            throw std::invalid_argument("mass_growth: radii must increase");
        if (-r < S.band_lo() || r > S.band_hi())
            throw std::invalid_argument("mass_growth: radius " + std::to_string(r) +
                                        " outside the band");
    }
    MassGrowthReport rep;
    for (double r : r_values) {
        double m = 0.0;
        for (const auto& a : S.atoms())
            if (std::abs(a.gamma) <= r) m += std::abs(a.b);
        rep.rows.push_back({r, m});
    }
    std::vector<double> lx, ly;
    for (const auto& row : rep.rows)
        if (row.mass > 0.0) {
            lx.push_back(std::log(row.r));
            ly.push_back(std::log(row.mass));
        }
    bool flat = true;
    for (std::size_t i = 1; i < ly.size(); ++i)
        if (ly[i] != ly[0]) flat = false;
    if (lx.size() >= 2 && !flat)
        rep.kappa_hat = least_squares_slope(lx, ly);
    return rep;
}

/// Empirical spectrum via Bohr means: estimate candidate frequencies,
/// threshold against off-grid probes (3x the median probe magnitude), keep
/// the survivors, and mirror them to enforce Hermitian symmetry.  The zero
/// atom is always estimated and kept, since it carries the density.
inline Spectrum detect_spectrum(const PointMultiset& A,
                                const std::vector<double>& candidates,
                                const std::vector<double>& probes,
                                const std::vector<double>& T_schedule) {
    if (probes.empty())
        throw std::invalid_argument("detect_spectrum: need probe frequencies for the noise floor");
    for (double c : candidates)
        if (!(c > 0.0))
            throw std::invalid_argument("detect_spectrum: candidates must be positive "
                                        "(negatives come from Hermitian symmetry)");

    std::vector<double> noise;
    noise.reserve(probes.size());
    for (double p : probes)
        noise.push_back(std::abs(bohr_coefficient(A, p, T_schedule).value));
    std::sort(noise.begin(), noise.end());
    double median = noise[noise.size() / 2];
    double threshold = 3.0 * median;

    std::vector<SpectralAtom> atoms;
    double b0 = bohr_coefficient(A, 0.0, T_schedule).value.real();
    atoms.push_back({0.0, b0});
    double gmax = 0.0;
    for (double c : candidates) {
        gmax = std::max(gmax, c);
        auto est = bohr_coefficient(A, c, T_schedule).value;
        if (std::abs(est) > threshold) {
            atoms.push_back({c, est});
            atoms.push_back({-c, std::conj(est)});
        }
    }
    return Spectrum(std::move(atoms), -gmax, gmax, Provenance::empirical);
}

} // namespace qckit
