#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qckit/errors.hpp"
#include "qckit/window.hpp"

namespace qckit {

struct WeightedPoint {
    double x = 0.0;
    std::int64_t mult = 1;
};

/// A locally finite point multiset on ℝ, the basic object everything else
/// consumes.  Data is only ever known over a finite "completeness window":
/// inside it the stored points are exactly the set, outside it we know
/// nothing.  Every query that would touch the unknown region throws rather
/// than silently extrapolating.
///
/// Two views are kept: the distinct points with multiplicities, and the
/// expanded nondecreasing sequence a_n (each point repeated by its
/// multiplicity) indexed so that a_0 is the smallest element >= 0.  The
/// indexed view is what the matching and decomposition code works with.
class PointMultiset {
public:
    PointMultiset() = default;

    const std::vector<double>& points() const { return points_; }
    const std::vector<std::int64_t>& mults() const { return mults_; }
    const std::vector<double>& expanded() const { return expanded_; }

    double window_lo() const { return wlo_; }
    double window_hi() const { return whi_; }
    double window_length() const { return whi_ - wlo_; }
    bool nonzero_flag() const { return nonzero_; }

    std::size_t distinct_count() const { return points_.size(); }
    std::int64_t total_mass() const { return static_cast<std::int64_t>(expanded_.size()); }
    bool empty() const { return expanded_.empty(); }

    /// True when the coordinate 0 is a point of the multiset (exact
    /// floating-point membership, consistent with how lattice generators
    /// produce their points).
    bool contains_zero() const {
        return std::binary_search(points_.begin(), points_.end(), 0.0);
    }

    bool has_origin() const { return origin_ < expanded_.size(); }

    long n_min() const { return -static_cast<long>(origin_); }
    long n_max() const { return static_cast<long>(expanded_.size()) - 1 - static_cast<long>(origin_); }

    /// Indexed access a_n.  n = 0 is the smallest element >= 0.
    double a(long n) const {
        long idx = static_cast<long>(origin_) + n;
        if (idx < 0 || idx >= static_cast<long>(expanded_.size()))
            throw std::out_of_range("PointMultiset::a: index " + std::to_string(n) +
                                    " outside materialized range [" + std::to_string(n_min()) +
                                    ", " + std::to_string(n_max()) + "]");
        return expanded_[static_cast<std::size_t>(idx)];
    }

    /// Total multiplicity inside w, honoring the open/closed end flags.
    /// w must sit inside the completeness window.
    std::int64_t count_in_window(const Window& w) const {
        if (w.lo < wlo_ || w.hi > whi_)
            throw std::invalid_argument(
                "count_in_window: query window exceeds the completeness window; "
                "data outside it is unknown");
        auto lo_it = w.closed_lo ? std::lower_bound(points_.begin(), points_.end(), w.lo)
                                 : std::upper_bound(points_.begin(), points_.end(), w.lo);
        auto hi_it = w.closed_hi ? std::upper_bound(points_.begin(), points_.end(), w.hi)
                                 : std::lower_bound(points_.begin(), points_.end(), w.hi);
        if (hi_it <= lo_it) return 0;
        std::size_t i = static_cast<std::size_t>(lo_it - points_.begin());
        std::size_t j = static_cast<std::size_t>(hi_it - points_.begin());
        return cum_[j] - cum_[i];
    }

    /// Largest count any half-open window [x, x+h) can attain inside the
    /// completeness window.  The sup over all real x is reached when the
    /// window starts at a point, so a two-pointer sweep suffices.
    std::int64_t max_window_count(double h) const {
        if (!(h > 0.0) || !std::isfinite(h))
            throw std::invalid_argument("max_window_count: h must be positive and finite");
        std::int64_t best = 0;
        std::size_t j = 0;
        for (std::size_t i = 0; i < expanded_.size(); ++i) {
            if (expanded_[i] + h > whi_) break;  // window would leave certified territory
            if (j < i) j = i;
            while (j < expanded_.size() && expanded_[j] < expanded_[i] + h) ++j;
            best = std::max<std::int64_t>(best, static_cast<std::int64_t>(j - i));
        }
        return best;
    }

    friend PointMultiset build_multiset(std::vector<WeightedPoint> entries,
                                        const Window& completeness,
                                        bool nonzero_required,
                                        double merge_tol);

private:
    std::vector<double> points_;        // strictly increasing
    std::vector<std::int64_t> mults_;   // >= 1, parallel to points_
    std::vector<std::int64_t> cum_;     // prefix masses, size points_+1
    std::vector<double> expanded_;      // points repeated by multiplicity
    std::size_t origin_ = 0;            // expanded index of a_0
    double wlo_ = 0.0, whi_ = 0.0;
    bool nonzero_ = false;
};

/// Sorts, merges coincident coordinates (exact equality always merges;
/// a positive merge_tol additionally clusters near-coincident neighbors,
/// which root-finding generators need), assigns the index origin, and
/// validates everything against the completeness window.
inline PointMultiset build_multiset(std::vector<WeightedPoint> entries,
                                    const Window& completeness,
                                    bool nonzero_required,
                                    double merge_tol = 0.0) {
    if (!(merge_tol >= 0.0) || !std::isfinite(merge_tol))
        throw std::invalid_argument("build_multiset: merge_tol must be finite and >= 0");
    for (const auto& e : entries) {
        if (!std::isfinite(e.x))
            throw std::invalid_argument("build_multiset: non-finite coordinate");
        if (e.mult < 1)
            throw std::invalid_argument("build_multiset: multiplicity must be >= 1");
        if (e.x < completeness.lo || e.x > completeness.hi)
            throw std::invalid_argument("build_multiset: point " + std::to_string(e.x) +
                                        " outside the completeness window");
    }
    std::sort(entries.begin(), entries.end(),
              [](const WeightedPoint& a, const WeightedPoint& b) { return a.x < b.x; });

    PointMultiset out;
    out.wlo_ = completeness.lo;
    out.whi_ = completeness.hi;
    out.nonzero_ = nonzero_required;

    // Cluster pass: successive coordinates within merge_tol collapse into a
    // mass-weighted mean.  With merge_tol = 0 this still merges exact
    // duplicates, which is what multiset union semantics require.
    std::size_t i = 0;
    while (i < entries.size()) {
        std::size_t j = i + 1;
        while (j < entries.size() && entries[j].x - entries[j - 1].x <= merge_tol) ++j;
        double coord;
        std::int64_t mass = 0;
        if (j == i + 1) {
            coord = entries[i].x;
            mass = entries[i].mult;
        } else {
            double wsum = 0.0;
            for (std::size_t k = i; k < j; ++k) {
                wsum += entries[k].x * static_cast<double>(entries[k].mult);
                mass += entries[k].mult;
            }
            coord = wsum / static_cast<double>(mass);
        }
        out.points_.push_back(coord);
        out.mults_.push_back(mass);
        i = j;
    }

    if (nonzero_required &&
        std::binary_search(out.points_.begin(), out.points_.end(), 0.0))
        throw std::invalid_argument("build_multiset: 0 is a point but the nonzero flag is required");

    out.cum_.resize(out.points_.size() + 1, 0);
    for (std::size_t k = 0; k < out.points_.size(); ++k)
        out.cum_[k + 1] = out.cum_[k] + out.mults_[k];

    out.expanded_.reserve(static_cast<std::size_t>(out.cum_.back()));
    for (std::size_t k = 0; k < out.points_.size(); ++k)
        for (std::int64_t m = 0; m < out.mults_[k]; ++m)
            out.expanded_.push_back(out.points_[k]);

    out.origin_ = static_cast<std::size_t>(
        std::lower_bound(out.expanded_.begin(), out.expanded_.end(), 0.0) -
        out.expanded_.begin());
    return out;
}

struct DiscrepancyStats {
    /// max over samples of |#A∩[x,x+h) − (1/M)·#A∩[x,x+Mh)|
    double max_scale_defect = 0.0;
    /// max over sample pairs of |#A∩[x,x+h) − #A∩[x',x'+h)|
    std::int64_t max_pairwise_diff = 0;
};

/// Empirical window-count discrepancies at scale h against scale M·h.
/// The maxima are candidates for the uniform counting constant: on an
/// almost periodic set they stay bounded no matter how h or the sample
/// range grows.
inline DiscrepancyStats discrepancy_stats(const PointMultiset& A, double h,
                                          std::int64_t M,
                                          const std::vector<double>& x_samples) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw std::invalid_argument("discrepancy_stats: h must be positive");
    if (M < 1)
        throw std::invalid_argument("discrepancy_stats: M must be a positive integer");
    if (x_samples.empty())
        throw std::invalid_argument("discrepancy_stats: empty sample list");

    DiscrepancyStats st;
    std::int64_t cmin = std::numeric_limits<std::int64_t>::max();
    std::int64_t cmax = std::numeric_limits<std::int64_t>::min();
    for (double x : x_samples) {
        std::int64_t c1 = A.count_in_window(Window::half_open(x, x + h));
        std::int64_t cM = A.count_in_window(Window::half_open(x, x + static_cast<double>(M) * h));
        double defect = std::abs(static_cast<double>(c1) -
                                 static_cast<double>(cM) / static_cast<double>(M));
        st.max_scale_defect = std::max(st.max_scale_defect, defect);
        cmin = std::min(cmin, c1);
        cmax = std::max(cmax, c1);
    }
    st.max_pairwise_diff = cmax - cmin;
    return st;
}

} // namespace qckit
