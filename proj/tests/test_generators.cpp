#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "qckit/generators.hpp"

using namespace qckit;

namespace {

constexpr double pi = std::numbers::pi;

TrigPolySpec sine_poly(double lo, double hi) {
    // sin(2pi x) = -i/2 e^{2pi i x} + i/2 e^{-2pi i x}
    TrigPolySpec s;
    s.terms = {{{0.0, -0.5}, 1.0}, {{0.0, 0.5}, -1.0}};
    s.window = Window::closed(lo, hi);
    return s;
}

} // namespace

TEST_SUITE("generators") {

TEST_CASE("quarter-shifted unit lattice") {
    auto A = gen_lattice({1.0, 0.25, Window::closed(-3, 3)});
    std::vector<double> want = {-2.75, -1.75, -0.75, 0.25, 1.25, 2.25};
    REQUIRE(A.points() == want);
    CHECK(A.nonzero_flag());
}

TEST_CASE("sqrt(2) lattice through the origin") {
    double r2 = std::sqrt(2.0);
    auto A = gen_lattice({r2, 0.0, Window::closed(0, 5)});
    std::vector<double> want = {0.0, r2, 2 * r2, 3 * r2};
    REQUIRE(A.points() == want);
    CHECK_FALSE(A.nonzero_flag());
}

TEST_CASE("half-shifted lattice") {
    auto A = gen_lattice({1.0, 0.5, Window::closed(-2, 2)});
    std::vector<double> want = {-1.5, -0.5, 0.5, 1.5};
    REQUIRE(A.points() == want);
}

TEST_CASE("lattice parameter validation") {
    CHECK_THROWS_AS(gen_lattice({0.0, 0.0, Window::closed(0, 1)}), std::invalid_argument);
    CHECK_THROWS_AS(gen_lattice({-1.0, 0.0, Window::closed(0, 1)}), std::invalid_argument);
}

TEST_CASE("union of a lattice with itself doubles multiplicities") {
    auto A = gen_union(std::vector<LatticeSpec>{{1.0, 0.0, Window::closed(0, 2)},
                                                {1.0, 0.0, Window::closed(0, 2)}});
    std::vector<double> want = {0.0, 1.0, 2.0};
    REQUIRE(A.points() == want);
    for (auto m : A.mults()) CHECK(m == 2);
}

TEST_CASE("interleaving integer and half-integer lattices") {
    auto A = gen_union(std::vector<LatticeSpec>{{1.0, 0.0, Window::closed(0, 1)},
                                                {1.0, 0.5, Window::closed(0, 1)}});
    std::vector<double> want = {0.0, 0.5, 1.0};
    REQUIRE(A.points() == want);
}

TEST_CASE("quarter-shifted union: masses and the shared point") {
    auto A = gen_union(std::vector<LatticeSpec>{
        {1.0, 0.25, Window::closed(0, 10)},
        {std::sqrt(2.0), 0.25, Window::closed(0, 10)}});
    // 1/4 belongs to both progressions (both at index 0), so the total mass
    // over [0,10) is 17 spread over 16 distinct points.
    CHECK(A.count_in_window(Window::half_open(0, 10)) == 17);
    CHECK(A.distinct_count() == 16);
    CHECK(A.points().front() == 0.25);
    CHECK(A.mults().front() == 2);
}

TEST_CASE("union rejects mismatched windows") {
    auto A = gen_lattice({1.0, 0.0, Window::closed(0, 2)});
    auto B = gen_lattice({1.0, 0.0, Window::closed(0, 3)});
    CHECK_THROWS_AS(gen_union(std::vector<PointMultiset>{A, B}), std::invalid_argument);
}

TEST_CASE("union count equals the sum of part counts") {
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> ua(0.3, 2.5), us(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<LatticeSpec> specs;
        int k = 2 + int(rng() % 3);
        for (int i = 0; i < k; ++i)
            specs.push_back({ua(rng), us(rng), Window::closed(-40, 40)});
        auto U = gen_union(specs);
        Window probe = Window::half_open(-20.0 + us(rng), 15.0);
        std::int64_t total = 0;
        for (const auto& s : specs) total += gen_lattice(s).count_in_window(probe);
        CHECK(U.count_in_window(probe) == total);
    }
}

TEST_CASE("sine zeros on a plain grid") {
    auto res = gen_trig_poly_zeros(sine_poly(0.0, 2.2), 0.01, 0.5);
    std::vector<double> want = {0.0, 0.5, 1.0, 1.5, 2.0};
    REQUIRE(res.zeros.distinct_count() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
        CHECK(res.zeros.points()[i] == doctest::Approx(want[i]).epsilon(1e-9));
        CHECK(res.zeros.mults()[i] == 1);
    }
    CHECK(res.flagged_double.empty());
}

TEST_CASE("cosine zeros") {
    TrigPolySpec s;
    s.terms = {{{0.5, 0.0}, 1.0}, {{0.5, 0.0}, -1.0}};
    s.window = Window::closed(0.0, 1.0);
    auto res = gen_trig_poly_zeros(s, 0.01, 0.5);
    REQUIRE(res.zeros.distinct_count() == 2);
    CHECK(res.zeros.points()[0] == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(res.zeros.points()[1] == doctest::Approx(0.75).epsilon(1e-10));
}

TEST_CASE("two-frequency polynomial agrees with an independent fine scan") {
    double r2 = std::sqrt(2.0);
    TrigPolySpec s;
    s.terms = {{{0.0, -0.5}, 1.0},
               {{0.0, 0.5}, -1.0},
               {{0.0, -0.15}, r2},
               {{0.0, 0.15}, -r2}};
    s.window = Window::closed(0.0, 10.0);
    auto res = gen_trig_poly_zeros(s, 0.01, 0.5);

    // Oracle: independent evaluation via std::sin and a much finer scan.
    auto p = [&](double x) { return std::sin(2 * pi * x) + 0.3 * std::sin(2 * pi * r2 * x); };
    std::vector<double> oracle;
    double prev = p(0.0), px = 0.0;
    if (prev == 0.0) oracle.push_back(0.0);
    for (double x = 0.001; x <= 10.0 + 1e-12; x += 0.001) {
        double v = p(x);
        if (v == 0.0) { oracle.push_back(x); prev = v; px = x; continue; }
        if (prev != 0.0 && (v > 0) != (prev > 0)) {
            double a = px, b = x, fa = prev;
            for (int it = 0; it < 100; ++it) {
                double m = 0.5 * (a + b), fm = p(m);
                if (fm == 0.0) { a = b = m; break; }
                if ((fm > 0) == (fa > 0)) { a = m; fa = fm; }
                else b = m;
            }
            oracle.push_back(0.5 * (a + b));
        }
        prev = v; px = x;
    }
    REQUIRE(res.zeros.distinct_count() == oracle.size());
    for (std::size_t i = 0; i < oracle.size(); ++i)
        CHECK(res.zeros.points()[i] == doctest::Approx(oracle[i]).epsilon(1e-8));
}

TEST_CASE("tangential zero gets multiplicity 2 and a flag") {
    // sin^2(2pi x) = 1/2 - cos(4pi x)/2 touches zero at half-integers.
    TrigPolySpec s;
    s.terms = {{{0.5, 0.0}, 0.0}, {{-0.25, 0.0}, 2.0}, {{-0.25, 0.0}, -2.0}};
    s.window = Window::closed(0.2, 0.8);
    auto res = gen_trig_poly_zeros(s, 0.01, 0.5);
    REQUIRE(res.zeros.distinct_count() == 1);
    CHECK(res.zeros.points()[0] == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(res.zeros.mults()[0] == 2);
    REQUIRE(res.flagged_double.size() == 1);
    CHECK(res.flagged_double[0] == doctest::Approx(0.5).epsilon(1e-7));
}

TEST_CASE("non-real polynomials are rejected") {
    TrigPolySpec s;
    s.terms = {{{1.0, 0.0}, 1.0}};  // lone e^{2pi i x}, no conjugate partner
    s.window = Window::closed(0, 1);
    CHECK_THROWS_AS(gen_trig_poly_zeros(s, 0.01, 0.5), std::invalid_argument);

    TrigPolySpec t = sine_poly(0, 1);
    t.real_valued = false;
    CHECK_THROWS_AS(gen_trig_poly_zeros(t, 0.01, 0.5), std::invalid_argument);
}

TEST_CASE("sign changes in adjacent cells mean the scan is too coarse") {
    TrigPolySpec s = sine_poly(0.0, 1.0);
    s.terms.push_back({{0.951, 0.0}, 0.0});  // sin(2pi x) + 0.951: roots ~0.1 apart
    CHECK_THROWS_AS(gen_trig_poly_zeros(s, 0.11, 0.5), std::runtime_error);
    // A fine enough scan resolves the same pair without complaint.
    auto res = gen_trig_poly_zeros(s, 0.01, 0.5);
    CHECK(res.zeros.distinct_count() == 2);
}

TEST_CASE("a stepped-over crossing pair is recovered from the dip") {
    // Roots ~0.0045 apart near 0.75; the window offset makes both fall
    // strictly inside one scan cell, so only the dip logic can see them.
    TrigPolySpec s = sine_poly(0.603, 0.903);
    s.terms.push_back({{0.9999, 0.0}, 0.0});
    auto res = gen_trig_poly_zeros(s, 0.01, 0.5);
    REQUIRE(res.zeros.distinct_count() == 2);
    double gap = res.zeros.points()[1] - res.zeros.points()[0];
    CHECK(gap == doctest::Approx(0.0045).epsilon(0.05));
    double scale = 1.9999;
    for (double r : res.zeros.points())
        CHECK(std::abs(std::sin(2 * pi * r) + 0.9999) <= 1e-10 * scale);
}

TEST_CASE("an unresolvable near-tangency is an error, not a guess") {
    TrigPolySpec s = sine_poly(0.6, 0.9);
    s.terms.push_back({{1.0 - 3e-8, 0.0}, 0.0});
    CHECK_THROWS_AS(gen_trig_poly_zeros(s, 0.01, 0.5), std::runtime_error);
}

TEST_CASE("every reported root satisfies the residual bound") {
    std::mt19937 rng(1618);
    std::uniform_real_distribution<double> uc(-1.0, 1.0), uw(0.4, 2.0);
    for (int trial = 0; trial < 25; ++trial) {
        TrigPolySpec s;
        double scale = 0.0;
        int k = 1 + int(rng() % 3);
        for (int i = 0; i < k; ++i) {
            std::complex<double> c(uc(rng), uc(rng));
            double w = uw(rng);
            s.terms.push_back({c, w});
            s.terms.push_back({std::conj(c), -w});
            scale += 2.0 * std::abs(c);
        }
        s.window = Window::closed(0.0, 6.0);
        detail::RealTrigPoly p{s.terms};
        TrigPolyZeros res;
        try {
            res = gen_trig_poly_zeros(s, 0.005, 1e-3);
        } catch (const std::runtime_error&) {
            continue;  // random polynomial genuinely too tight for this scan; fine
        }
        for (double r : res.zeros.points())
            CHECK(std::abs(p(r)) <= 1e-10 * scale);
    }
}

TEST_CASE("lattices respect the unit-window counting bound") {
    for (double alpha : {0.3, 0.7, 1.0, std::sqrt(2.0), 2.5}) {
        auto A = gen_lattice({alpha, 0.1, Window::closed(-60, 60)});
        std::int64_t k1 = A.max_window_count(1.0);
        CHECK(k1 <= std::int64_t(std::ceil(1.0 / alpha)) + 1);
    }
}

} // TEST_SUITE
