#include <doctest.h>

#include <cmath>
#include <map>

#include "covlab/polarization.hpp"
#include "covlab/renewal.hpp"

using namespace covlab;

namespace {

IfsModel make_cantor() {
    return IfsModel::build({Similitude::make_1d(Rational(1, 3), Rational(0, 1)),
                            Similitude::make_1d(Rational(1, 3), Rational(2, 3))},
                           {0.0}, {1.0}, NormSpec::euclid(1));
}

IfsModel make_half_quarter() {
    return IfsModel::build({Similitude::make_1d(Rational(1, 2), Rational(0, 1)),
                            Similitude::make_1d(Rational(1, 4), Rational(3, 4))},
                           {0.0}, {1.0}, NormSpec::euclid(1));
}

IfsModel make_nonlattice() {
    return IfsModel::build({Similitude::make_1d(Rational(1, 2), Rational(0, 1)),
                            Similitude::make_1d(Rational(1, 3), Rational(2, 3))},
                           {0.0}, {1.0}, NormSpec::euclid(1));
}

}  // namespace

TEST_SUITE("renewal") {

TEST_CASE("lattice classification by prime factorization") {
    auto cantor = classify_lattice({Rational(1, 3), Rational(1, 3)});
    CHECK(cantor.verdict == LatticeVerdict::lattice);
    CHECK(cantor.base == Rational(1, 3));
    CHECK(cantor.exponents == std::vector<int>{1, 1});

    auto hq = classify_lattice({Rational(1, 2), Rational(1, 4)});
    CHECK(hq.verdict == LatticeVerdict::lattice);
    CHECK(hq.base == Rational(1, 2));
    CHECK(hq.exponents == std::vector<int>{2, 1});  // sorted descending

    auto non = classify_lattice({Rational(1, 2), Rational(1, 3)});
    CHECK(non.verdict == LatticeVerdict::nonlattice);
    CHECK(non.evidence.find("irrational") != std::string::npos);

    // non-prime-power bases work through the exponent vectors
    auto composite = classify_lattice({Rational(2, 3), Rational(4, 9)});
    CHECK(composite.verdict == LatticeVerdict::lattice);
    CHECK(composite.base == Rational(2, 3));

    auto mixed = classify_lattice({Rational(1, 2), Rational(1, 4), Rational(1, 3)});
    CHECK(mixed.verdict == LatticeVerdict::nonlattice);

    CHECK_THROWS_AS(classify_lattice({Rational(3, 2)}), std::invalid_argument);
}

TEST_CASE("renewal covering sequence reproduces the DP inverse") {
    NormSpec n1 = NormSpec::euclid(1);
    SUBCASE("cantor: R_n = 2^n") {
        IfsModel cantor = make_cantor();
        auto table = FractalCoveringTable::compute(cantor, n1, 1100, false);
        auto cls = classify_lattice(cantor.exact_ratios());
        auto seq = renewal_covering_sequence(cantor, cls, table, 10);
        REQUIRE(seq.values.size() == 11);
        for (int n = 0; n <= 10; ++n) {
            CHECK(seq.values[n] == (1LL << n));
            auto inv = table.inverse_of_radius(std::pow(1.0 / 3, n));
            REQUIRE(inv.has_value());
            CHECK(*inv == seq.values[n]);
        }
    }
    SUBCASE("half-quarter: Fibonacci recursion") {
        IfsModel hq = make_half_quarter();
        auto table = FractalCoveringTable::compute(hq, n1, 200, false);
        auto cls = classify_lattice(hq.exact_ratios());
        auto seq = renewal_covering_sequence(hq, cls, table, 10);
        for (std::size_t n = 2; n < seq.values.size(); ++n)
            CHECK(seq.values[n] == seq.values[n - 1] + seq.values[n - 2]);
        for (int n = 0; n <= 10; ++n) {
            auto inv = table.inverse_of_radius(std::pow(0.5, n));
            REQUIRE(inv.has_value());
            CHECK(*inv == seq.values[n]);
        }
    }
    SUBCASE("missing base values are refused") {
        IfsModel cantor = make_cantor();
        auto tiny = FractalCoveringTable::compute(cantor, n1, 2, false);
        auto cls = classify_lattice(cantor.exact_ratios());
        CHECK_THROWS_AS(renewal_covering_sequence(cantor, cls, tiny, 10), std::invalid_argument);
    }
    SUBCASE("nonlattice input is refused") {
        IfsModel non = make_nonlattice();
        auto table = FractalCoveringTable::compute(non, n1, 8, false);
        auto cls = classify_lattice(non.exact_ratios());
        CHECK_THROWS_AS(renewal_covering_sequence(non, cls, table, 4), std::invalid_argument);
    }
}

TEST_CASE("oscillation report: cantor band and gap constant") {
    NormSpec n1 = NormSpec::euclid(1);
    IfsModel cantor = make_cantor();
    auto table = FractalCoveringTable::compute(cantor, n1, 4096, false);
    auto rep = oscillation_report(cantor, table, 4096);
    CHECK(rep.liminf_est == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(rep.limsup_est == doctest::Approx(1.4994).epsilon(1e-3));
    CHECK(rep.band_ratio >= 2.9);
    REQUIRE(rep.c_gap.has_value());
    CHECK(*rep.c_gap == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(*rep.c_gap > 1.0);
}

TEST_CASE("oscillation report: nonlattice octaves shrink") {
    NormSpec n1 = NormSpec::euclid(1);
    IfsModel non = make_nonlattice();
    auto table = FractalCoveringTable::compute(non, n1, 4096, false);
    auto rep = oscillation_report(non, table, 4096);
    CHECK_FALSE(rep.c_gap.has_value());
    // transition octaves cleared of base cases: ratios decrease
    double prev = 1e9;
    int checked = 0;
    for (auto [oct, ratio] : rep.octave_ratios) {
        if ((1 << oct) < 32) continue;
        CHECK(ratio <= prev + 1e-9);
        prev = ratio;
        ++checked;
    }
    CHECK(checked >= 6);
    CHECK(rep.octave_ratios.back().second < 1.31);
}

TEST_CASE("lattice half-quarter gap constant") {
    NormSpec n1 = NormSpec::euclid(1);
    IfsModel hq = make_half_quarter();
    auto table = FractalCoveringTable::compute(hq, n1, 2048, false);
    auto rep = oscillation_report(hq, table, 2048);
    REQUIRE(rep.c_gap.has_value());
    CHECK(*rep.c_gap > 1.0);
}

TEST_CASE("polarization renewal residual on the depth-3 toy table") {
    NormSpec n1 = NormSpec::euclid(1);
    IfsModel cantor = make_cantor();
    SampledSet toy = ifs_points(cantor, 3, n1);
    REQUIRE(toy.size() == 16);
    Configuration cand(1);
    cand.xs = toy.xs;
    std::map<int, double> table;
    for (int N = 1; N <= 6; ++N) table[N] = brute_force_polarization(cand, toy, N, 2.0, n1).value;
    CHECK(table[1] == doctest::Approx(2.25));
    CHECK(table[2] == doctest::Approx(23.49));

    std::vector<double> schedule;
    for (double t = 0.51 * table[1]; t <= table[6]; t *= 1.05) schedule.push_back(t);
    auto rep = polarization_renewal_residual(cantor, 2.0, schedule, table);
    REQUIRE(!rep.t.empty());
    CHECK(rep.max_L <= 0.0);  // the renewal upper bound holds on the toy table
    CHECK(rep.min_L >= -6.0);

    // t below the smallest table value: N(t) = 1 everywhere, L = 1 - M
    std::map<int, double> one{{1, 10.0}};
    auto low = polarization_renewal_residual(cantor, 2.0, {1.0}, one);
    REQUIRE(low.t.size() == 1);
    CHECK(low.L[0] == doctest::Approx(1.0 - 2.0));

    std::map<int, double> bad{{1, 5.0}, {2, 3.0}};
    CHECK_THROWS_AS(polarization_renewal_residual(cantor, 2.0, {1.0}, bad), std::invalid_argument);
    CHECK_THROWS_AS(polarization_renewal_residual(cantor, 0.5, {1.0}, one), std::domain_error);
}

TEST_CASE("renewal growth matches the dimension") {
    NormSpec n1 = NormSpec::euclid(1);
    IfsModel hq = make_half_quarter();
    auto table = FractalCoveringTable::compute(hq, n1, 700, false);
    auto cls = classify_lattice(hq.exact_ratios());
    auto seq = renewal_covering_sequence(hq, cls, table, 11);
    double r = cls.base.value();
    double est = std::log(static_cast<double>(seq.values[10]) / seq.values[9]) / std::log(1.0 / r);
    CHECK(est == doctest::Approx(hq.dim_d).epsilon(0.02));
}

}  // TEST_SUITE
