#include <doctest.h>

#include <cmath>
#include <map>

#include "covlab/errors.hpp"
#include "covlab/polarization.hpp"
#include "oracle_helpers.hpp"

using namespace covlab;

namespace {

Configuration grid_cand(double lo, double hi, int count) {
    Configuration c(1);
    for (int i = 0; i < count; ++i) c.push(lo + (hi - lo) * i / (count - 1));
    return c;
}

SampledSet grid_set(double lo, double hi, int count) {
    std::vector<double> xs;
    for (int i = 0; i < count; ++i) xs.push_back(lo + (hi - lo) * i / (count - 1));
    return SampledSet::from_sorted_1d(std::move(xs), (hi - lo) / (count - 1), "grid");
}

std::vector<double> grid_vec(double lo, double hi, int count) {
    std::vector<double> xs;
    for (int i = 0; i < count; ++i) xs.push_back(lo + (hi - lo) * i / (count - 1));
    return xs;
}

}  // namespace

TEST_SUITE("polarization") {

TEST_CASE("brute force small cases and tie-breaking") {
    NormSpec n1 = NormSpec::euclid(1);
    Configuration three = grid_cand(0, 1, 3);  // {0, 1/2, 1}
    SampledSet y3 = grid_set(0, 1, 3);
    auto r = brute_force_polarization(three, y3, 1, 2.0, n1);
    CHECK(r.value == doctest::Approx(4.0));
    REQUIRE(r.config.size() == 1);
    CHECK(r.config.xs[0] == doctest::Approx(0.5));
    CHECK(r.exact);

    // all three multisets of {0,1} tie at 8 on Y={1/2}: the lexicographically
    // smallest {0,0} wins
    Configuration ends(1);
    ends.push(0.0);
    ends.push(1.0);
    SampledSet half = SampledSet::from_sorted_1d({0.5}, 0.0);
    auto tie = brute_force_polarization(ends, half, 2, 2.0, n1);
    CHECK(tie.value == doctest::Approx(8.0));
    CHECK(tie.config.xs == std::vector<double>{0.0, 0.0});
}

TEST_CASE("brute force on the 41-point grid matches the enumeration oracle") {
    NormSpec n1 = NormSpec::euclid(1);
    Configuration cand = grid_cand(0, 1, 41);
    SampledSet y = grid_set(0, 1, 41);
    auto got = brute_force_polarization(cand, y, 2, 2.0, n1);
    auto want = oracle::polarization_enum(grid_vec(0, 1, 41), grid_vec(0, 1, 41), 2, 2.0);
    CHECK(got.value == doctest::Approx(want.best).epsilon(1e-12));
    // frozen oracle value: 200/9 at {0.2, 0.8}
    CHECK(got.value == doctest::Approx(200.0 / 9.0).epsilon(1e-12));
    CHECK(got.config.xs[0] == doctest::Approx(0.2));
    CHECK(got.config.xs[1] == doctest::Approx(0.8));
}

TEST_CASE("brute force on the 101-point grid finds the symmetric near-optimum") {
    NormSpec n1 = NormSpec::euclid(1);
    Configuration cand = grid_cand(0, 1, 101);
    SampledSet y = grid_set(0, 1, 101);
    auto got = brute_force_polarization(cand, y, 2, 2.0, n1);
    CHECK(got.value == doctest::Approx(23.781213).epsilon(1e-6));
    CHECK(got.config.xs[0] == doctest::Approx(0.21));
    CHECK(got.config.xs[1] == doctest::Approx(0.79));
}

TEST_CASE("brute force refuses oversized enumerations") {
    NormSpec n1 = NormSpec::euclid(1);
    Configuration cand = grid_cand(0, 1, 2001);
    SampledSet y = grid_set(0, 1, 11);
    CHECK_THROWS_AS(brute_force_polarization(cand, y, 8, 2.0, n1), BudgetError);
}

TEST_CASE("maximize_polarization on the unit interval") {
    SetModel unit = SetModel::interval_union({{0.0, 1.0}});
    PolarizeOptions opts;
    opts.mesh = 1.0 / 40;
    auto r1 = maximize_polarization(unit, 1, 2.0, false, opts);
    CHECK(r1.value == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(r1.config.xs[0] == doctest::Approx(0.5));

    // heuristic matches the brute-force oracle on the same grid
    for (double s : {2.0, 3.0}) {
        for (int N = 1; N <= 4; ++N) {
            PolarizeOptions b = opts;
            b.strategy = PolarizationStrategy::brute_force;
            auto brute = maximize_polarization(unit, N, s, true, b);
            PolarizeOptions l = opts;
            l.strategy = PolarizationStrategy::local_search;
            auto local = maximize_polarization(unit, N, s, true, l);
            CHECK(local.value == doctest::Approx(brute.value).epsilon(1e-9));
        }
    }
}

TEST_CASE("cantor polarization from child-center seeds clears 36") {
    IfsModel cantor = IfsModel::build({Similitude::make_1d(Rational(1, 3), Rational(0, 1)),
                                       Similitude::make_1d(Rational(1, 3), Rational(2, 3))},
                                      {0.0}, {1.0}, NormSpec::euclid(1));
    SetModel model = SetModel::ifs(cantor, NormSpec::euclid(1));
    PolarizeOptions opts;
    opts.mesh = std::pow(3.0, -6) / 2.0;
    opts.strategy = PolarizationStrategy::automatic;
    auto r = maximize_polarization(model, 2, 2.0, false, opts);
    CHECK(r.value >= 36.0);
}

TEST_CASE("polarization sequence rises toward its plateau on a fine grid") {
    SetModel unit = SetModel::interval_union({{0.0, 1.0}});
    PolarizeOptions opts;
    opts.mesh = 1.0 / 60;
    opts.strategy = PolarizationStrategy::brute_force;
    auto seq = polarization_sequence(unit, {1, 2, 3, 4, 5}, 3.0, true, opts);
    // frozen oracle values of P/N^3 on the 61-point grid
    const double expect[] = {8.0, 10.99125, 12.24365, 13.48047, 13.59977};
    for (int i = 0; i < 5; ++i) CHECK(seq[i].normalized == doctest::Approx(expect[i]).epsilon(1e-4));
    for (int i = 1; i < 5; ++i) CHECK(seq[i].normalized > seq[i - 1].normalized);
}

TEST_CASE("cantor polarization stays in a fixed normalized band") {
    IfsModel cantor = IfsModel::build({Similitude::make_1d(Rational(1, 3), Rational(0, 1)),
                                       Similitude::make_1d(Rational(1, 3), Rational(2, 3))},
                                      {0.0}, {1.0}, NormSpec::euclid(1));
    SetModel model = SetModel::ifs(cantor, NormSpec::euclid(1));
    PolarizeOptions opts;
    opts.strategy = PolarizationStrategy::construction;
    std::vector<int> sched{1, 2, 3, 4, 5, 6, 8, 11, 16, 24, 32, 48, 64, 100, 128, 200, 256};
    auto seq = polarization_sequence(model, sched, 2.0, true, opts);
    // d-regularity pins P/N^{s/d} inside a fixed two-sided band
    for (const auto& r : seq) {
        CHECK(r.normalized >= 0.8);
        CHECK(r.normalized <= 4.0);
    }
    // along N = 2^k the construction is exactly self-similar and converges
    CHECK(seq.back().normalized == doctest::Approx(2.4371).epsilon(1e-3));
}

TEST_CASE("frostman bound from the empirical d-regularity audit caps cantor values") {
    IfsModel cantor = IfsModel::build({Similitude::make_1d(Rational(1, 3), Rational(0, 1)),
                                       Similitude::make_1d(Rational(1, 3), Rational(2, 3))},
                                      {0.0}, {1.0}, NormSpec::euclid(1));
    auto audit = dregularity_audit(cantor, NormSpec::euclid(1), 9);
    FrostmanBound fb = frostman_from_audit(cantor, audit, 2.0);
    CHECK(fb.c_fro > 0);
    SetModel model = SetModel::ifs(cantor, NormSpec::euclid(1));
    PolarizeOptions opts;
    opts.strategy = PolarizationStrategy::construction;
    auto seq = polarization_sequence(model, {1, 2, 4, 8, 16, 32, 64}, 2.0, true, opts);
    for (const auto& r : seq) CHECK(r.value <= frostman_upper_bound(fb, r.N));
}

TEST_CASE("frostman bound on the unit interval") {
    FrostmanBound f2(2.0, 1.0, 2.0, 1.0);
    CHECK(f2.c_fro == doctest::Approx(32.0));
    CHECK(frostman_upper_bound(f2, 2) == doctest::Approx(128.0));
    FrostmanBound f3(3.0, 1.0, 2.0, 1.0);
    CHECK(f3.c_fro == doctest::Approx(96.0));
    CHECK(frostman_upper_bound(f3, 1) == doctest::Approx(96.0));
    CHECK(4.0 <= frostman_upper_bound(f2, 1));  // P*([0,1],1) = 4 <= 32
    CHECK_THROWS_AS(FrostmanBound(1.0, 1.0, 2.0, 1.0), std::domain_error);
}

TEST_CASE("weak separation audit") {
    NormSpec n1 = NormSpec::euclid(1);
    SampledSet y = grid_set(0, 1, 101);
    Configuration mid(1);
    int N = 10;
    for (int k = 1; k <= N; ++k) mid.push((2.0 * k - 1) / (2.0 * N));
    CHECK(weak_separation_audit(mid, y, N, 1.0, 1, 0.4, n1) == 0);

    Configuration dup(1);
    for (int i = 0; i < N; ++i) dup.push(0.5);
    CHECK(weak_separation_audit(dup, y, N, 1.0, 1, 0.4, n1) > 0);

    Configuration opt = grid_cand(0, 1, 41);
    SampledSet y41 = grid_set(0, 1, 41);
    auto best = brute_force_polarization(opt, y41, 3, 3.0, n1);
    CHECK(weak_separation_audit(best.config, y41, 3, 1.0, 1, 0.2, n1) == 0);
}

TEST_CASE("superadditivity checker") {
    NormSpec n1 = NormSpec::euclid(1);
    Configuration cand = grid_cand(0, 1, 21);
    SampledSet y = grid_set(0, 1, 21);
    std::map<int, double> table;
    for (int N = 1; N <= 6; ++N) table[N] = brute_force_polarization(cand, y, N, 2.0, n1).value;
    CHECK(superadditivity_check(table) >= -1e-9);

    std::map<int, double> single{{1, 4.0}};
    CHECK(superadditivity_check(single) == std::numeric_limits<double>::infinity());

    std::map<int, double> counterexample{{1, 4.0}, {2, 7.0}};
    CHECK(superadditivity_check(counterexample) == doctest::Approx(-1.0));

    // records overload refuses heuristic values
    std::vector<SequenceRecord> recs{{1, 4.0, 4.0, true, 0.0}, {2, 9.0, 2.25, false, 0.1}};
    CHECK_THROWS_AS(superadditivity_check(recs), std::invalid_argument);
}

TEST_CASE("neighborhood stability") {
    SetModel unit = SetModel::interval_union({{0.0, 1.0}});
    NormSpec n1 = NormSpec::euclid(1);
    Configuration cand = grid_cand(0, 1, 41);
    SampledSet y = grid_set(0, 1, 41);
    auto opt = brute_force_polarization(cand, y, 3, 3.0, n1);
    FrostmanBound fb(3.0, 1.0, 2.0, 1.0);

    auto rep = neighborhood_stability_check(opt.config, unit, 3.0, 0.05, 3, fb, 1e-3);
    CHECK(rep.pass);
    CHECK(rep.ratio >= rep.bound);

    // shrinking eps drives the ratio to 1
    auto tiny = neighborhood_stability_check(opt.config, unit, 3.0, 1e-4, 3, fb, 1e-4);
    CHECK(tiny.ratio >= 0.999);

    // a far-away configuration sees nearly constant potentials
    Configuration far(1);
    far.push(10.0);
    far.push(11.0);
    far.push(12.0);
    auto far_rep = neighborhood_stability_check(far, unit, 3.0, 0.05, 3, fb, 1e-3);
    CHECK(far_rep.pass);
    CHECK(far_rep.ratio == doctest::Approx(1.0).epsilon(0.05));

    // eps outside the admissible range is rejected
    CHECK_THROWS_AS(neighborhood_stability_check(opt.config, unit, 3.0, 0.3, 3, fb, 1e-3), std::domain_error);
}

TEST_CASE("short-range upper bound with the h^{-s} N slack") {
    NormSpec n1 = NormSpec::euclid(1);
    double h = 1.0, s = 2.0;
    SampledSet y1 = grid_set(0, 1, 11), y2 = grid_set(3, 4, 11);
    std::vector<double> all(y1.xs);
    all.insert(all.end(), y2.xs.begin(), y2.xs.end());
    SampledSet both = SampledSet::from_sorted_1d(all, 0.1, "pair");
    Configuration cand(1);
    cand.xs = both.xs;
    Configuration c1(1), c2(1);
    c1.xs = y1.xs;
    c2.xs = y2.xs;
    for (int N = 2; N <= 5; ++N) {
        auto best = brute_force_polarization(cand, both, N, s, n1);
        int n1_count = 0;
        for (std::size_t i = 0; i < best.config.size(); ++i)
            if (best.config.point(i)[0] < 2.0) ++n1_count;
        int n2_count = N - n1_count;
        if (n1_count == 0 || n2_count == 0) continue;
        double p1 = brute_force_polarization(c1, y1, n1_count, s, n1).value;
        double p2 = brute_force_polarization(c2, y2, n2_count, s, n1).value;
        CHECK(best.value <= std::min(p1, p2) + inv_pow(h, s) * N + 1e-9);
    }
}

}  // TEST_SUITE
