#include "covlab/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace covlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kExponentBound = 64;
}  // namespace

LatticeClassification classify_lattice(const std::vector<Rational>& ratios) {
    if (ratios.empty()) throw std::invalid_argument("classify_lattice: no ratios");
    for (const auto& r : ratios)
        if (!r.in_unit_interval()) throw std::invalid_argument("classify_lattice: ratios must lie in (0,1)");

    LatticeClassification out;
    // exponent vectors over the primes; ratio r_m = prod p^{v_m[p]}
    std::vector<std::map<std::int64_t, int>> vecs;
    std::vector<int> gcds;
    for (const auto& r : ratios) {
        vecs.push_back(factor_exponents(r));
        gcds.push_back(exponent_gcd(vecs.back()));
    }
    // primitive direction of the first ratio
    auto primitive = vecs.front();
    int g0 = gcds.front();
    for (auto& [p, e] : primitive) e /= g0;
    bool all_parallel = true;
    std::size_t witness = 0;
    for (std::size_t m = 1; m < vecs.size(); ++m) {
        auto u = vecs[m];
        for (auto& [p, e] : u) e /= gcds[m];
        if (u != primitive) {
            all_parallel = false;
            witness = m;
            break;
        }
    }
    if (!all_parallel) {
        // log r_1 / log r_m is irrational: a rational relation q log r_1 = n log r_m
        // would force n v_1 = q v_m by unique factorization, contradicting
        // non-parallel exponent vectors.
        out.verdict = LatticeVerdict::nonlattice;
        out.ratios = ratios;
        out.evidence = "log(" + ratios.front().str() + ")/log(" + ratios[witness].str() +
                       ") is irrational by unique factorization; the log-ratio group is dense";
        return out;
    }
    for (int g : gcds)
        if (g > kExponentBound) {
            out.verdict = LatticeVerdict::unknown;
            out.ratios = ratios;
            out.evidence = "common-base exponent exceeds the search bound " + std::to_string(kExponentBound);
            return out;
        }
    // base = prod p^{primitive[p]}
    std::int64_t num = 1, den = 1;
    for (const auto& [p, e] : primitive) {
        for (int i = 0; i < std::abs(e); ++i) {
            if (e > 0) num *= p;
            else den *= p;
        }
    }
    out.base = Rational(num, den);
    if (!out.base.in_unit_interval()) throw std::runtime_error("classify_lattice: base outside (0,1)");
    // sort exponents descending, carrying the ratios along
    std::vector<std::size_t> order(ratios.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return gcds[a] > gcds[b]; });
    for (std::size_t t : order) {
        out.exponents.push_back(gcds[t]);
        out.ratios.push_back(ratios[t]);
    }
    // verify r^{i_m} = r_m exactly through the factorization vectors
    for (std::size_t m = 0; m < out.ratios.size(); ++m) {
        auto check = factor_exponents(out.ratios[m]);
        if (check.size() != primitive.size()) throw std::runtime_error("classify_lattice: verification failed");
        for (auto& [p, e] : check) {
            auto it = primitive.find(p);
            if (it == primitive.end() || e != it->second * out.exponents[m])
                throw std::runtime_error("classify_lattice: verification failed");
        }
    }
    out.verdict = LatticeVerdict::lattice;
    out.evidence = "all ratios are exact powers of " + out.base.str();
    return out;
}

RenewalSequence renewal_covering_sequence(const IfsModel& ifs, const LatticeClassification& cls,
                                          const FractalCoveringTable& table, int n_max) {
    if (cls.verdict != LatticeVerdict::lattice)
        throw std::invalid_argument("renewal_covering_sequence: requires a lattice verdict");
    double r = cls.base.value();
    // validity threshold: 2 r^J < certified child distance (= 2 h)
    double min_dist = 2.0 * ifs.separation_h_certified;
    int J = 0;
    while (2.0 * std::pow(r, J) >= min_dist && J < 4096) ++J;
    int imax = *std::max_element(cls.exponents.begin(), cls.exponents.end());
    J = std::max(J, imax);

    RenewalSequence seq;
    seq.threshold_J = J;
    for (int n = 0; n <= n_max; ++n) {
        if (n <= J) {
            auto inv = table.inverse_of_radius(std::pow(r, n));
            if (!inv)
                throw std::invalid_argument("renewal_covering_sequence: DP table too small for base value n=" +
                                            std::to_string(n));
            if (!table.at(*inv).exact)
                throw std::invalid_argument("renewal_covering_sequence: base values must be exact");
            seq.values.push_back(*inv);
            seq.base_from_table.push_back(n);
        } else {
            long long acc = 0;
            for (int i : cls.exponents) acc += seq.values[n - i];
            seq.values.push_back(acc);
        }
    }
    return seq;
}

OscillationReport oscillation_report(const IfsModel& ifs, const FractalCoveringTable& table, int n_max,
                                     double window_fraction) {
    if (n_max < 2 || n_max > table.n_max()) throw std::invalid_argument("oscillation_report: bad n_max");
    double d = ifs.dim_d;
    OscillationReport rep;
    int start = std::max(2, static_cast<int>(std::floor(n_max * (1.0 - window_fraction))));
    rep.liminf_est = kInf;
    rep.limsup_est = -kInf;
    for (int n = start; n <= n_max; ++n) {
        double nv = std::pow(static_cast<double>(n), 1.0 / d) * table.at(n).radius;
        rep.liminf_est = std::min(rep.liminf_est, nv);
        rep.limsup_est = std::max(rep.limsup_est, nv);
    }
    rep.band_ratio = rep.limsup_est / rep.liminf_est;
    for (int oct = 1; (2 << oct) <= n_max; ++oct) {
        int a = (1 << oct) + 1, b = 2 << oct;
        double lo = kInf, hi = -kInf;
        for (int n = a; n <= b; ++n) {
            double nv = std::pow(static_cast<double>(n), 1.0 / d) * table.at(n).radius;
            lo = std::min(lo, nv);
            hi = std::max(hi, nv);
        }
        rep.octave_ratios.push_back({oct, hi / lo});
    }
    // lattice gap constant: rho(A, R_n - 1) / r^n over reachable n
    auto cls = classify_lattice(ifs.exact_ratios());
    if (cls.verdict == LatticeVerdict::lattice) {
        double r = cls.base.value();
        double gap = kInf;
        bool have = false;
        for (int n = 1; n < 4096; ++n) {
            double t = std::pow(r, n);
            auto inv = table.inverse_of_radius(t);
            if (!inv) break;
            if (*inv < 2) continue;
            gap = std::min(gap, table.at(*inv - 1).radius / t);
            have = true;
        }
        if (have) rep.c_gap = gap;
    }
    return rep;
}

RenewalResidualReport polarization_renewal_residual(const IfsModel& ifs, double s, const std::vector<double>& t_schedule,
                                                    const std::map<int, double>& exact_polarization, double decay_eps) {
    if (!(s > ifs.dim_d)) throw std::domain_error("polarization_renewal_residual: requires s > d");
    if (exact_polarization.empty()) throw std::invalid_argument("polarization_renewal_residual: empty table");
    double prev = -kInf;
    for (const auto& [n, v] : exact_polarization) {
        if (v < prev) throw std::invalid_argument("polarization_renewal_residual: non-monotone polarization table");
        prev = v;
    }
    double reach = exact_polarization.rbegin()->second;
    auto inverse = [&](double t) -> long long {
        // N(t) = min{N : P(N) >= t}; tables start at the smallest recorded N
        for (const auto& [n, v] : exact_polarization)
            if (v >= t) return n;
        return -1;  // beyond the table (callers clip)
    };
    RenewalResidualReport rep;
    rep.max_L = -kInf;
    rep.min_L = kInf;
    double d = ifs.dim_d;
    for (double t : t_schedule) {
        if (t > reach) continue;  // clipped: N(t) unknown past the table
        long long nt = inverse(t);
        double acc = 0;
        bool ok = nt >= 0;
        for (const auto& m : ifs.maps) {
            long long nm = inverse(t * std::pow(m.ratio, s));
            if (nm < 0) ok = false;
            acc += static_cast<double>(nm);
        }
        if (!ok) continue;
        double L = static_cast<double>(nt) - acc;
        rep.t.push_back(t);
        rep.L.push_back(L);
        rep.max_L = std::max(rep.max_L, L);
        rep.min_L = std::min(rep.min_L, L);
    }
    if (!rep.t.empty()) {
        double t_lo = rep.t.front(), t_hi = rep.t.back();
        if (t_lo > t_hi) std::swap(t_lo, t_hi);
        for (std::size_t i = 0; i < rep.t.size(); ++i) {
            double weight = std::abs(rep.L[i]) * std::pow(rep.t[i], -d / s + decay_eps);
            if (rep.t[i] <= t_lo * 10.0) rep.first_decade_decay = std::max(rep.first_decade_decay, weight);
            if (rep.t[i] >= t_hi / 10.0) rep.last_decade_decay = std::max(rep.last_decade_decay, weight);
        }
    }
    return rep;
}

}  // namespace covlab
