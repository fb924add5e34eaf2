#include "covlab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <variant>

namespace covlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

LimitWindow limit_window(const std::vector<SequenceRecord>& seq, double window_fraction, double tol) {
    if (seq.size() < 8) throw std::invalid_argument("limit_window: need at least 8 records");
    if (!(window_fraction > 0 && window_fraction <= 1)) throw std::invalid_argument("limit_window: bad window fraction");
    LimitWindow w;
    w.window_fraction = window_fraction;
    std::size_t start = static_cast<std::size_t>(std::floor(seq.size() * (1.0 - window_fraction)));
    if (start >= seq.size()) start = seq.size() - 1;
    w.liminf_est = kInf;
    w.limsup_est = -kInf;
    for (std::size_t i = start; i < seq.size(); ++i) {
        double v = seq[i].normalized;
        w.liminf_est = std::min(w.liminf_est, v);
        w.limsup_est = std::max(w.limsup_est, v);
    }
    w.plateau = w.limsup_est <= w.liminf_est * (1.0 + tol);
    return w;
}

ThetaReport theta_check(const SetModel& model, const std::vector<SequenceRecord>& covering_seq, double plateau_tol,
                        double window_fraction) {
    ThetaReport rep;
    if (!model.known_measure) {
        rep.note = "inconclusive: model has no known measure";
        return rep;
    }
    LimitWindow w = limit_window(covering_seq, window_fraction, plateau_tol);
    rep.window_lo = w.liminf_est;
    rep.window_hi = w.limsup_est;
    if (!w.plateau) {
        rep.note = "inconclusive: no plateau at tolerance";
        return rep;
    }
    double mid = 0.5 * (w.liminf_est + w.limsup_est);
    rep.theta_hat = mid / std::pow(*model.known_measure, 1.0 / model.dim_d);
    rep.conclusive = true;
    return rep;
}

SigmaReport sigma_check(const SetModel& model, const std::vector<SequenceRecord>& polarization_seq, double s,
                        double plateau_tol, double window_fraction) {
    SigmaReport rep;
    if (!model.known_measure) {
        rep.note = "inconclusive: model has no known measure";
        return rep;
    }
    LimitWindow w = limit_window(polarization_seq, window_fraction, plateau_tol);
    rep.window_lo = w.liminf_est;
    rep.window_hi = w.limsup_est;
    if (!w.plateau) {
        rep.note = "inconclusive: no plateau at tolerance";
        return rep;
    }
    double mid = 0.5 * (w.liminf_est + w.limsup_est);
    rep.sigma_hat = mid * std::pow(*model.known_measure, s / model.dim_d);
    rep.conclusive = true;
    return rep;
}

double uniformity_discrepancy(const Configuration& omega, const SetModel& model, int K) {
    if (K < 1) throw std::invalid_argument("uniformity_discrepancy: K >= 1");
    if (omega.size() == 0) throw std::domain_error("uniformity_discrepancy: empty configuration");
    std::vector<long> counts(K, 0);
    if (const auto* b = std::get_if<BoxModel>(&model.shape)) {
        int grid = 0;
        if (b->d >= 2) {
            int k = static_cast<int>(std::llround(std::pow(static_cast<double>(K), 1.0 / b->d)));
            if (std::pow(k, b->d) == K) grid = k;
        }
        for (std::size_t i = 0; i < omega.size(); ++i) {
            auto p = omega.point(i);
            long cell;
            if (grid > 0) {
                cell = 0;
                for (int t = b->d - 1; t >= 0; --t) {
                    double u = (p[t] - b->origin[t]) / b->side;
                    long c = std::clamp(static_cast<long>(std::floor(u * grid)), 0L, static_cast<long>(grid - 1));
                    cell = cell * grid + c;
                }
            } else {
                double u = (p[0] - b->origin[0]) / b->side;
                cell = std::clamp(static_cast<long>(std::floor(u * K)), 0L, static_cast<long>(K - 1));
            }
            ++counts[cell];
        }
    } else if (const auto* iu = std::get_if<IntervalUnion>(&model.shape)) {
        // K equal-length slabs in arc measure along the union
        double total = iu->total_length();
        for (std::size_t i = 0; i < omega.size(); ++i) {
            double x = omega.point(i)[0];
            double arc = 0;
            for (auto [a, bnd] : iu->intervals) {
                if (x > bnd) arc += bnd - a;
                else if (x >= a) {
                    arc += x - a;
                    break;
                } else {
                    break;
                }
            }
            long cell = std::clamp(static_cast<long>(std::floor(arc / total * K)), 0L, static_cast<long>(K - 1));
            ++counts[cell];
        }
    } else {
        throw std::invalid_argument("uniformity_discrepancy: equal-measure cells unavailable for this model");
    }
    double n = static_cast<double>(omega.size());
    double worst = 0;
    for (long c : counts) worst = std::max(worst, std::abs(c / n - 1.0 / K));
    return worst;
}

BridgeReport bridge_check(const std::vector<SequenceRecord>& covering_seq,
                          const std::vector<SequenceRecord>& polarization_seq, double s, double d, int p,
                          double slack) {
    if (!(s > p)) throw std::domain_error("bridge_check: requires s > p");
    if (covering_seq.size() != polarization_seq.size())
        throw std::invalid_argument("bridge_check: sequences must share the N grid");
    BridgeReport rep;
    rep.worst_trivial_margin = kInf;
    rep.trivial_direction_ok = true;
    for (std::size_t i = 0; i < covering_seq.size(); ++i) {
        if (covering_seq[i].N != polarization_seq[i].N)
            throw std::invalid_argument("bridge_check: mismatched N grids");
        double rho = covering_seq[i].value;
        double P = polarization_seq[i].value;
        double margin = P * std::pow(rho, s);
        rep.worst_trivial_margin = std::min(rep.worst_trivial_margin, margin);
        if (margin < 1.0 - slack) rep.trivial_direction_ok = false;
        double N = covering_seq[i].N;
        double c_hat = rho * std::pow(N, -static_cast<double>(p) / (d * (s - p))) * std::pow(P, -1.0 / (p - s));
        rep.c_hat.push_back({covering_seq[i].N, c_hat});
    }
    int n_last = covering_seq.back().N;
    double lo = kInf, hi = -kInf;
    for (const auto& [N, c] : rep.c_hat) {
        if (N * 2 < n_last) continue;
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    rep.c_hat_last_octave_variation = hi / lo;
    double Pn = polarization_seq.back().value;
    double rhon = covering_seq.back().value;
    double N = covering_seq.back().N;
    rep.gap_at_largest_N =
        std::pow(Pn / std::pow(N, s / d), 1.0 / s) - 1.0 / (rhon * std::pow(N, 1.0 / d));
    return rep;
}

GeneralestReport generalest_check(const SetModel& model, const std::vector<SequenceRecord>& covering_seq,
                                  const MinkowskiReport& mink, double window_fraction) {
    GeneralestReport rep;
    if (!(mink.lower_window > 0) || !std::isfinite(mink.upper_window)) {
        rep.note = "inconclusive: degenerate Minkowski windows";
        return rep;
    }
    LimitWindow w = limit_window(covering_seq, window_fraction, 0.05);
    double d = model.dim_d;
    rep.liminf_over_lower = w.liminf_est / std::pow(mink.lower_window, 1.0 / d);
    rep.liminf_over_upper = w.liminf_est / std::pow(mink.upper_window, 1.0 / d);
    rep.limsup_over_lower = w.limsup_est / std::pow(mink.lower_window, 1.0 / d);
    rep.limsup_over_upper = w.limsup_est / std::pow(mink.upper_window, 1.0 / d);
    rep.positive_finite = rep.liminf_over_upper > 0 && std::isfinite(rep.limsup_over_lower);
    return rep;
}

}  // namespace covlab
