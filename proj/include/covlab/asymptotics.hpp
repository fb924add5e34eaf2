#pragma once

#include <optional>
#include <string>
#include <vector>

#include "covlab/geometry.hpp"
#include "covlab/records.hpp"
#include "covlab/set_models.hpp"

namespace covlab {

/// min/max of the normalized column over the trailing window of the records;
/// plateau iff limsup_est/liminf_est <= 1 + tol. Needs at least 8 records.
LimitWindow limit_window(const std::vector<SequenceRecord>& seq, double window_fraction, double tol);

struct ThetaReport {
    bool conclusive = false;    // plateau reached and measure known
    double theta_hat = 0.0;     // plateau midpoint / H_d^{1/d}
    double window_lo = 0.0, window_hi = 0.0;
    std::string note;
};

/// theta_d estimand from a covering sequence on a model with known measure.
ThetaReport theta_check(const SetModel& model, const std::vector<SequenceRecord>& covering_seq,
                        double plateau_tol = 0.05, double window_fraction = 0.5);

struct SigmaReport {
    bool conclusive = false;
    double sigma_hat = 0.0;     // plateau midpoint * H_d^{s/d}
    double window_lo = 0.0, window_hi = 0.0;
    std::string note;
};

/// sigma_{s,d} estimand from a polarization sequence (normalization s/d).
SigmaReport sigma_check(const SetModel& model, const std::vector<SequenceRecord>& polarization_seq, double s,
                        double plateau_tol = 0.10, double window_fraction = 0.5);

/// max_k |count_k / N - 1/K| over K equal-measure cells of the model
/// (axis slabs; grid cells when K is a perfect d-th power on a box).
double uniformity_discrepancy(const Configuration& omega, const SetModel& model, int K);

struct BridgeReport {
    bool trivial_direction_ok = false;   // P >= rho^{-s} (1 - slack) on matched records
    double worst_trivial_margin = 0.0;   // min over N of P * rho^s
    std::vector<std::pair<int, double>> c_hat;  // fitted C(N) = rho * N^{-p/(d(s-p))} * P^{-1/(p-s)}
    double c_hat_last_octave_variation = 0.0;   // max/min over the trailing octave
    double gap_at_largest_N = 0.0;       // (P/N^{s/d})^{1/s} - 1/(rho N^{1/d})
};

/// Covering-polarization bridge diagnostics on matched N grids; requires s > p.
BridgeReport bridge_check(const std::vector<SequenceRecord>& covering_seq,
                          const std::vector<SequenceRecord>& polarization_seq, double s, double d, int p,
                          double slack = 1e-6);

struct GeneralestReport {
    bool positive_finite = false;
    double liminf_over_lower = 0.0;  // liminf_est / lower_window^{1/d}
    double liminf_over_upper = 0.0;
    double limsup_over_lower = 0.0;
    double limsup_over_upper = 0.0;
    std::string note;
};

/// Sandwich check: normalized covering limits against Minkowski windows.
GeneralestReport generalest_check(const SetModel& model, const std::vector<SequenceRecord>& covering_seq,
                                  const MinkowskiReport& mink, double window_fraction = 0.5);

}  // namespace covlab
