#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "covlab/covering.hpp"
#include "covlab/rational.hpp"
#include "covlab/set_models.hpp"

namespace covlab {

enum class LatticeVerdict { lattice, nonlattice, unknown };

/// Lattice: all ratios are integer powers r^{i_m} of a common rational base
/// (proved in rational arithmetic via prime factorizations). NonLattice: two
/// ratios with provably incommensurable logs exist. Unknown is reserved for
/// inputs outside the provable range (exponents beyond the search bound).
struct LatticeClassification {
    LatticeVerdict verdict = LatticeVerdict::unknown;
    Rational base;                // lattice case only
    std::vector<int> exponents;   // sorted descending, aligned with `ratios`
    std::vector<Rational> ratios; // input ratios reordered to match exponents
    std::string evidence;
};

LatticeClassification classify_lattice(const std::vector<Rational>& ratios);

/// Renewal sequence R_n = N(r^n) = min{N : rho(A, N) <= r^n}: reads the DP
/// table below the validity threshold J (smallest J with 2 r^J below the
/// certified child distance) and applies R_n = sum_m R_{n - i_m} beyond it.
struct RenewalSequence {
    std::vector<long long> values;  // R_0 .. R_n_max
    int threshold_J = 0;
    std::vector<int> base_from_table;  // indices <= J read from the DP
};

RenewalSequence renewal_covering_sequence(const IfsModel& ifs, const LatticeClassification& cls,
                                          const FractalCoveringTable& table, int n_max);

struct OscillationReport {
    double liminf_est = 0.0;
    double limsup_est = 0.0;
    double band_ratio = 1.0;                      // limsup_est / liminf_est over the trailing window
    std::optional<double> c_gap;                  // min_n rho(A, R_n - 1)/r^n, lattice models
    std::vector<std::pair<int, double>> octave_ratios;  // (octave exponent, max/min of normalized)
};

/// Oscillation diagnostics of N^{1/d} rho(A, N) from the DP table: trailing
/// window band, per-octave max/min ratios, and the lattice gap constant.
OscillationReport oscillation_report(const IfsModel& ifs, const FractalCoveringTable& table, int n_max,
                                     double window_fraction = 0.5);

struct RenewalResidualReport {
    std::vector<double> t;
    std::vector<double> L;        // L(t) = N(t) - sum_m N(t r_m^s)
    double max_L = 0.0;
    double min_L = 0.0;
    double first_decade_decay = 0.0;  // max |L| t^{-d/s + eps} over the leading decade
    double last_decade_decay = 0.0;   // same over the trailing decade
};

/// Residual of the polarization renewal identity on an exact table of
/// maximal polarization values. The t schedule is clipped to the table's
/// reach; a non-monotone table is rejected.
RenewalResidualReport polarization_renewal_residual(const IfsModel& ifs, double s, const std::vector<double>& t_schedule,
                                                    const std::map<int, double>& exact_polarization,
                                                    double decay_eps = 0.01);

}  // namespace covlab
