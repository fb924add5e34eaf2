#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "covlab/geometry.hpp"
#include "covlab/records.hpp"
#include "covlab/set_models.hpp"

namespace covlab {

/// Frostman-lemma upper bound data: P_s(omega_N, A) <= c_fro * N^{s/d} for a
/// measure with mu(B_r(x) cap A) <= c r^d and mu(A) = mass.
struct FrostmanBound {
    double s = 2.0;
    double d = 1.0;
    double regularity_c = 2.0;
    double mass = 1.0;
    double c_fro = 0.0;

    FrostmanBound(double s_, double d_, double c_, double mass_);
};

double frostman_upper_bound(const FrostmanBound& fb, int N);

/// Frostman data for an IFS model from its empirical d-regularity audit:
/// the normalized counting measure on deep samples satisfies
/// mu(B_r(x)) <= c_fit (r/diam)^d, so c = c_fit / diam^d with mass 1.
FrostmanBound frostman_from_audit(const IfsModel& ifs, const DRegularityReport& audit, double s);

enum class PolarizationStrategy { automatic, brute_force, local_search, construction };

struct PolarizeOptions {
    std::uint64_t seed = 1;
    int restarts = 8;
    int max_moves = 2000;
    double mesh = 0.0;  // 0 = auto
    PolarizationStrategy strategy = PolarizationStrategy::automatic;
    std::size_t brute_budget = 10'000'000;  // max multisets
    std::size_t sample_budget = kDefaultSampleBudget;
    // Covering configuration to seed from (bridge runs pass the exact
    // configuration whose radius they report). When null, a fresh
    // best_covering run provides the seed.
    const Configuration* covering_seed = nullptr;
};

struct PolarizationResult {
    double value = 0.0;  // P_s on the sample: exact there, lower-bound slack vs the true set is logged
    Configuration config;
    bool exact = false;
    double mesh_certificate = 0.0;
};

/// Exact maximum of P_s over all N-multisets of `candidates` (combinations
/// with repetition; ties break to the lexicographically smallest multiset).
/// Refuses (BudgetError) when the multiset count exceeds the budget.
PolarizationResult brute_force_polarization(const Configuration& candidates, const SampledSet& Y, int N, double s,
                                            const NormSpec& norm, std::size_t budget = 10'000'000);

/// Best of brute force (within budget), covering-seeded start, and multistart
/// steepest-ascent relocation of the weakest point near the minimizing y.
PolarizationResult maximize_polarization(const SetModel& model, int N, double s, bool constrained,
                                         const PolarizeOptions& opts = {});

std::vector<SequenceRecord> polarization_sequence(const SetModel& model, const std::vector<int>& schedule, double s,
                                                  bool constrained, const PolarizeOptions& opts = {});

/// Matched covering/polarization record pairs for bridge checks: one
/// best-covering configuration per N, its radius measured on the same sample
/// the polarization run minimizes over, and the polarization run seeded with
/// exactly that configuration, which makes P >= rho^{-s} a theorem on the
/// records rather than a heuristic hope.
struct BridgeSequences {
    std::vector<SequenceRecord> covering;
    std::vector<SequenceRecord> polarization;
};

BridgeSequences matched_bridge_sequences(const SetModel& model, const std::vector<int>& schedule, double s,
                                         bool constrained, std::uint64_t seed, int restarts = 6);

/// Number of sample-centered balls of radius eta * N^{-1/d} containing more
/// than p points of omega (weak-separation audit).
int weak_separation_audit(const Configuration& omega, const SampledSet& Y, int N, double d, int p, double eta,
                          const NormSpec& norm);

/// min over table pairs of P(N1+N2) - P(N1) - P(N2); +infinity when no pair
/// exists. Table values must be exact maxima for the inequality to be a
/// theorem; the record overload enforces the exactness flags.
double superadditivity_check(const std::map<int, double>& exact_values);
double superadditivity_check(const std::vector<SequenceRecord>& exact_records);

struct NbhdStabilityReport {
    bool pass = false;
    double ratio = 0.0;  // P(omega, B_r sample) / P(omega, A sample)
    double bound = 0.0;  // 1 - eps * s * c_fro^{1/s}
    double value_on_set = 0.0;
    double value_on_neighborhood = 0.0;
};

/// Fattened-set polarization stability at r_N = eps * N^{-1/d}.
NbhdStabilityReport neighborhood_stability_check(const Configuration& omega, const SetModel& model, double s,
                                                 double eps, int N, const FrostmanBound& fb, double mesh);

}  // namespace covlab
