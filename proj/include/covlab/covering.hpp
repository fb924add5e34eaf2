#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "covlab/geometry.hpp"
#include "covlab/records.hpp"
#include "covlab/set_models.hpp"

namespace covlab {

enum class CoveringStrategy { automatic, exact, heuristic };

struct SolveOptions {
    std::uint64_t seed = 1;
    int restarts = 8;
    int refine_iters = 60;
    double mesh = 0.0;       // optimization sample mesh; 0 = auto from N
    double eval_mesh = 0.0;  // final evaluation mesh; 0 = auto
    CoveringStrategy strategy = CoveringStrategy::automatic;
    std::size_t sample_budget = kDefaultSampleBudget;
};

struct CoveringResult {
    double radius = 0.0;  // R(omega, sample); true-set bound is radius + mesh_certificate
    Configuration config;
    bool exact = false;
    double mesh_certificate = 0.0;
};

/// Gonzalez farthest-point traversal seeded at the sample's first point
/// (classical 2-approximation for the constrained problem on the sample).
/// N > |Y| returns all of Y.
Configuration farthest_point_net(const SampledSet& Y, int N, const NormSpec& norm, std::size_t seed_index = 0);

/// Alternating assignment / center recomputation (smallest enclosing ball of
/// each cell under the norm). Returns the best iterate by covering radius,
/// never worse than the input.
Configuration minimax_refine(const Configuration& omega, const SampledSet& Y, int iters, const NormSpec& norm,
                             bool constrain_to_sample = false);

/// Exact 1D best covering of an interval union by binary search on the
/// radius with a greedy left-to-right sweep. Radius exact to 1e-12.
CoveringResult exact_covering_1d(const IntervalUnion& set, int N, bool constrained);

/// Exact 1D best covering of a finite sorted point set (same sweep).
double exact_covering_points_1d(const std::vector<double>& sorted_pts, int N, bool constrained,
                                std::vector<double>* centers = nullptr);

struct FractalCoveringEntry {
    double radius = 0.0;
    bool exact = false;           // guard held at every recursive level
    double cert = 0.0;            // |radius - true rho| bound from base-case meshes
    bool from_recursion = false;
    std::vector<int> composition;  // child allocation (empty for base cases)
};

struct AllocationNode {
    int n = 0;
    double radius = 0.0;
    std::vector<AllocationNode> children;
};

/// Renewal dynamic program over child allocations:
///   rho(A, n) = min over compositions n = sum n_m (n_m >= 1) of max_m r_m rho(A, n_m),
/// accepted only while the resulting radius stays below the certified child
/// separation h (a ball of radius < h meets at most one first-level image).
/// Cardinalities where the guard fails fall back to exact-on-sample brute
/// force; ties between compositions break to the lexicographically smallest.
class FractalCoveringTable {
public:
    static FractalCoveringTable compute(const IfsModel& ifs, const NormSpec& norm, int n_max, bool constrained,
                                        std::size_t sample_budget = kDefaultSampleBudget);

    const FractalCoveringEntry& at(int n) const;
    int n_max() const { return static_cast<int>(entries_.size()) - 1; }
    bool constrained() const { return constrained_; }
    double base_mesh() const { return base_mesh_; }
    int guard_threshold() const { return guard_threshold_; }  // largest base-case n
    AllocationNode allocation_tree(int n) const;

    /// min{N : rho(A, N) <= t}; nullopt when t is below the table's reach.
    std::optional<int> inverse_of_radius(double t) const;

private:
    std::vector<FractalCoveringEntry> entries_;  // index 0 unused
    bool constrained_ = false;
    double base_mesh_ = 0.0;
    int guard_threshold_ = 0;
};

/// Square-grid construction on a box model: k x k x ... sub-cube centers plus
/// greedy extras when N is not a perfect d-th power.
Configuration grid_construction(const BoxModel& b, int N, const SampledSet& Y, const NormSpec& norm);

/// Streaming covering-radius evaluation of a configuration over a box model
/// at the given grid spacing (no sample materialization).
double covering_radius_on_box_grid(const Configuration& omega, const BoxModel& b, const NormSpec& norm, double spacing);

/// Dispatch: exact 1D / fractal DP where applicable, otherwise multistart
/// farthest-point + minimax refinement (plus the grid construction candidate
/// on boxes). Reported radius is measured on the evaluation sample; the
/// true-set certificate is radius + mesh_certificate.
CoveringResult best_covering(const SetModel& model, int N, bool constrained, const SolveOptions& opts = {});

std::vector<SequenceRecord> covering_sequence(const SetModel& model, const std::vector<int>& schedule, bool constrained,
                                              const SolveOptions& opts = {});

}  // namespace covlab
