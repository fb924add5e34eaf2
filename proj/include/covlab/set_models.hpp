#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "covlab/geometry.hpp"
#include "covlab/rational.hpp"

namespace covlab {

/// Contraction x -> r * O x + z with orthogonal O. The ratio is carried both
/// exactly (for the lattice classifier) and as a double (for evaluation).
struct Similitude {
    Rational ratio_exact;
    double ratio = 0.5;
    std::vector<double> rot;  // row-major dim x dim, orthogonal to 1e-12
    Point shift;

    int dim() const { return static_cast<int>(shift.size()); }
    Point apply(std::span<const double> x) const;

    static Similitude make_1d(Rational r, Rational shift, bool reflect = false);
    static Similitude make_2d(Rational r, double angle, bool reflect, Point shift);
    static Similitude make(Rational r, std::vector<double> rot, Point shift);
};

/// Self-similar fractal given by M >= 2 similitudes whose first-level images
/// are strictly separated. `separation_h` is half the minimal gap between
/// first-level images measured on a deep sample; `separation_h_certified`
/// subtracts the sampling slack and is what exactness guards use.
struct IfsModel {
    std::vector<Similitude> maps;
    std::vector<double> hull_lo, hull_hi;  // invariant axis box
    double dim_d = 0.0;                    // solves sum r_m^d = 1
    double separation_h = 0.0;
    double separation_h_certified = 0.0;
    double certification_mesh = 0.0;
    bool seeds_on_attractor = false;  // hull corners fixed by some map

    int ambient_dim() const { return static_cast<int>(hull_lo.size()); }
    double hull_diameter(const NormSpec& norm) const;
    std::vector<Rational> exact_ratios() const;
    std::vector<double> ratios() const;
    double max_ratio() const;

    /// Builds the model: solves the dimension equation, checks hull
    /// invariance, and certifies the first-level separation on a sample deep
    /// enough that mesh < h/10.
    static IfsModel build(std::vector<Similitude> maps, std::vector<double> hull_lo, std::vector<double> hull_hi,
                          const NormSpec& norm);
};

struct IntervalUnion {
    // sorted, pairwise disjoint closed intervals; degenerate [a,a] allowed
    std::vector<std::pair<double, double>> intervals;

    double total_length() const;
    double min_gap() const;
    double lo() const { return intervals.front().first; }
    double hi() const { return intervals.back().second; }
    /// largest set point <= x, assuming x >= lo()
    double floor_point(double x) const;
    /// smallest set point >= x, or nullopt past the end
    std::optional<double> ceil_point(double x) const;
    bool contains(double x, double tol = 0.0) const;

    static IntervalUnion make(std::vector<std::pair<double, double>> iv);
};

/// d-cube of side `side` embedded in the first d coordinates of R^p.
struct BoxModel {
    int d = 1;
    double side = 1.0;
    int ambient_dim = 1;
    Point origin;  // size ambient_dim; trailing coordinates fixed
};

struct LipschitzCurve {
    std::function<Point(double)> gamma;
    double t0 = 0.0, t1 = 1.0;
    double lipschitz = 1.0;
    int ambient_dim = 2;
    std::optional<double> length;

    static LipschitzCurve segment(Point from, Point to);
};

struct SetModel;

struct SeparatedUnion {
    std::vector<std::shared_ptr<const SetModel>> parts;
    double min_gap = 0.0;
};

/// Analytic description of a compact set plus the ambient norm it is studied
/// under. `dim_d` and `known_measure` feed normalizations downstream.
struct SetModel {
    std::variant<IntervalUnion, BoxModel, LipschitzCurve, IfsModel, SeparatedUnion> shape;
    NormSpec norm;
    std::string id;
    double dim_d = 1.0;
    std::optional<double> known_measure;

    int ambient_dim() const { return norm.ambient_dim; }
    double diameter_bound() const;

    static SetModel interval_union(std::vector<std::pair<double, double>> iv, NormSpec norm = NormSpec::euclid(1));
    static SetModel box(int d, double side, NormSpec norm, Point origin = {});
    static SetModel curve(LipschitzCurve c, NormSpec norm);
    static SetModel ifs(IfsModel m, NormSpec norm);
    static SetModel separated_union(std::vector<SetModel> parts, NormSpec norm);
};

inline constexpr std::size_t kDefaultSampleBudget = 10'000'000;

/// delta-dense sample of the model. Refuses (BudgetError) past the point
/// budget instead of silently thinning.
SampledSet sample(const SetModel& model, double mesh, std::size_t budget = kDefaultSampleBudget);

/// Depth-k word images of the hull corners. mesh <= (max r)^k * corner radius.
SampledSet ifs_points(const IfsModel& ifs, int depth, const NormSpec& norm, std::size_t budget = kDefaultSampleBudget);

/// Unique d in [0, +inf) with sum r_m^d = 1, residual <= 1e-12, by bisection.
/// M == 1 degenerates to d = 0.
double hausdorff_dimension(const std::vector<double>& ratios);
double hausdorff_dimension(const std::vector<Rational>& ratios);

/// Grid-count estimate of H_p(B_r(Y)) at resolution <= r/20 over the padded
/// bounding box (2% relative error target). dim 1 and 2 only.
double neighborhood_volume(const SampledSet& Y, double r, const NormSpec& norm, std::size_t budget = 400'000'000);

struct MinkowskiReport {
    std::vector<double> radii;
    std::vector<double> ratios;  // H_p(B_r)/ (v_{p-d} r^{p-d}), or H_p(B_r) * r^{d-p} unnormalized
    bool normalized = true;      // false for fractional codimension
    double lower_window = 0.0;   // min over trailing half of schedule
    double upper_window = 0.0;   // max over trailing half
};

/// Minkowski content windows along a decreasing radius schedule. For
/// non-integer codimension the unnormalized ratio H_p(B_r(A)) r^{d-p} is
/// reported and `normalized` is false.
MinkowskiReport minkowski_estimate(const SetModel& model, double d, const std::vector<double>& radii,
                                   std::size_t budget = 400'000'000);

struct DRegularityReport {
    double c_fit = 1.0;         // smallest c with all probes inside [1/c, c]
    double worst_ratio = 1.0;   // max of max(q, 1/q) over probes
    int probes = 0;
};

/// Empirical d-regularity audit on an IFS sample: counts of sample points in
/// B_r(x) scaled by (r/diam)^{-d} must stay in a fixed [1/c, c] window.
DRegularityReport dregularity_audit(const IfsModel& ifs, const NormSpec& norm, int depth, int probe_points = 64);

/// B_r(A) as a model; implemented for IntervalUnion (and SeparatedUnion of
/// them). Throws std::invalid_argument otherwise.
SetModel inflate(const SetModel& model, double r);

}  // namespace covlab
