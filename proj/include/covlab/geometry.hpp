#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace covlab {

using Point = std::vector<double>;

enum class NormKind { euclidean, l1, linf, pnorm };

/// Ambient norm family. `q` is only read for pnorm (and must be > 1 there);
/// euclidean/l1/linf are kept as dedicated kinds so the hot distance path
/// stays branch-cheap and exact.
struct NormSpec {
    NormKind kind = NormKind::euclidean;
    int ambient_dim = 1;
    double q = 2.0;

    double length(std::span<const double> v) const;
    double distance(std::span<const double> a, std::span<const double> b) const;
    double distance(const double* a, const double* b, int dim) const;

    /// Lebesgue volume of the d-dimensional unit ball of this norm restricted
    /// to a coordinate d-plane, normalized so the unit cube has volume 1.
    /// Integer d with 1 <= d <= ambient_dim only.
    double unit_ball_volume(int d) const;

    std::string str() const;

    static NormSpec euclid(int dim) { return {NormKind::euclidean, dim, 2.0}; }
    static NormSpec l1(int dim) { return {NormKind::l1, dim, 1.0}; }
    static NormSpec linf(int dim) { return {NormKind::linf, dim, 0.0}; }
    static NormSpec lp(int dim, double q);
};

/// Multiset of ambient points, stored flat (row-major, `dim` coordinates per
/// point). Duplicates are allowed and meaningful.
struct Configuration {
    int dim = 1;
    std::vector<double> xs;

    Configuration() = default;
    explicit Configuration(int dimension) : dim(dimension) {}

    std::size_t size() const { return dim == 0 ? 0 : xs.size() / dim; }
    std::span<const double> point(std::size_t i) const { return {xs.data() + i * dim, static_cast<std::size_t>(dim)}; }
    Point point_vec(std::size_t i) const;
    void push(std::span<const double> p);
    void push(double x);  // dim-1 convenience
    void set_point(std::size_t i, std::span<const double> p);

    static Configuration from_points(const std::vector<Point>& pts);
    static Configuration single(Point p);
};

/// Finite sample of a compact set: `mesh` is the guaranteed density (every
/// point of the true set lies within `mesh` of the sample), `dim_d` the
/// set's dimension used in N^{1/d}-style normalizations, and `known_measure`
/// the analytic H_d value when the model provides one.
struct SampledSet {
    int dim = 1;
    std::vector<double> xs;
    double mesh = 0.0;
    std::string model_id;
    double dim_d = 1.0;
    std::optional<double> known_measure;
    bool points_on_set = true;  // false when sample points may lie off the set by <= mesh

    std::size_t size() const { return dim == 0 ? 0 : xs.size() / dim; }
    std::span<const double> point(std::size_t i) const { return {xs.data() + i * dim, static_cast<std::size_t>(dim)}; }
    Point point_vec(std::size_t i) const;

    static SampledSet from_points(const std::vector<Point>& pts, double mesh, std::string model_id = {});
    static SampledSet from_sorted_1d(std::vector<double> xs, double mesh, std::string model_id = {});
};

/// min over the multiset of ||x - y||; throws std::domain_error on empty input.
double dist_to_configuration(std::span<const double> y, const Configuration& omega, const NormSpec& norm);

/// R(omega, Y) = max over y in Y of dist(y, omega). The true-set covering
/// radius satisfies R(omega, A) <= result + Y.mesh.
double covering_radius_on_sample(const Configuration& omega, const SampledSet& Y, const NormSpec& norm);

/// Riesz potential sum_{x in omega} ||y - x||^{-s}; +infinity on coincidence.
double riesz_potential(std::span<const double> y, const Configuration& omega, double s, const NormSpec& norm);

/// P_s(omega, Y) = min over y in Y of the Riesz potential.
double polarization_value(const Configuration& omega, const SampledSet& Y, double s, const NormSpec& norm);

/// d^{-s} with exact small-integer-s fast path; +infinity at d == 0.
double inv_pow(double d, double s);

}  // namespace covlab
