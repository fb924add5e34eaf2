#include "covlab/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace covlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

NormSpec NormSpec::lp(int dim, double q) {
    if (!(q > 1.0)) throw std::domain_error("pnorm exponent must satisfy q > 1");
    return {NormKind::pnorm, dim, q};
}

double NormSpec::length(std::span<const double> v) const {
    switch (kind) {
        case NormKind::euclidean: {
            double s = 0;
            for (double x : v) s += x * x;
            return std::sqrt(s);
        }
        case NormKind::l1: {
            double s = 0;
            for (double x : v) s += std::abs(x);
            return s;
        }
        case NormKind::linf: {
            double s = 0;
            for (double x : v) s = std::max(s, std::abs(x));
            return s;
        }
        case NormKind::pnorm: {
            double s = 0;
            for (double x : v) s += std::pow(std::abs(x), q);
            return std::pow(s, 1.0 / q);
        }
    }
    return 0;
}

double NormSpec::distance(const double* a, const double* b, int dim) const {
    switch (kind) {
        case NormKind::euclidean: {
            double s = 0;
            for (int i = 0; i < dim; ++i) {
                double d = a[i] - b[i];
                s += d * d;
            }
            return std::sqrt(s);
        }
        case NormKind::l1: {
            double s = 0;
            for (int i = 0; i < dim; ++i) s += std::abs(a[i] - b[i]);
            return s;
        }
        case NormKind::linf: {
            double s = 0;
            for (int i = 0; i < dim; ++i) s = std::max(s, std::abs(a[i] - b[i]));
            return s;
        }
        case NormKind::pnorm: {
            double s = 0;
            for (int i = 0; i < dim; ++i) s += std::pow(std::abs(a[i] - b[i]), q);
            return std::pow(s, 1.0 / q);
        }
    }
    return 0;
}

double NormSpec::distance(std::span<const double> a, std::span<const double> b) const {
    if (a.size() != b.size()) throw std::invalid_argument("distance: dimension mismatch");
    return distance(a.data(), b.data(), static_cast<int>(a.size()));
}

double NormSpec::unit_ball_volume(int d) const {
    if (d < 1 || d > ambient_dim) throw std::domain_error("unit_ball_volume: need integer 1 <= d <= ambient_dim");
    switch (kind) {
        case NormKind::euclidean:
            return std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
        case NormKind::l1:
            // cross-polytope
            return std::pow(2.0, d) / std::tgamma(static_cast<double>(d) + 1.0);
        case NormKind::linf:
            return std::pow(2.0, d);
        case NormKind::pnorm:
            // volume of {sum |x_i|^q <= 1}
            return std::pow(2.0 * std::tgamma(1.0 / q + 1.0), d) / std::tgamma(static_cast<double>(d) / q + 1.0);
    }
    return 0;
}

std::string NormSpec::str() const {
    switch (kind) {
        case NormKind::euclidean: return "euclidean";
        case NormKind::l1: return "l1";
        case NormKind::linf: return "linf";
        case NormKind::pnorm: return "pnorm(" + std::to_string(q) + ")";
    }
    return "?";
}

Point Configuration::point_vec(std::size_t i) const {
    auto p = point(i);
    return Point(p.begin(), p.end());
}

void Configuration::push(std::span<const double> p) {
    if (static_cast<int>(p.size()) != dim) throw std::invalid_argument("Configuration::push: dimension mismatch");
    xs.insert(xs.end(), p.begin(), p.end());
}

void Configuration::push(double x) {
    if (dim != 1) throw std::invalid_argument("Configuration::push(double) requires dim 1");
    xs.push_back(x);
}

void Configuration::set_point(std::size_t i, std::span<const double> p) {
    for (int k = 0; k < dim; ++k) xs[i * dim + k] = p[k];
}

Configuration Configuration::from_points(const std::vector<Point>& pts) {
    Configuration c;
    if (pts.empty()) return c;
    c.dim = static_cast<int>(pts.front().size());
    for (const auto& p : pts) c.push(p);
    return c;
}

Configuration Configuration::single(Point p) {
    Configuration c;
    c.dim = static_cast<int>(p.size());
    c.xs = std::move(p);
    return c;
}

Point SampledSet::point_vec(std::size_t i) const {
    auto p = point(i);
    return Point(p.begin(), p.end());
}

SampledSet SampledSet::from_points(const std::vector<Point>& pts, double mesh, std::string model_id) {
    if (pts.empty()) throw std::invalid_argument("SampledSet: empty sample");
    SampledSet s;
    s.dim = static_cast<int>(pts.front().size());
    for (const auto& p : pts) {
        if (static_cast<int>(p.size()) != s.dim) throw std::invalid_argument("SampledSet: ragged points");
        s.xs.insert(s.xs.end(), p.begin(), p.end());
    }
    s.mesh = mesh;
    s.model_id = std::move(model_id);
    return s;
}

SampledSet SampledSet::from_sorted_1d(std::vector<double> xs, double mesh, std::string model_id) {
    if (xs.empty()) throw std::invalid_argument("SampledSet: empty sample");
    SampledSet s;
    s.dim = 1;
    s.xs = std::move(xs);
    s.mesh = mesh;
    s.model_id = std::move(model_id);
    return s;
}

double inv_pow(double d, double s) {
    if (d == 0.0) return kInf;
    if (s == 2.0) return 1.0 / (d * d);
    if (s == 3.0) return 1.0 / (d * d * d);
    if (s == 4.0) {
        double d2 = d * d;
        return 1.0 / (d2 * d2);
    }
    if (s == 6.0) {
        double d2 = d * d;
        return 1.0 / (d2 * d2 * d2);
    }
    double r = std::rint(s);
    if (r == s && r > 0 && r <= 64) {
        double acc = 1.0;
        double base = 1.0 / d;
        int e = static_cast<int>(r);
        while (e) {
            if (e & 1) acc *= base;
            base *= base;
            e >>= 1;
        }
        return acc;
    }
    return std::pow(d, -s);
}

double dist_to_configuration(std::span<const double> y, const Configuration& omega, const NormSpec& norm) {
    if (omega.size() == 0) throw std::domain_error("dist_to_configuration: empty configuration");
    double best = kInf;
    const std::size_t n = omega.size();
    for (std::size_t i = 0; i < n; ++i) {
        double d = norm.distance(y.data(), omega.xs.data() + i * omega.dim, omega.dim);
        if (d < best) best = d;
    }
    return best;
}

double covering_radius_on_sample(const Configuration& omega, const SampledSet& Y, const NormSpec& norm) {
    if (omega.size() == 0 || Y.size() == 0) throw std::domain_error("covering_radius_on_sample: empty input");
    double worst = 0.0;
    const std::size_t m = Y.size();
    for (std::size_t j = 0; j < m; ++j) {
        double d = dist_to_configuration(Y.point(j), omega, norm);
        if (d > worst) worst = d;
    }
    return worst;
}

double riesz_potential(std::span<const double> y, const Configuration& omega, double s, const NormSpec& norm) {
    if (omega.size() == 0) throw std::domain_error("riesz_potential: empty configuration");
    double u = 0.0;
    const std::size_t n = omega.size();
    for (std::size_t i = 0; i < n; ++i) {
        double d = norm.distance(y.data(), omega.xs.data() + i * omega.dim, omega.dim);
        u += inv_pow(d, s);
        if (u == kInf) return kInf;
    }
    return u;
}

double polarization_value(const Configuration& omega, const SampledSet& Y, double s, const NormSpec& norm) {
    if (omega.size() == 0 || Y.size() == 0) throw std::domain_error("polarization_value: empty input");
    if (!(s > 0)) throw std::domain_error("polarization_value: s must be positive");
    double best = kInf;
    const std::size_t m = Y.size();
    for (std::size_t j = 0; j < m; ++j) {
        double u = riesz_potential(Y.point(j), omega, s, norm);
        if (u < best) best = u;
    }
    return best;
}

}  // namespace covlab
