#include "covlab/set_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "covlab/errors.hpp"
#include "covlab/grid_index.hpp"

namespace covlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kOrthTol = 1e-12;

void check_orthogonal(const std::vector<double>& rot, int dim) {
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            double dot = 0;
            for (int k = 0; k < dim; ++k) dot += rot[k * dim + i] * rot[k * dim + j];
            double want = i == j ? 1.0 : 0.0;
            if (std::abs(dot - want) > kOrthTol) throw std::invalid_argument("similitude rotation not orthogonal");
        }
}

std::vector<Point> box_corners(const std::vector<double>& lo, const std::vector<double>& hi) {
    int dim = static_cast<int>(lo.size());
    std::vector<Point> out;
    out.reserve(std::size_t{1} << dim);
    for (std::size_t mask = 0; mask < (std::size_t{1} << dim); ++mask) {
        Point p(dim);
        for (int k = 0; k < dim; ++k) p[k] = (mask >> k & 1) ? hi[k] : lo[k];
        out.push_back(std::move(p));
    }
    return out;
}

// max over the hull of the distance to the corner set (attained at the center)
double corner_radius(const std::vector<double>& lo, const std::vector<double>& hi, const NormSpec& norm) {
    Point half(lo.size());
    for (std::size_t k = 0; k < lo.size(); ++k) half[k] = (hi[k] - lo[k]) / 2.0;
    return norm.length(half);
}

std::vector<double> raw_ifs_sample(const std::vector<Similitude>& maps, const std::vector<Point>& seeds, int depth,
                                   std::size_t budget) {
    int dim = static_cast<int>(seeds.front().size());
    double words = 1.0;
    for (int k = 0; k < depth; ++k) {
        words *= static_cast<double>(maps.size());
        if (words * seeds.size() > static_cast<double>(budget))
            throw BudgetError("ifs sampling at depth " + std::to_string(depth) + " needs " +
                              std::to_string(words * seeds.size()) + " points, budget is " + std::to_string(budget));
    }
    std::vector<double> cur;
    for (const auto& s : seeds) cur.insert(cur.end(), s.begin(), s.end());
    std::vector<double> nxt;
    for (int k = 0; k < depth; ++k) {
        nxt.clear();
        nxt.reserve(cur.size() * maps.size());
        for (const auto& m : maps) {
            std::size_t n = cur.size() / dim;
            for (std::size_t i = 0; i < n; ++i) {
                Point p = m.apply({cur.data() + i * dim, static_cast<std::size_t>(dim)});
                nxt.insert(nxt.end(), p.begin(), p.end());
            }
        }
        cur.swap(nxt);
    }
    return cur;
}

void dedupe_flat(std::vector<double>& xs, int dim, double tol) {
    std::size_t n = xs.size() / dim;
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        for (int k = 0; k < dim; ++k) {
            if (xs[a * dim + k] < xs[b * dim + k]) return true;
            if (xs[a * dim + k] > xs[b * dim + k]) return false;
        }
        return false;
    });
    std::vector<double> out;
    out.reserve(xs.size());
    for (std::size_t t = 0; t < n; ++t) {
        if (!out.empty()) {
            bool same = true;
            const double* prev = out.data() + out.size() - dim;
            for (int k = 0; k < dim; ++k)
                if (std::abs(prev[k] - xs[idx[t] * dim + k]) > tol) {
                    same = false;
                    break;
                }
            if (same) continue;
        }
        for (int k = 0; k < dim; ++k) out.push_back(xs[idx[t] * dim + k]);
    }
    xs.swap(out);
}

}  // namespace

Point Similitude::apply(std::span<const double> x) const {
    int d = dim();
    Point out(d);
    for (int i = 0; i < d; ++i) {
        double acc = 0;
        for (int j = 0; j < d; ++j) acc += rot[i * d + j] * x[j];
        out[i] = ratio * acc + shift[i];
    }
    return out;
}

Similitude Similitude::make_1d(Rational r, Rational shift, bool reflect) {
    Similitude s;
    s.ratio_exact = r;
    s.ratio = r.value();
    s.rot = {reflect ? -1.0 : 1.0};
    s.shift = {shift.value()};
    if (!r.in_unit_interval()) throw std::invalid_argument("contraction ratio must lie in (0,1)");
    return s;
}

Similitude Similitude::make_2d(Rational r, double angle, bool reflect, Point shift) {
    Similitude s;
    s.ratio_exact = r;
    s.ratio = r.value();
    double c = std::cos(angle), sn = std::sin(angle);
    double fx = reflect ? -1.0 : 1.0;
    s.rot = {c * fx, -sn, sn * fx, c};
    s.shift = std::move(shift);
    if (!r.in_unit_interval()) throw std::invalid_argument("contraction ratio must lie in (0,1)");
    check_orthogonal(s.rot, 2);
    return s;
}

Similitude Similitude::make(Rational r, std::vector<double> rot, Point shift) {
    Similitude s;
    s.ratio_exact = r;
    s.ratio = r.value();
    s.rot = std::move(rot);
    s.shift = std::move(shift);
    if (!r.in_unit_interval()) throw std::invalid_argument("contraction ratio must lie in (0,1)");
    check_orthogonal(s.rot, s.dim());
    return s;
}

double IfsModel::hull_diameter(const NormSpec& norm) const {
    Point extent(hull_lo.size());
    for (std::size_t k = 0; k < hull_lo.size(); ++k) extent[k] = hull_hi[k] - hull_lo[k];
    return norm.length(extent);
}

std::vector<Rational> IfsModel::exact_ratios() const {
    std::vector<Rational> out;
    for (const auto& m : maps) out.push_back(m.ratio_exact);
    return out;
}

std::vector<double> IfsModel::ratios() const {
    std::vector<double> out;
    for (const auto& m : maps) out.push_back(m.ratio);
    return out;
}

double IfsModel::max_ratio() const {
    double r = 0;
    for (const auto& m : maps) r = std::max(r, m.ratio);
    return r;
}

IfsModel IfsModel::build(std::vector<Similitude> maps, std::vector<double> hull_lo, std::vector<double> hull_hi,
                         const NormSpec& norm) {
    if (maps.size() < 2) throw std::invalid_argument("IfsModel needs at least two similitudes");
    int dim = maps.front().dim();
    if (static_cast<int>(hull_lo.size()) != dim || static_cast<int>(hull_hi.size()) != dim)
        throw std::invalid_argument("IfsModel hull dimension mismatch");
    IfsModel model;
    model.maps = std::move(maps);
    model.hull_lo = std::move(hull_lo);
    model.hull_hi = std::move(hull_hi);
    model.dim_d = hausdorff_dimension(model.ratios());

    const auto corners = box_corners(model.hull_lo, model.hull_hi);
    // hull invariance: corner images must stay inside the (convex) hull
    for (const auto& m : model.maps)
        for (const auto& c : corners) {
            Point img = m.apply(c);
            for (int k = 0; k < dim; ++k)
                if (img[k] < model.hull_lo[k] - 1e-12 || img[k] > model.hull_hi[k] + 1e-12)
                    throw std::invalid_argument("IFS hull is not invariant under the maps");
        }
    model.seeds_on_attractor = true;
    for (const auto& c : corners) {
        bool fixed = false;
        for (const auto& m : model.maps) {
            Point img = m.apply(c);
            double err = 0;
            for (int k = 0; k < dim; ++k) err = std::max(err, std::abs(img[k] - c[k]));
            if (err <= 1e-12) {
                fixed = true;
                break;
            }
        }
        if (!fixed) {
            model.seeds_on_attractor = false;
            break;
        }
    }

    // Certify first-level separation on progressively deeper samples until
    // mesh < h/10.
    double crad = corner_radius(model.hull_lo, model.hull_hi, norm);
    double rmax = model.max_ratio();
    for (int depth = 2; depth <= 24; ++depth) {
        double mesh = std::pow(rmax, depth) * crad;
        std::vector<double> base = raw_ifs_sample(model.maps, corners, depth, 2'000'000);
        std::size_t n = base.size() / dim;
        double gap = kInf;
        // children are the first-level images of the depth sample
        std::vector<std::vector<double>> kids(model.maps.size());
        for (std::size_t m = 0; m < model.maps.size(); ++m) {
            kids[m].reserve(base.size());
            for (std::size_t i = 0; i < n; ++i) {
                Point p = model.maps[m].apply({base.data() + i * dim, static_cast<std::size_t>(dim)});
                kids[m].insert(kids[m].end(), p.begin(), p.end());
            }
        }
        for (std::size_t a = 0; a < kids.size() && gap > 0; ++a) {
            GridIndex gi(kids[a], dim, std::max(1e-9, crad / 64.0));
            std::size_t nb = kids[(a + 1) % kids.size()].size();
            for (std::size_t b = a + 1; b < kids.size(); ++b) {
                nb = kids[b].size() / dim;
                for (std::size_t i = 0; i < nb; ++i) {
                    double d;
                    gi.nearest(kids[b].data() + i * dim, norm, &d);
                    if (d < gap) gap = d;
                }
            }
        }
        if (gap <= 0) throw std::invalid_argument("IFS first-level images are not separated");
        double mesh1 = rmax * mesh;  // children sampled one level deeper
        double h = gap / 2.0;
        if (mesh1 < h / 10.0 || depth == 24) {
            model.separation_h = h;
            model.separation_h_certified = (gap - 2.0 * mesh1) / 2.0;
            model.certification_mesh = mesh1;
            if (model.separation_h_certified <= 0) throw std::invalid_argument("IFS separation could not be certified");
            return model;
        }
    }
    throw std::invalid_argument("IFS separation certification failed");
}

double IntervalUnion::total_length() const {
    double s = 0;
    for (auto [a, b] : intervals) s += b - a;
    return s;
}

double IntervalUnion::min_gap() const {
    double g = kInf;
    for (std::size_t i = 1; i < intervals.size(); ++i) g = std::min(g, intervals[i].first - intervals[i - 1].second);
    return g;
}

double IntervalUnion::floor_point(double x) const {
    // last interval with start <= x
    auto it = std::upper_bound(intervals.begin(), intervals.end(), x,
                               [](double v, const std::pair<double, double>& iv) { return v < iv.first; });
    if (it == intervals.begin()) throw std::domain_error("floor_point below the set");
    --it;
    return std::min(x, it->second);
}

std::optional<double> IntervalUnion::ceil_point(double x) const {
    for (const auto& [a, b] : intervals) {
        if (b >= x) return std::max(a, x);
    }
    return std::nullopt;
}

bool IntervalUnion::contains(double x, double tol) const {
    for (auto [a, b] : intervals)
        if (x >= a - tol && x <= b + tol) return true;
    return false;
}

IntervalUnion IntervalUnion::make(std::vector<std::pair<double, double>> iv) {
    if (iv.empty()) throw std::invalid_argument("IntervalUnion: empty");
    for (auto& [a, b] : iv) {
        if (!(a <= b)) throw std::invalid_argument("IntervalUnion: reversed interval");
    }
    std::sort(iv.begin(), iv.end());
    std::vector<std::pair<double, double>> merged;
    for (auto& [a, b] : iv) {
        if (!merged.empty() && a < merged.back().second) throw std::invalid_argument("IntervalUnion: overlapping intervals");
        if (!merged.empty() && a == merged.back().second) {
            merged.back().second = b;
        } else {
            merged.push_back({a, b});
        }
    }
    IntervalUnion u;
    u.intervals = std::move(merged);
    return u;
}

LipschitzCurve LipschitzCurve::segment(Point from, Point to) {
    LipschitzCurve c;
    c.ambient_dim = static_cast<int>(from.size());
    double len2 = 0;
    for (std::size_t k = 0; k < from.size(); ++k) {
        double d = to[k] - from[k];
        len2 += d * d;
    }
    double len = std::sqrt(len2);
    c.lipschitz = len;
    c.length = len;
    c.t0 = 0;
    c.t1 = 1;
    c.gamma = [from = std::move(from), to = std::move(to)](double t) {
        Point p(from.size());
        for (std::size_t k = 0; k < from.size(); ++k) p[k] = from[k] + t * (to[k] - from[k]);
        return p;
    };
    return c;
}

double SetModel::diameter_bound() const {
    if (const auto* iu = std::get_if<IntervalUnion>(&shape)) return iu->hi() - iu->lo();
    if (const auto* b = std::get_if<BoxModel>(&shape)) {
        Point e(b->d, b->side);
        e.resize(norm.ambient_dim, 0.0);
        return norm.length(e);
    }
    if (const auto* c = std::get_if<LipschitzCurve>(&shape)) return c->lipschitz * (c->t1 - c->t0);
    if (const auto* f = std::get_if<IfsModel>(&shape)) return f->hull_diameter(norm);
    if (const auto* u = std::get_if<SeparatedUnion>(&shape)) {
        // crude: sum of parts plus gaps is an upper bound on the diameter
        double s = 0;
        for (const auto& p : u->parts) s += p->diameter_bound() + u->min_gap;
        return s * 2 + 1;
    }
    return 1.0;
}

SetModel SetModel::interval_union(std::vector<std::pair<double, double>> iv, NormSpec norm) {
    SetModel m;
    m.shape = IntervalUnion::make(std::move(iv));
    norm.ambient_dim = 1;
    m.norm = norm;
    m.dim_d = 1.0;
    m.known_measure = std::get<IntervalUnion>(m.shape).total_length();
    m.id = "interval_union";
    return m;
}

SetModel SetModel::box(int d, double side, NormSpec norm, Point origin) {
    if (d < 1 || d > norm.ambient_dim) throw std::invalid_argument("box: need 1 <= d <= ambient_dim");
    SetModel m;
    BoxModel b;
    b.d = d;
    b.side = side;
    b.ambient_dim = norm.ambient_dim;
    b.origin = origin.empty() ? Point(norm.ambient_dim, 0.0) : std::move(origin);
    m.shape = std::move(b);
    m.norm = norm;
    m.dim_d = d;
    m.known_measure = std::pow(side, d);
    m.id = "box" + std::to_string(d) + "d";
    return m;
}

SetModel SetModel::curve(LipschitzCurve c, NormSpec norm) {
    SetModel m;
    m.dim_d = 1.0;
    m.known_measure = c.length;
    norm.ambient_dim = c.ambient_dim;
    m.norm = norm;
    m.shape = std::move(c);
    m.id = "curve";
    return m;
}

SetModel SetModel::ifs(IfsModel f, NormSpec norm) {
    SetModel m;
    m.dim_d = f.dim_d;
    norm.ambient_dim = f.ambient_dim();
    m.norm = norm;
    m.shape = std::move(f);
    m.id = "ifs";
    return m;
}

SetModel SetModel::separated_union(std::vector<SetModel> parts, NormSpec norm) {
    if (parts.size() < 2) throw std::invalid_argument("separated_union: need at least two parts");
    SeparatedUnion u;
    double dim_d = 0;
    double measure = 0;
    bool all_known = true;
    for (auto& p : parts) {
        dim_d = std::max(dim_d, p.dim_d);
        if (p.known_measure && p.dim_d == parts.front().dim_d) measure += *p.known_measure;
        else all_known = false;
        u.parts.push_back(std::make_shared<SetModel>(std::move(p)));
    }
    // certify positive gap on coarse samples
    double gap = kInf;
    std::vector<SampledSet> samples;
    for (const auto& p : u.parts) samples.push_back(sample(*p, std::max(1e-4, p->diameter_bound() / 512.0)));
    for (std::size_t a = 0; a < samples.size(); ++a) {
        GridIndex gi(samples[a].xs, samples[a].dim, std::max(1e-9, norm.length(Point(norm.ambient_dim, 1.0)) / 64.0));
        for (std::size_t b = a + 1; b < samples.size(); ++b) {
            for (std::size_t i = 0; i < samples[b].size(); ++i) {
                double d;
                gi.nearest(samples[b].point(i).data(), norm, &d);
                gap = std::min(gap, d - samples[a].mesh - samples[b].mesh);
            }
        }
    }
    if (!(gap > 0)) throw std::invalid_argument("separated_union: parts are not separated");
    u.min_gap = gap;
    SetModel m;
    m.shape = std::move(u);
    m.norm = norm;
    m.dim_d = dim_d;
    if (all_known) m.known_measure = measure;
    m.id = "separated_union";
    return m;
}

namespace {

std::vector<double> linspace(double a, double b, double step) {
    std::vector<double> out;
    if (b <= a) {
        out.push_back(a);
        return out;
    }
    int n = static_cast<int>(std::ceil((b - a) / step - 1e-12));
    n = std::max(n, 1);
    for (int i = 0; i <= n; ++i) out.push_back(a + (b - a) * i / n);
    return out;
}

SampledSet sample_box(const BoxModel& b, const NormSpec& norm, double mesh, std::size_t budget) {
    Point ones(b.d, 1.0);
    ones.resize(norm.ambient_dim, 0.0);
    double g = std::min(mesh, 2.0 * mesh / norm.length(ones));
    auto axis = linspace(0.0, b.side, g);
    double total = std::pow(static_cast<double>(axis.size()), b.d);
    if (total > static_cast<double>(budget))
        throw BudgetError("box sample needs " + std::to_string(static_cast<long long>(total)) + " points, budget " +
                          std::to_string(budget));
    SampledSet s;
    s.dim = b.ambient_dim;
    s.mesh = mesh;
    std::vector<std::size_t> idx(b.d, 0);
    Point p = b.origin;
    for (;;) {
        for (int k = 0; k < b.d; ++k) p[k] = b.origin[k] + axis[idx[k]];
        s.xs.insert(s.xs.end(), p.begin(), p.end());
        int k = 0;
        while (k < b.d && ++idx[k] == axis.size()) idx[k++] = 0;
        if (k == b.d) break;
    }
    return s;
}

SampledSet sample_interval_union(const IntervalUnion& u, double mesh, std::size_t budget) {
    SampledSet s;
    s.dim = 1;
    s.mesh = mesh;
    double need = 0;
    for (auto [a, b] : u.intervals) need += (b - a) / mesh + 2;
    if (need > static_cast<double>(budget))
        throw BudgetError("interval sample needs about " + std::to_string(static_cast<long long>(need)) +
                          " points, budget " + std::to_string(budget));
    for (auto [a, b] : u.intervals) {
        auto pts = linspace(a, b, mesh);
        s.xs.insert(s.xs.end(), pts.begin(), pts.end());
    }
    return s;
}

SampledSet sample_curve(const LipschitzCurve& c, double mesh, std::size_t budget) {
    double step = mesh / std::max(c.lipschitz, 1e-30);
    double count = (c.t1 - c.t0) / step + 2;
    if (count > static_cast<double>(budget))
        throw BudgetError("curve sample needs about " + std::to_string(static_cast<long long>(count)) +
                          " points, budget " + std::to_string(budget));
    auto ts = linspace(c.t0, c.t1, step);
    SampledSet s;
    s.dim = c.ambient_dim;
    s.mesh = mesh;
    for (double t : ts) {
        Point p = c.gamma(t);
        s.xs.insert(s.xs.end(), p.begin(), p.end());
    }
    return s;
}

}  // namespace

SampledSet ifs_points(const IfsModel& ifs, int depth, const NormSpec& norm, std::size_t budget) {
    if (depth < 0) throw std::invalid_argument("ifs_points: depth must be >= 0");
    auto corners = box_corners(ifs.hull_lo, ifs.hull_hi);
    std::vector<double> xs = raw_ifs_sample(ifs.maps, corners, depth, budget);
    int dim = ifs.ambient_dim();
    dedupe_flat(xs, dim, 1e-15 * std::max(1.0, ifs.hull_diameter(norm)));
    SampledSet s;
    s.dim = dim;
    s.xs = std::move(xs);
    s.mesh = std::pow(ifs.max_ratio(), depth) * corner_radius(ifs.hull_lo, ifs.hull_hi, norm);
    s.dim_d = ifs.dim_d;
    s.points_on_set = ifs.seeds_on_attractor;
    s.model_id = "ifs";
    return s;
}

SampledSet sample(const SetModel& model, double mesh, std::size_t budget) {
    if (!(mesh > 0)) throw std::invalid_argument("sample: mesh must be positive");
    SampledSet s;
    if (const auto* iu = std::get_if<IntervalUnion>(&model.shape)) {
        s = sample_interval_union(*iu, mesh, budget);
    } else if (const auto* b = std::get_if<BoxModel>(&model.shape)) {
        s = sample_box(*b, model.norm, mesh, budget);
    } else if (const auto* c = std::get_if<LipschitzCurve>(&model.shape)) {
        s = sample_curve(*c, mesh, budget);
    } else if (const auto* f = std::get_if<IfsModel>(&model.shape)) {
        double crad = corner_radius(f->hull_lo, f->hull_hi, model.norm);
        double rmax = f->max_ratio();
        int depth = 0;
        double m = crad;
        while (m > mesh && depth < 64) {
            m *= rmax;
            ++depth;
        }
        s = ifs_points(*f, depth, model.norm, budget);
        s.mesh = std::min(mesh, s.mesh);
    } else if (const auto* u = std::get_if<SeparatedUnion>(&model.shape)) {
        s.dim = model.ambient_dim();
        s.mesh = mesh;
        bool on_set = true;
        for (const auto& p : u->parts) {
            SampledSet ps = sample(*p, mesh, budget);
            if (ps.dim != s.dim) throw std::invalid_argument("separated_union: mixed ambient dimensions");
            s.xs.insert(s.xs.end(), ps.xs.begin(), ps.xs.end());
            s.mesh = std::max(s.mesh, ps.mesh);
            on_set = on_set && ps.points_on_set;
            if (s.xs.size() / s.dim > budget) throw BudgetError("separated_union sample exceeds budget");
        }
        s.points_on_set = on_set;
    }
    s.model_id = model.id;
    s.dim_d = model.dim_d;
    s.known_measure = model.known_measure;
    return s;
}

double hausdorff_dimension(const std::vector<double>& ratios) {
    if (ratios.empty()) throw std::domain_error("hausdorff_dimension: no ratios");
    double rmax = 0;
    for (double r : ratios) {
        if (!(r > 0 && r < 1)) throw std::domain_error("hausdorff_dimension: ratios must lie in (0,1)");
        rmax = std::max(rmax, r);
    }
    if (ratios.size() == 1) return 0.0;  // degenerate M=1 case
    auto f = [&](double d) {
        double s = 0;
        for (double r : ratios) s += std::pow(r, d);
        return s;
    };
    double lo = 0.0;
    double hi = std::log(static_cast<double>(ratios.size())) / std::log(1.0 / rmax) + 1.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (f(mid) > 1.0 ? lo : hi) = mid;
    }
    double d = 0.5 * (lo + hi);
    if (std::abs(f(d) - 1.0) > 1e-12) throw std::runtime_error("hausdorff_dimension: bisection residual too large");
    return d;
}

double hausdorff_dimension(const std::vector<Rational>& ratios) {
    std::vector<double> r;
    for (const auto& q : ratios) r.push_back(q.value());
    return hausdorff_dimension(r);
}

double neighborhood_volume(const SampledSet& Y, double r, const NormSpec& norm, std::size_t budget) {
    if (!(r > 0)) throw std::invalid_argument("neighborhood_volume: r must be positive");
    int dim = Y.dim;
    if (dim > 2) throw std::invalid_argument("neighborhood_volume: grid counting supports dim <= 2");
    double g = r / 20.0;
    double lo[2] = {kInf, kInf}, hi[2] = {-kInf, -kInf};
    for (std::size_t i = 0; i < Y.size(); ++i)
        for (int k = 0; k < dim; ++k) {
            lo[k] = std::min(lo[k], Y.xs[i * dim + k]);
            hi[k] = std::max(hi[k], Y.xs[i * dim + k]);
        }
    // pad by r plus one cell so boundary cells are counted by their centers
    double cells = 1;
    long nk[2] = {1, 1};
    for (int k = 0; k < dim; ++k) {
        nk[k] = static_cast<long>(std::ceil((hi[k] - lo[k] + 2 * (r + g)) / g)) + 1;
        cells *= static_cast<double>(nk[k]);
    }
    if (cells > static_cast<double>(budget))
        throw BudgetError("neighborhood_volume grid needs " + std::to_string(static_cast<long long>(cells)) +
                          " cells, budget " + std::to_string(budget));
    GridIndex gi(Y.xs, dim, r);
    long count = 0;
    double y[2];
    for (long i = 0; i < nk[0]; ++i) {
        y[0] = lo[0] - r - g + (i + 0.5) * g;
        for (long j = 0; j < nk[1]; ++j) {
            if (dim == 2) y[1] = lo[1] - r - g + (j + 0.5) * g;
            bool inside = false;
            gi.for_each_in_box(y, r, [&](std::uint32_t t) {
                if (inside) return;
                if (norm.distance(y, Y.xs.data() + static_cast<std::size_t>(t) * dim, dim) <= r) inside = true;
            });
            if (inside) ++count;
        }
    }
    return static_cast<double>(count) * std::pow(g, dim);
}

MinkowskiReport minkowski_estimate(const SetModel& model, double d, const std::vector<double>& radii,
                                   std::size_t budget) {
    if (radii.size() < 5) throw std::invalid_argument("minkowski_estimate: need at least 5 radii");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] < radii[i - 1])) throw std::invalid_argument("minkowski_estimate: radii must strictly decrease");
    int p = model.ambient_dim();
    double codim = p - d;
    if (codim < -1e-9) throw std::domain_error("minkowski_estimate: d must not exceed ambient dimension");
    bool integer_codim = std::abs(codim - std::rint(codim)) <= 1e-9;
    MinkowskiReport rep;
    rep.normalized = integer_codim;
    double vnorm = 1.0;
    if (integer_codim && std::rint(codim) > 0) vnorm = model.norm.unit_ball_volume(static_cast<int>(std::rint(codim)));
    bool full_dim = integer_codim && std::rint(codim) == 0;
    for (double r : radii) {
        double mesh = full_dim ? r / 5.0 : r / 50.0;
        SampledSet s = sample(model, mesh);
        double vol = neighborhood_volume(s, r, model.norm, budget);
        double ratio = integer_codim ? vol / (vnorm * std::pow(r, codim)) : vol * std::pow(r, d - p);
        rep.radii.push_back(r);
        rep.ratios.push_back(ratio);
    }
    std::size_t start = rep.ratios.size() / 2;
    rep.lower_window = kInf;
    rep.upper_window = -kInf;
    for (std::size_t i = start; i < rep.ratios.size(); ++i) {
        rep.lower_window = std::min(rep.lower_window, rep.ratios[i]);
        rep.upper_window = std::max(rep.upper_window, rep.ratios[i]);
    }
    return rep;
}

DRegularityReport dregularity_audit(const IfsModel& ifs, const NormSpec& norm, int depth, int probe_points) {
    SampledSet s = ifs_points(ifs, depth, norm);
    double diam = ifs.hull_diameter(norm);
    GridIndex gi(s.xs, s.dim, diam / 64.0);
    DRegularityReport rep;
    double total = static_cast<double>(s.size());
    std::size_t stride = std::max<std::size_t>(1, s.size() / probe_points);
    for (std::size_t i = 0; i < s.size(); i += stride) {
        for (double r = 3.0 * s.mesh; r <= diam; r *= 2.0) {
            long count = 0;
            const double* y = s.xs.data() + i * s.dim;
            gi.for_each_in_box(y, r, [&](std::uint32_t t) {
                if (norm.distance(y, s.xs.data() + static_cast<std::size_t>(t) * s.dim, s.dim) <= r) ++count;
            });
            double q = (count / total) / std::pow(r / diam, ifs.dim_d);
            rep.worst_ratio = std::max(rep.worst_ratio, std::max(q, 1.0 / q));
            ++rep.probes;
        }
    }
    rep.c_fit = rep.worst_ratio;
    return rep;
}

namespace {

const IntervalUnion* as_interval_union(const SetModel& m) { return std::get_if<IntervalUnion>(&m.shape); }

}  // namespace

SetModel inflate(const SetModel& model, double r) {
    if (!(r > 0)) throw std::invalid_argument("inflate: r must be positive");
    std::vector<std::pair<double, double>> iv;
    if (const auto* iu = as_interval_union(model)) {
        for (auto [a, b] : iu->intervals) iv.push_back({a - r, b + r});
    } else if (const auto* u = std::get_if<SeparatedUnion>(&model.shape)) {
        for (const auto& p : u->parts) {
            const auto* piu = as_interval_union(*p);
            if (!piu) throw std::invalid_argument("inflate: only interval-union models are supported");
            for (auto [a, b] : piu->intervals) iv.push_back({a - r, b + r});
        }
    } else {
        throw std::invalid_argument("inflate: only interval-union models are supported");
    }
    std::sort(iv.begin(), iv.end());
    std::vector<std::pair<double, double>> merged;
    for (auto [a, b] : iv) {
        if (!merged.empty() && a <= merged.back().second) merged.back().second = std::max(merged.back().second, b);
        else merged.push_back({a, b});
    }
    SetModel out = SetModel::interval_union(std::move(merged), model.norm);
    out.id = model.id + "+r";
    return out;
}

}  // namespace covlab
