#include "covlab/covering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>

#include "covlab/errors.hpp"
#include "covlab/grid_index.hpp"
#include "covlab/parallel.hpp"

namespace covlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// ---------- smallest enclosing ball centers per norm ----------

Point seb_center_bbox(const std::vector<double>& pts, int dim) {
    Point lo(dim, kInf), hi(dim, -kInf);
    std::size_t n = pts.size() / dim;
    for (std::size_t i = 0; i < n; ++i)
        for (int k = 0; k < dim; ++k) {
            lo[k] = std::min(lo[k], pts[i * dim + k]);
            hi[k] = std::max(hi[k], pts[i * dim + k]);
        }
    Point c(dim);
    for (int k = 0; k < dim; ++k) c[k] = 0.5 * (lo[k] + hi[k]);
    return c;
}

struct Circle {
    double x = 0, y = 0, r2 = -1;
    bool contains(double px, double py, double slack) const {
        double dx = px - x, dy = py - y;
        return dx * dx + dy * dy <= r2 + slack;
    }
};

Circle circle2(double ax, double ay, double bx, double by) {
    Circle c;
    c.x = 0.5 * (ax + bx);
    c.y = 0.5 * (ay + by);
    double dx = ax - c.x, dy = ay - c.y;
    c.r2 = dx * dx + dy * dy;
    return c;
}

Circle circle3(double ax, double ay, double bx, double by, double cx, double cy) {
    double d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
    if (std::abs(d) < 1e-300) return circle2(std::min({ax, bx, cx}), std::min({ay, by, cy}),
                                             std::max({ax, bx, cx}), std::max({ay, by, cy}));
    double a2 = ax * ax + ay * ay, b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
    Circle c;
    c.x = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
    c.y = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
    double dx = ax - c.x, dy = ay - c.y;
    c.r2 = dx * dx + dy * dy;
    return c;
}

// Welzl move-to-front, expected linear time; cells are small.
Point seb_center_l2_2d(const std::vector<double>& pts) {
    std::size_t n = pts.size() / 2;
    if (n == 1) return {pts[0], pts[1]};
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::uint64_t st = 0x853C49E6748FEA9BULL ^ (n * 0x9E3779B97F4A7C15ULL);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(idx[i], idx[splitmix64(st) % (i + 1)]);
    double span2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = pts[2 * idx[i]] - pts[2 * idx[0]], dy = pts[2 * idx[i] + 1] - pts[2 * idx[0] + 1];
        span2 = std::max(span2, dx * dx + dy * dy);
    }
    double slack = 1e-13 * std::max(span2, 1e-30);
    auto px = [&](std::size_t t) { return pts[2 * idx[t]]; };
    auto py = [&](std::size_t t) { return pts[2 * idx[t] + 1]; };
    Circle c = circle2(px(0), py(0), px(1), py(1));
    for (std::size_t i = 2; i < n; ++i) {
        if (c.contains(px(i), py(i), slack)) continue;
        c = circle2(px(0), py(0), px(i), py(i));
        for (std::size_t j = 1; j < i; ++j) {
            if (c.contains(px(j), py(j), slack)) continue;
            c = circle2(px(i), py(i), px(j), py(j));
            for (std::size_t k = 0; k < j; ++k) {
                if (c.contains(px(k), py(k), slack)) continue;
                c = circle3(px(i), py(i), px(j), py(j), px(k), py(k));
            }
        }
    }
    return {c.x, c.y};
}

Point seb_center_l1_2d(const std::vector<double>& pts) {
    // ||.||_1 in (x,y) equals ||.||_inf in (x+y, x-y)
    std::size_t n = pts.size() / 2;
    double ulo = kInf, uhi = -kInf, vlo = kInf, vhi = -kInf;
    for (std::size_t i = 0; i < n; ++i) {
        double u = pts[2 * i] + pts[2 * i + 1], v = pts[2 * i] - pts[2 * i + 1];
        ulo = std::min(ulo, u);
        uhi = std::max(uhi, u);
        vlo = std::min(vlo, v);
        vhi = std::max(vhi, v);
    }
    double uc = 0.5 * (ulo + uhi), vc = 0.5 * (vlo + vhi);
    return {0.5 * (uc + vc), 0.5 * (uc - vc)};
}

Point seb_center_iterative(const std::vector<double>& pts, int dim, const NormSpec& norm) {
    // Badoiu-Clarkson style: walk toward the farthest point with 1/(k+1) steps
    std::size_t n = pts.size() / dim;
    Point c(dim, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (int k = 0; k < dim; ++k) c[k] += pts[i * dim + k] / static_cast<double>(n);
    for (int it = 1; it <= 100; ++it) {
        double worst = -1;
        std::size_t wi = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double d = norm.distance(c.data(), pts.data() + i * dim, dim);
            if (d > worst) {
                worst = d;
                wi = i;
            }
        }
        double step = 1.0 / (it + 1.0);
        for (int k = 0; k < dim; ++k) c[k] += step * (pts[wi * dim + k] - c[k]);
    }
    return c;
}

Point seb_center(const std::vector<double>& pts, int dim, const NormSpec& norm) {
    if (dim == 1) return seb_center_bbox(pts, 1);
    if (norm.kind == NormKind::linf) return seb_center_bbox(pts, dim);
    if (dim == 2 && norm.kind == NormKind::euclidean) return seb_center_l2_2d(pts);
    if (dim == 2 && norm.kind == NormKind::l1) return seb_center_l1_2d(pts);
    return seb_center_iterative(pts, dim, norm);
}

double pick_cell_size(const SampledSet& Y, int n_centers) {
    double lo[2] = {kInf, kInf}, hi[2] = {-kInf, -kInf};
    int dim = Y.dim;
    for (std::size_t i = 0; i < Y.size(); ++i)
        for (int k = 0; k < std::min(dim, 2); ++k) {
            lo[k] = std::min(lo[k], Y.xs[i * dim + k]);
            hi[k] = std::max(hi[k], Y.xs[i * dim + k]);
        }
    double span = std::max(hi[0] - lo[0], dim >= 2 ? hi[1] - lo[1] : 0.0);
    if (span <= 0) span = 1.0;
    double per = dim >= 2 ? std::sqrt(static_cast<double>(std::max(n_centers, 1))) : static_cast<double>(n_centers);
    return std::max(span / std::max(per, 1.0), 1e-12);
}

// Centroidal (CVT) relaxation: mean-of-cell updates. Used as a warm-up for
// minimax refinement; centroids drive the partition toward low-circumradius
// cells where the pure SEB iteration would stall at its first fixed point.
Configuration centroid_refine(const Configuration& omega, const SampledSet& Y, int iters, const NormSpec& norm,
                              bool constrain_to_sample) {
    const std::size_t m = Y.size();
    const int dim = Y.dim;
    const std::size_t n = omega.size();
    Configuration cur = omega;
    GridIndex sample_index;
    if (constrain_to_sample) sample_index.build(Y.xs, dim, 1e-3);
    std::vector<std::uint32_t> owner(m);
    for (int it = 0; it < iters; ++it) {
        double span = 1.0;
        GridIndex centers(cur.xs, dim, std::max(span / std::sqrt(static_cast<double>(n) + 1.0), 1e-12));
        double worst = -1;
        std::size_t worst_point = 0;
        for (std::size_t i = 0; i < m; ++i) {
            double d;
            owner[i] = static_cast<std::uint32_t>(centers.nearest(Y.xs.data() + i * dim, norm, &d));
            if (d > worst) {
                worst = d;
                worst_point = i;
            }
        }
        std::vector<double> acc(n * dim, 0.0);
        std::vector<std::uint32_t> cnt(n, 0);
        for (std::size_t i = 0; i < m; ++i) {
            ++cnt[owner[i]];
            for (int k = 0; k < dim; ++k) acc[owner[i] * dim + k] += Y.xs[i * dim + k];
        }
        Configuration next(dim);
        for (std::size_t c = 0; c < n; ++c) {
            Point ctr(dim);
            if (cnt[c] == 0) {
                ctr = Y.point_vec(worst_point);
            } else {
                for (int k = 0; k < dim; ++k) ctr[k] = acc[c * dim + k] / cnt[c];
            }
            if (constrain_to_sample) {
                std::size_t snap = sample_index.nearest(ctr.data(), norm, nullptr);
                ctr = Y.point_vec(snap);
            }
            next.push(ctr);
        }
        cur = std::move(next);
    }
    return cur;
}

// grid-accelerated R(omega, Y) for the heuristic paths (dim <= 2)
double fast_covering_radius(const Configuration& omega, const SampledSet& Y, const NormSpec& norm) {
    if (Y.dim > 2) return covering_radius_on_sample(omega, Y, norm);
    GridIndex centers(omega.xs, omega.dim, pick_cell_size(Y, static_cast<int>(omega.size())));
    double worst = 0;
    for (std::size_t i = 0; i < Y.size(); ++i) {
        double d;
        centers.nearest(Y.xs.data() + i * Y.dim, norm, &d);
        if (d > worst) worst = d;
    }
    return worst;
}

// k-center swap: drop the center whose removal hurts least, reinsert it at
// the worst-covered sample point, keep on improvement. Attacks the binding
// defects that Lloyd-style smoothing cannot reach.
Configuration swap_improve(const Configuration& omega, const SampledSet& Y, const NormSpec& norm, int rounds,
                           int seb_iters_between, bool snap) {
    const std::size_t m = Y.size();
    const int dim = Y.dim;
    const std::size_t n = omega.size();
    if (n < 2) return omega;
    Configuration cur = omega;
    Configuration best = omega;
    double best_r = fast_covering_radius(best, Y, norm);
    std::vector<double> d1(m), d2(m);
    std::vector<std::size_t> owner(m);
    for (int round = 0; round < rounds; ++round) {
        GridIndex centers(cur.xs, dim, pick_cell_size(Y, static_cast<int>(n)));
        double r = 0;
        std::size_t worst_pt = 0;
        for (std::size_t i = 0; i < m; ++i) {
            centers.nearest2(Y.xs.data() + i * dim, norm, &d1[i], &d2[i], &owner[i]);
            if (d1[i] > r) {
                r = d1[i];
                worst_pt = i;
            }
        }
        if (r < best_r) {
            best_r = r;
            best = cur;
        }
        // removal penalty per center: max of second-nearest over its cell
        std::vector<double> penalty(n, 0.0);
        std::vector<double> rest(n, 0.0);  // max d1 outside the cell, via two-pass trick
        for (std::size_t i = 0; i < m; ++i) penalty[owner[i]] = std::max(penalty[owner[i]], d2[i]);
        double top1 = 0, top2 = 0;
        std::size_t top1_owner = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (d1[i] > top1) {
                top2 = top1;
                top1 = d1[i];
                top1_owner = owner[i];
            } else if (d1[i] > top2) {
                top2 = d1[i];
            }
        }
        (void)rest;
        std::size_t drop = n;
        double drop_cost = kInf;
        for (std::size_t c = 0; c < n; ++c) {
            double outside = (c == top1_owner) ? top2 : top1;
            double cost = std::max(penalty[c], outside);
            if (cost < drop_cost) {
                drop_cost = cost;
                drop = c;
            }
        }
        if (drop == n) break;
        Configuration trial = cur;
        trial.set_point(drop, Y.point(worst_pt));
        if (seb_iters_between > 0) trial = minimax_refine(trial, Y, seb_iters_between, norm, snap);
        double tr = fast_covering_radius(trial, Y, norm);
        // sideways moves are kept: the reinserted center often pays off only
        // after the next few swaps
        if (tr <= r * (1 + 1e-6)) {
            cur = std::move(trial);
        } else {
            break;
        }
    }
    double final_r = fast_covering_radius(cur, Y, norm);
    return final_r < best_r ? cur : best;
}

}  // namespace

Configuration farthest_point_net(const SampledSet& Y, int N, const NormSpec& norm, std::size_t seed_index) {
    if (N < 1) throw std::domain_error("farthest_point_net: N must be >= 1");
    if (Y.size() == 0) throw std::domain_error("farthest_point_net: empty sample");
    const std::size_t m = Y.size();
    Configuration out(Y.dim);
    if (static_cast<std::size_t>(N) >= m) {
        out.xs = Y.xs;
        return out;
    }
    std::vector<double> dist(m, kInf);
    std::size_t cur = seed_index % m;
    for (int t = 0; t < N; ++t) {
        out.push(Y.point(cur));
        const double* c = Y.xs.data() + cur * Y.dim;
        double worst = -1;
        std::size_t wi = 0;
        for (std::size_t i = 0; i < m; ++i) {
            double d = norm.distance(Y.xs.data() + i * Y.dim, c, Y.dim);
            if (d < dist[i]) dist[i] = d;
            if (dist[i] > worst) {
                worst = dist[i];
                wi = i;
            }
        }
        cur = wi;
    }
    return out;
}

Configuration minimax_refine(const Configuration& omega, const SampledSet& Y, int iters, const NormSpec& norm,
                             bool constrain_to_sample) {
    if (omega.size() == 0) throw std::domain_error("minimax_refine: empty configuration");
    const std::size_t m = Y.size();
    const int dim = Y.dim;
    const std::size_t n = omega.size();
    Configuration cur = omega;
    Configuration best = omega;
    double best_r = kInf;
    GridIndex sample_index;
    if (constrain_to_sample) sample_index.build(Y.xs, dim, pick_cell_size(Y, static_cast<int>(n)));
    std::vector<std::uint32_t> owner(m);
    double cell = pick_cell_size(Y, static_cast<int>(n));
    for (int it = 0;; ++it) {
        GridIndex centers(cur.xs, dim, cell);
        double r = 0;
        std::size_t worst_point = 0;
        for (std::size_t i = 0; i < m; ++i) {
            double d;
            owner[i] = static_cast<std::uint32_t>(centers.nearest(Y.xs.data() + i * dim, norm, &d));
            if (d > r) {
                r = d;
                worst_point = i;
            }
        }
        // ties keep the latest iterate: equal-radius updates settle centers
        // at their cells' enclosing-ball centers
        if (r <= best_r) {
            best_r = r;
            best = cur;
        }
        if (it >= iters) break;
        cell = std::max(2.0 * r, 1e-12);
        // gather cells by counting sort and recenter
        std::vector<std::uint32_t> counts(n + 1, 0);
        for (std::size_t i = 0; i < m; ++i) ++counts[owner[i] + 1];
        for (std::size_t c = 1; c <= n; ++c) counts[c] += counts[c - 1];
        std::vector<double> cell_pts(m * dim);
        {
            std::vector<std::uint32_t> cursor(counts.begin(), counts.end() - 1);
            for (std::size_t i = 0; i < m; ++i) {
                std::uint32_t at = cursor[owner[i]]++;
                for (int k = 0; k < dim; ++k) cell_pts[static_cast<std::size_t>(at) * dim + k] = Y.xs[i * dim + k];
            }
        }
        Configuration next(dim);
        std::vector<double> bucket;
        for (std::size_t c = 0; c < n; ++c) {
            Point ctr;
            if (counts[c + 1] == counts[c]) {
                ctr = Y.point_vec(worst_point);  // recycle idle centers at the worst gap
            } else {
                bucket.assign(cell_pts.begin() + static_cast<std::size_t>(counts[c]) * dim,
                              cell_pts.begin() + static_cast<std::size_t>(counts[c + 1]) * dim);
                ctr = seb_center(bucket, dim, norm);
            }
            if (constrain_to_sample) {
                double d;
                std::size_t snap = sample_index.nearest(ctr.data(), norm, &d);
                ctr = Y.point_vec(snap);
            }
            next.push(ctr);
        }
        cur = std::move(next);
    }
    return best;
}

namespace {

// Greedy sweep feasibility for interval unions; closed balls, closed set.
bool sweep_feasible(const IntervalUnion& u, double r, int N, bool constrained, std::vector<double>* centers) {
    if (centers) centers->clear();
    int balls = 0;
    double x = -kInf;  // everything <= x is covered
    for (;;) {
        // smallest set point strictly beyond x
        double p = kInf;
        for (const auto& [a, b] : u.intervals) {
            if (b > x) {
                p = std::max(a, x);
                break;
            }
        }
        if (p == kInf) return true;
        if (++balls > N) return false;
        double c = constrained ? u.floor_point(p + r) : p + r;
        if (centers) centers->push_back(c);
        x = c + r;
    }
}

}  // namespace

CoveringResult exact_covering_1d(const IntervalUnion& set, int N, bool constrained) {
    if (N < 1) throw std::domain_error("exact_covering_1d: N must be >= 1");
    if (set.intervals.empty()) throw std::domain_error("exact_covering_1d: empty set");
    double lo = 0.0;
    double hi = set.hi() - set.lo();
    if (hi == 0) hi = 1e-12;
    if (!sweep_feasible(set, hi, N, constrained, nullptr)) {
        // constrained sweep may need the full span when the set is sparse
        hi = 2 * (set.hi() - set.lo()) + 1;
    }
    if (sweep_feasible(set, 0.0, N, constrained, nullptr)) {
        hi = 0.0;
    }
    for (int it = 0; it < 200 && hi - lo > 0; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (sweep_feasible(set, mid, N, constrained, nullptr) ? hi : lo) = mid;
    }
    std::vector<double> centers;
    sweep_feasible(set, hi, N, constrained, &centers);
    while (static_cast<int>(centers.size()) < N) centers.push_back(centers.back());
    CoveringResult res;
    res.radius = hi;
    res.exact = true;
    res.mesh_certificate = 0.0;
    res.config.dim = 1;
    res.config.xs = std::move(centers);
    return res;
}

double exact_covering_points_1d(const std::vector<double>& pts, int N, bool constrained, std::vector<double>* centers) {
    if (N < 1) throw std::domain_error("exact_covering_points_1d: N must be >= 1");
    if (pts.empty()) throw std::domain_error("exact_covering_points_1d: empty point set");
    auto feasible = [&](double r, std::vector<double>* out) {
        if (out) out->clear();
        int balls = 0;
        std::size_t i = 0;
        while (i < pts.size()) {
            if (++balls > N) return false;
            double c;
            if (constrained) {
                double lim = pts[i] + r;
                std::size_t k = std::upper_bound(pts.begin(), pts.end(), lim) - pts.begin();
                c = pts[k - 1];
            } else {
                c = pts[i] + r;
            }
            if (out) out->push_back(c);
            double reach = c + r;
            while (i < pts.size() && pts[i] <= reach) ++i;
        }
        return true;
    };
    double lo = 0.0, hi = pts.back() - pts.front();
    if (hi == 0 || feasible(0.0, nullptr)) {
        if (centers) feasible(0.0, centers);
        if (centers)
            while (static_cast<int>(centers->size()) < N) centers->push_back(centers->back());
        return 0.0;
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (feasible(mid, nullptr) ? hi : lo) = mid;
    }
    if (centers) {
        feasible(hi, centers);
        while (static_cast<int>(centers->size()) < N) centers->push_back(centers->back());
    }
    return hi;
}

// ---------- fractal renewal DP ----------

FractalCoveringTable FractalCoveringTable::compute(const IfsModel& ifs, const NormSpec& norm, int n_max,
                                                   bool constrained, std::size_t sample_budget) {
    if (n_max < 1) throw std::domain_error("FractalCoveringTable: n_max must be >= 1");
    const int M = static_cast<int>(ifs.maps.size());
    const int p = ifs.ambient_dim();
    const double h = ifs.separation_h_certified;

    // deep sample for base cases
    std::size_t cap = std::min<std::size_t>(sample_budget, 400'000);
    int depth = 1;
    double words = static_cast<double>(M);
    while (words * M * (std::size_t{1} << p) <= static_cast<double>(cap) && depth < 40) {
        words *= M;
        ++depth;
    }
    SampledSet deep = ifs_points(ifs, depth, norm, sample_budget);
    std::vector<double> sorted1d;
    if (p == 1) {
        sorted1d = deep.xs;
        std::sort(sorted1d.begin(), sorted1d.end());
    }

    FractalCoveringTable table;
    table.constrained_ = constrained;
    table.base_mesh_ = deep.mesh;
    table.entries_.resize(n_max + 1);
    std::vector<double> ratios = ifs.ratios();
    double rmax = ifs.max_ratio();

    bool all_exact = true;
    double max_cert = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        FractalCoveringEntry e;
        double cand = kInf;
        std::vector<int> comp;
        if (n >= M) {
            // suffix tables over children: G[j][m] = best for children j..M-1 with m points
            std::vector<std::vector<double>> G(M);
            G[M - 1].assign(n + 1, kInf);
            for (int m = 1; m < n; ++m) G[M - 1][m] = ratios[M - 1] * table.entries_[m].radius;
            for (int j = M - 2; j >= 1; --j) {
                G[j].assign(n + 1, kInf);
                for (int m = 2; m < n; ++m) {
                    double bb = kInf;
                    for (int k = 1; k < m; ++k) {
                        double g = G[j + 1][m - k];
                        if (g == kInf) continue;
                        double v = std::max(ratios[j] * table.entries_[k].radius, g);
                        if (v < bb) bb = v;
                    }
                    G[j][m] = bb;
                }
            }
            int first_k = 0;
            for (int k = 1; k < n; ++k) {
                double g = (M >= 2) ? G[1][n - k] : kInf;
                if (M == 1) g = 0;
                if (g == kInf) continue;
                double v = std::max(ratios[0] * table.entries_[k].radius, g);
                if (v < cand) {
                    cand = v;
                    first_k = k;
                }
            }
            if (cand < kInf) {
                comp.resize(M);
                comp[0] = first_k;
                int rem = n - first_k;
                for (int j = 1; j < M - 1; ++j) {
                    for (int k = 1; k < rem; ++k) {
                        double g = G[j + 1][rem - k];
                        if (g == kInf) continue;
                        if (std::max(ratios[j] * table.entries_[k].radius, g) <= G[j][rem] * (1 + 1e-15)) {
                            comp[j] = k;
                            rem -= k;
                            break;
                        }
                    }
                }
                comp[M - 1] = rem;
            }
        }
        double rec_cert = rmax * max_cert;
        if (cand < kInf && cand + rec_cert < h) {
            e.radius = cand;
            e.exact = all_exact;
            e.cert = rec_cert;
            e.from_recursion = true;
            e.composition = std::move(comp);
        } else {
            // base case: exact on the deep sample in 1D, heuristic upper bound otherwise
            if (p == 1) {
                bool can_constrain = !constrained || deep.points_on_set;
                e.radius = exact_covering_points_1d(sorted1d, n, constrained, nullptr);
                e.exact = true;
                e.cert = deep.mesh * (can_constrain ? 1.0 : 2.0);
            } else {
                Configuration net = farthest_point_net(deep, n, norm);
                Configuration refined = minimax_refine(net, deep, 40, norm, constrained);
                e.radius = covering_radius_on_sample(refined, deep, norm);
                e.exact = false;
                e.cert = deep.mesh;
                all_exact = false;
            }
            e.from_recursion = false;
            table.guard_threshold_ = n;
        }
        max_cert = std::max(max_cert, e.cert);
        all_exact = all_exact && e.exact;
        table.entries_[n] = std::move(e);
    }
    return table;
}

const FractalCoveringEntry& FractalCoveringTable::at(int n) const {
    if (n < 1 || n > n_max()) throw std::out_of_range("FractalCoveringTable::at");
    return entries_[n];
}

AllocationNode FractalCoveringTable::allocation_tree(int n) const {
    const auto& e = at(n);
    AllocationNode node{n, e.radius, {}};
    if (e.from_recursion) {
        for (int k : e.composition) node.children.push_back(allocation_tree(k));
    }
    return node;
}

std::optional<int> FractalCoveringTable::inverse_of_radius(double t) const {
    for (int n = 1; n <= n_max(); ++n)
        if (entries_[n].radius <= t) return n;
    return std::nullopt;
}

// square grid with alternate rows offset by half a cell (2D only); the
// offset drops the lattice covering constant from 0.7071 to 0.625
Configuration offset_grid_construction(const BoxModel& b, int N, const SampledSet& Y, const NormSpec& norm) {
    if (b.d != 2) return grid_construction(b, N, Y, norm);
    int k = static_cast<int>(std::floor(std::sqrt(static_cast<double>(N) + 1e-9)));
    k = std::max(k, 1);
    Configuration cfg(b.ambient_dim);
    Point p = b.origin;
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < k; ++i) {
            double off = (j % 2) ? 0.25 : -0.25;
            double x = (i + 0.5 + off) / k;
            x = std::min(std::max(x, 0.0), 1.0);
            p[0] = b.origin[0] + x * b.side;
            p[1] = b.origin[1] + (j + 0.5) / k * b.side;
            cfg.push(p);
        }
    std::size_t m = Y.size();
    if (cfg.size() < static_cast<std::size_t>(N) && m > 0) {
        std::vector<double> dist(m, kInf);
        for (std::size_t i = 0; i < m; ++i) dist[i] = dist_to_configuration(Y.point(i), cfg, norm);
        while (cfg.size() < static_cast<std::size_t>(N)) {
            std::size_t wi = 0;
            double worst = -1;
            for (std::size_t i = 0; i < m; ++i)
                if (dist[i] > worst) {
                    worst = dist[i];
                    wi = i;
                }
            cfg.push(Y.point(wi));
            const double* c = Y.xs.data() + wi * Y.dim;
            for (std::size_t i = 0; i < m; ++i)
                dist[i] = std::min(dist[i], norm.distance(Y.xs.data() + i * Y.dim, c, Y.dim));
        }
    }
    return cfg;
}

Configuration grid_construction(const BoxModel& b, int N, const SampledSet& Y, const NormSpec& norm) {
    int k = static_cast<int>(std::floor(std::pow(static_cast<double>(N) + 1e-9, 1.0 / b.d)));
    k = std::max(k, 1);
    Configuration cfg(b.ambient_dim);
    std::vector<int> idx(b.d, 0);
    Point p = b.origin;
    for (;;) {
        for (int t = 0; t < b.d; ++t) p[t] = b.origin[t] + (idx[t] + 0.5) / k * b.side;
        cfg.push(p);
        int t = 0;
        while (t < b.d && ++idx[t] == k) idx[t++] = 0;
        if (t == b.d) break;
    }
    // greedy extras to reach cardinality N
    std::size_t m = Y.size();
    if (cfg.size() < static_cast<std::size_t>(N) && m > 0) {
        std::vector<double> dist(m, kInf);
        for (std::size_t i = 0; i < m; ++i) dist[i] = dist_to_configuration(Y.point(i), cfg, norm);
        while (cfg.size() < static_cast<std::size_t>(N)) {
            std::size_t wi = 0;
            double worst = -1;
            for (std::size_t i = 0; i < m; ++i)
                if (dist[i] > worst) {
                    worst = dist[i];
                    wi = i;
                }
            cfg.push(Y.point(wi));
            const double* c = Y.xs.data() + wi * Y.dim;
            for (std::size_t i = 0; i < m; ++i)
                dist[i] = std::min(dist[i], norm.distance(Y.xs.data() + i * Y.dim, c, Y.dim));
        }
    }
    return cfg;
}

double covering_radius_on_box_grid(const Configuration& omega, const BoxModel& b, const NormSpec& norm, double spacing) {
    if (omega.size() == 0) throw std::domain_error("covering_radius_on_box_grid: empty configuration");
    GridIndex centers(omega.xs, omega.dim, std::max(spacing * 8, b.side / std::sqrt(static_cast<double>(omega.size()) + 1)));
    long per_axis = static_cast<long>(std::ceil(b.side / spacing)) + 1;
    double worst = 0;
    Point y = b.origin;
    std::vector<long> idx(b.d, 0);
    for (;;) {
        for (int t = 0; t < b.d; ++t) y[t] = b.origin[t] + b.side * idx[t] / (per_axis - 1);
        double d;
        centers.nearest(y.data(), norm, &d);
        if (d > worst) worst = d;
        int t = 0;
        while (t < b.d && ++idx[t] == per_axis) idx[t++] = 0;
        if (t == b.d) break;
    }
    return worst;
}

namespace {

const IntervalUnion* flatten_to_interval_union(const SetModel& model, IntervalUnion& storage) {
    if (const auto* iu = std::get_if<IntervalUnion>(&model.shape)) return iu;
    if (const auto* b = std::get_if<BoxModel>(&model.shape)) {
        if (b->d == 1 && b->ambient_dim == 1) {
            storage = IntervalUnion::make({{b->origin.empty() ? 0.0 : b->origin[0],
                                            (b->origin.empty() ? 0.0 : b->origin[0]) + b->side}});
            return &storage;
        }
        return nullptr;
    }
    if (const auto* u = std::get_if<SeparatedUnion>(&model.shape)) {
        std::vector<std::pair<double, double>> iv;
        for (const auto& part : u->parts) {
            IntervalUnion tmp;
            const IntervalUnion* piu = flatten_to_interval_union(*part, tmp);
            if (!piu) return nullptr;
            iv.insert(iv.end(), piu->intervals.begin(), piu->intervals.end());
        }
        storage = IntervalUnion::make(std::move(iv));
        return &storage;
    }
    return nullptr;
}

double auto_mesh_for(const SetModel& model, int N) {
    double d = std::max(model.dim_d, 0.25);
    double scale = model.diameter_bound();
    if (const auto* b = std::get_if<BoxModel>(&model.shape)) scale = b->side;
    double rho_guess = 0.65 * scale * std::pow(static_cast<double>(N), -1.0 / d);
    return std::max(rho_guess / 10.0, scale * 1e-6);
}

CoveringResult heuristic_covering(const SetModel& model, int N, bool constrained, const SolveOptions& opts) {
    double mesh = opts.mesh > 0 ? opts.mesh : auto_mesh_for(model, N);
    SampledSet Y = sample(model, mesh, opts.sample_budget);
    while (Y.size() > 4'000'000 && opts.mesh == 0) {
        mesh *= 2;
        Y = sample(model, mesh, opts.sample_budget);
    }
    const NormSpec& norm = model.norm;
    bool snap = constrained && !std::holds_alternative<BoxModel>(model.shape);

    int restarts = std::max(opts.restarts, 1);
    std::vector<Configuration> results(restarts + 2);
    std::vector<double> radii(restarts + 2, kInf);
    std::uint64_t seed_state = opts.seed;
    std::vector<std::size_t> seeds(restarts);
    for (int i = 0; i < restarts; ++i) seeds[i] = splitmix64(seed_state) % std::max<std::size_t>(Y.size(), 1);

    int cvt_iters = std::max(2 * opts.refine_iters, 150);
    const auto* box_shape = std::get_if<BoxModel>(&model.shape);
    Configuration grid_cfg, offset_cfg;
    if (box_shape) {
        grid_cfg = grid_construction(*box_shape, N, Y, norm);
        offset_cfg = offset_grid_construction(*box_shape, N, Y, norm);
    }
    parallel_for(restarts, [&](std::size_t slot) {
        Configuration start;
        if (box_shape && slot % 2 == 1) {
            // structured starts keep the global order the centroid phase
            // wants; jitter breaks the lattices' own CVT fixed points
            start = (slot % 4 == 1) ? offset_cfg : grid_cfg;
            if (slot > 1) {
                std::uint64_t jrng = seeds[slot] ^ 0xA5A5A5A5ULL;
                double amp = (0.10 + 0.1 * ((slot / 2) % 4)) * box_shape->side /
                             std::max(1.0, std::pow(static_cast<double>(N), 1.0 / box_shape->d));
                for (std::size_t i = 0; i < start.size(); ++i)
                    for (int k = 0; k < box_shape->d; ++k) {
                        double u = static_cast<double>(splitmix64(jrng) >> 11) * 0x1.0p-53;
                        start.xs[i * start.dim + k] += amp * (2.0 * u - 1.0);
                    }
            }
        } else {
            start = farthest_point_net(Y, N, norm, seeds[slot]);
        }
        Configuration relaxed = centroid_refine(start, Y, cvt_iters, norm, snap);
        results[slot] = minimax_refine(relaxed, Y, opts.refine_iters, norm, snap);
    });
    // the raw grid constructions are always tried as candidates
    if (box_shape) {
        results[restarts] = std::move(grid_cfg);
        results[restarts + 1] = minimax_refine(offset_cfg, Y, opts.refine_iters, norm, snap);
    }
    // pick the winner on the final evaluation grid: the coarse optimization
    // sample can be overfit by refinement
    const auto* box = std::get_if<BoxModel>(&model.shape);
    double fine_spacing = 0.0;
    auto final_eval = [&](const Configuration& cfg) {
        if (box && box->d <= 3) {
            if (fine_spacing == 0.0) {
                double target = 0.01 * std::pow(static_cast<double>(N), -1.0 / model.dim_d) * box->side;
                Point ones(box->d, 1.0);
                ones.resize(norm.ambient_dim, 0.0);
                fine_spacing = std::min(mesh, 2.0 * target / norm.length(ones));
            }
            return covering_radius_on_box_grid(cfg, *box, norm, fine_spacing);
        }
        return fast_covering_radius(cfg, Y, norm);
    };
    std::size_t best = 0;
    double best_fine = kInf;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (results[i].size() == 0) continue;
        double r = final_eval(results[i]);
        radii[i] = r;
        if (r < best_fine) {
            best_fine = r;
            best = i;
        }
    }
    Configuration winner = std::move(results[best]);
    double winner_fine = best_fine;

    // k-center swaps on the winner, judged on the final grid
    {
        Configuration swapped = swap_improve(winner, Y, norm, 48, 3, snap);
        double swapped_fine = final_eval(swapped);
        if (swapped_fine < winner_fine) {
            winner_fine = swapped_fine;
            winner = std::move(swapped);
        }
    }

    // two incumbent-grid polish rounds, factor 5 apart, unconstrained only;
    // acceptance is judged on the optimization sample, the result on the
    // final grid (reverted when polish overfits the sample)
    if (!constrained && Y.size() < 600'000) {
        Configuration pre_polish = winner;
        double r_cur = fast_covering_radius(winner, Y, norm);
        for (int round = 0; round < 2; ++round) {
            double step = round == 0 ? mesh : mesh / 5.0;
            bool improved = true;
            int guard = 0;
            while (improved && guard++ < 8) {
                improved = false;
                // move the center owning the worst sample point
                GridIndex centers(winner.xs, winner.dim, pick_cell_size(Y, static_cast<int>(winner.size())));
                double worst = -1;
                std::size_t worst_pt = 0;
                for (std::size_t i = 0; i < Y.size(); ++i) {
                    double d;
                    centers.nearest(Y.xs.data() + i * Y.dim, norm, &d);
                    if (d > worst) {
                        worst = d;
                        worst_pt = i;
                    }
                }
                double d0;
                std::size_t ci = centers.nearest(Y.point(worst_pt).data(), norm, &d0);
                Point base = winner.point_vec(ci);
                int trials = winner.dim == 1 ? 2 : 9;
                for (int mask = 0; mask < trials; ++mask) {
                    Point trial = base;
                    if (winner.dim == 1) {
                        trial[0] += (mask == 0 ? step : -step);
                    } else {
                        int dx = mask % 3 - 1, dy = mask / 3 - 1;
                        if (dx == 0 && dy == 0) continue;
                        trial[0] += dx * step;
                        trial[1] += dy * step;
                    }
                    Configuration cand = winner;
                    cand.set_point(ci, trial);
                    double r_new = fast_covering_radius(cand, Y, norm);
                    if (r_new < r_cur) {
                        r_cur = r_new;
                        winner = std::move(cand);
                        improved = true;
                        break;
                    }
                }
            }
        }
        double polished_fine = final_eval(winner);
        if (polished_fine <= winner_fine) {
            winner_fine = polished_fine;
        } else {
            winner = std::move(pre_polish);
        }
    }

    CoveringResult res;
    res.config = std::move(winner);
    res.radius = winner_fine;
    res.exact = false;
    if (box && box->d <= 3) {
        Point half(box->d, fine_spacing / 2.0);
        half.resize(norm.ambient_dim, 0.0);
        res.mesh_certificate = norm.length(half);
    } else {
        res.mesh_certificate = Y.mesh;
    }
    return res;
}

Configuration fractal_config(const IfsModel& ifs, const NormSpec& norm, const FractalCoveringTable& table, int n,
                             std::size_t sample_budget);

}  // namespace

CoveringResult best_covering(const SetModel& model, int N, bool constrained, const SolveOptions& opts) {
    if (N < 1) throw std::domain_error("best_covering: N must be >= 1");
    IntervalUnion storage;
    if (opts.strategy != CoveringStrategy::heuristic) {
        if (const IntervalUnion* iu = flatten_to_interval_union(model, storage)) {
            return exact_covering_1d(*iu, N, constrained);
        }
        if (const auto* f = std::get_if<IfsModel>(&model.shape)) {
            auto table = FractalCoveringTable::compute(*f, model.norm, N, constrained, opts.sample_budget);
            const auto& e = table.at(N);
            CoveringResult res;
            res.radius = e.radius;
            res.exact = e.exact;
            res.mesh_certificate = e.cert;
            res.config = fractal_config(*f, model.norm, table, N, opts.sample_budget);
            return res;
        }
    }
    if (opts.strategy == CoveringStrategy::exact)
        throw std::invalid_argument("best_covering: no exact solver for this model");
    return heuristic_covering(model, N, constrained, opts);
}

namespace {

Configuration fractal_config(const IfsModel& ifs, const NormSpec& norm, const FractalCoveringTable& table, int n,
                             std::size_t sample_budget) {
    // base-case configs on the deep sample, pushed through word maps
    std::map<int, std::vector<double>> base_centers;  // 1D only
    const int p = ifs.ambient_dim();
    std::size_t cap = std::min<std::size_t>(sample_budget, 400'000);
    int depth = 1;
    double words = static_cast<double>(ifs.maps.size());
    while (words * ifs.maps.size() * (std::size_t{1} << p) <= static_cast<double>(cap) && depth < 40) {
        words *= ifs.maps.size();
        ++depth;
    }
    SampledSet deep = ifs_points(ifs, depth, norm, sample_budget);
    std::vector<double> sorted1d;
    if (p == 1) {
        sorted1d = deep.xs;
        std::sort(sorted1d.begin(), sorted1d.end());
    }
    Configuration out(p);
    // transform = (scale, rot, shift) accumulated as an affine map
    struct Frame {
        double scale;
        std::vector<double> rot;
        Point shift;
    };
    std::function<void(int, const Frame&)> emit = [&](int m, const Frame& fr) {
        const auto& e = table.at(m);
        if (e.from_recursion) {
            for (std::size_t c = 0; c < e.composition.size(); ++c) {
                const Similitude& s = ifs.maps[c];
                Frame nf;
                nf.scale = fr.scale * s.ratio;
                nf.rot.assign(p * p, 0.0);
                for (int i = 0; i < p; ++i)
                    for (int j = 0; j < p; ++j)
                        for (int k = 0; k < p; ++k) nf.rot[i * p + j] += fr.rot[i * p + k] * s.rot[k * p + j];
                nf.shift.assign(p, 0.0);
                for (int i = 0; i < p; ++i) {
                    double acc = 0;
                    for (int k = 0; k < p; ++k) acc += fr.rot[i * p + k] * s.shift[k];
                    nf.shift[i] = fr.shift[i] + fr.scale * acc;
                }
                emit(e.composition[c], nf);
            }
            return;
        }
        std::vector<double> centers;
        if (p == 1) {
            auto it = base_centers.find(m);
            if (it == base_centers.end()) {
                exact_covering_points_1d(sorted1d, m, table.constrained(), &centers);
                base_centers[m] = centers;
            } else {
                centers = it->second;
            }
            for (double c : centers) out.push(fr.scale * fr.rot[0] * c + fr.shift[0]);
        } else {
            Configuration net = farthest_point_net(deep, m, norm);
            Configuration refined = minimax_refine(net, deep, 40, norm, table.constrained());
            for (std::size_t i = 0; i < refined.size(); ++i) {
                auto pt = refined.point(i);
                Point img(p, 0.0);
                for (int a = 0; a < p; ++a) {
                    double acc = 0;
                    for (int k = 0; k < p; ++k) acc += fr.rot[a * p + k] * pt[k];
                    img[a] = fr.shift[a] + fr.scale * acc;
                }
                out.push(img);
            }
        }
    };
    Frame id;
    id.scale = 1.0;
    id.rot.assign(p * p, 0.0);
    for (int i = 0; i < p; ++i) id.rot[i * p + i] = 1.0;
    id.shift.assign(p, 0.0);
    emit(n, id);
    return out;
}

}  // namespace

std::vector<SequenceRecord> covering_sequence(const SetModel& model, const std::vector<int>& schedule, bool constrained,
                                              const SolveOptions& opts) {
    if (schedule.empty()) throw std::invalid_argument("covering_sequence: empty schedule");
    for (std::size_t i = 1; i < schedule.size(); ++i)
        if (schedule[i] <= schedule[i - 1]) throw std::invalid_argument("covering_sequence: schedule must increase");
    std::vector<SequenceRecord> out;
    double d = model.dim_d;
    // fractal models: one DP table serves the whole schedule
    if (const auto* f = std::get_if<IfsModel>(&model.shape); f && opts.strategy != CoveringStrategy::heuristic) {
        auto table = FractalCoveringTable::compute(*f, model.norm, schedule.back(), constrained, opts.sample_budget);
        for (int N : schedule) {
            const auto& e = table.at(N);
            SequenceRecord rec;
            rec.N = N;
            rec.value = e.radius;
            rec.normalized = std::pow(static_cast<double>(N), 1.0 / d) * e.radius;
            // DP values are certified only up to the base-case sample mesh,
            // so they are recorded as inexact with that certificate.
            rec.exact = false;
            rec.mesh_certificate = std::max(e.cert, 1e-300);
            out.push_back(rec);
        }
        return out;
    }
    for (int N : schedule) {
        CoveringResult r = best_covering(model, N, constrained, opts);
        SequenceRecord rec;
        rec.N = N;
        rec.value = r.radius;
        rec.normalized = std::pow(static_cast<double>(N), 1.0 / d) * r.radius;
        rec.exact = r.exact;
        rec.mesh_certificate = r.exact ? 0.0 : std::max(r.mesh_certificate, 1e-300);
        out.push_back(rec);
    }
    return out;
}

}  // namespace covlab
