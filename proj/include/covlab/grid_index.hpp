#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "covlab/geometry.hpp"

namespace covlab {

/// Uniform bucket grid over a flat point array (dim 1 or 2) for nearest-point
/// queries. Correct for every supported norm: ring pruning uses the fact that
/// all of them dominate a fixed multiple of l_inf on the plane.
class GridIndex {
public:
    GridIndex() = default;

    GridIndex(const std::vector<double>& pts, int dim, double cell) { build(pts, dim, cell); }

    void build(const std::vector<double>& pts, int dim, double cell) {
        pts_ = &pts;
        dim_ = dim;
        n_ = dim > 0 ? pts.size() / dim : 0;
        cell_ = cell > 0 ? cell : 1.0;
        for (int k = 0; k < 2; ++k) {
            lo_[k] = std::numeric_limits<double>::infinity();
            hi_[k] = -std::numeric_limits<double>::infinity();
        }
        for (std::size_t i = 0; i < n_; ++i)
            for (int k = 0; k < dim_; ++k) {
                double v = pts[i * dim_ + k];
                lo_[k] = std::min(lo_[k], v);
                hi_[k] = std::max(hi_[k], v);
            }
        if (dim_ == 1) {
            lo_[1] = hi_[1] = 0;
        }
        nx_ = span_cells(0);
        ny_ = dim_ >= 2 ? span_cells(1) : 1;
        cells_.assign(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
        std::vector<std::uint32_t> which(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            which[i] = cell_of(&pts[i * dim_]);
            ++cells_[which[i] + 1];
        }
        for (std::size_t c = 1; c < cells_.size(); ++c) cells_[c] += cells_[c - 1];
        order_.resize(n_);
        std::vector<std::uint32_t> cursor(cells_.begin(), cells_.end() - 1);
        for (std::size_t i = 0; i < n_; ++i) order_[cursor[which[i]]++] = static_cast<std::uint32_t>(i);
    }

    /// Index of the nearest stored point to y, with its distance in *dist.
    /// Norm-distance ties (large regions under l_inf / l1) break by squared
    /// Euclidean distance so Voronoi cells stay geometrically sensible.
    std::size_t nearest(const double* y, const NormSpec& norm, double* dist = nullptr) const {
        double best = std::numeric_limits<double>::infinity();
        double best_se = std::numeric_limits<double>::infinity();
        std::size_t best_i = 0;
        int cx = coord_cell(y[0], 0);
        int cy = dim_ >= 2 ? coord_cell(y[1], 1) : 0;
        // All supported norms satisfy ||v|| >= max_k |v_k|, so a ring at
        // l_inf cell distance k is at least (k-1)*cell away.
        int max_ring = nx_ + ny_ + 2;
        for (int ring = 0; ring <= max_ring; ++ring) {
            if (best < (ring - 1) * cell_) break;
            bool any = false;
            auto visit = [&](int gx, int gy) {
                if (gx < 0 || gx >= nx_ || gy < 0 || gy >= ny_) return;
                any = true;
                std::uint32_t c = static_cast<std::uint32_t>(gy) * nx_ + gx;
                for (std::uint32_t t = cells_[c]; t < cells_[c + 1]; ++t) {
                    std::uint32_t i = order_[t];
                    const double* p = pts_->data() + static_cast<std::size_t>(i) * dim_;
                    double d = norm.distance(y, p, dim_);
                    double slack = 1e-12 * (1.0 + best);
                    if (d < best - slack) {
                        best = d;
                        best_i = i;
                        best_se = 0;
                        for (int k = 0; k < dim_; ++k) best_se += (y[k] - p[k]) * (y[k] - p[k]);
                    } else if (d <= best + slack) {
                        double se = 0;
                        for (int k = 0; k < dim_; ++k) se += (y[k] - p[k]) * (y[k] - p[k]);
                        if (se < best_se) {
                            best = std::min(best, d);
                            best_i = i;
                            best_se = se;
                        }
                    }
                }
            };
            if (ring == 0) {
                visit(cx, cy);
            } else if (dim_ == 1) {
                visit(cx - ring, 0);
                visit(cx + ring, 0);
            } else {
                for (int gx = cx - ring; gx <= cx + ring; ++gx) {
                    visit(gx, cy - ring);
                    visit(gx, cy + ring);
                }
                for (int gy = cy - ring + 1; gy <= cy + ring - 1; ++gy) {
                    visit(cx - ring, gy);
                    visit(cx + ring, gy);
                }
            }
            if (!any && ring > max_ring) break;
        }
        if (dist) *dist = best;
        return best_i;
    }

    /// Nearest and second-nearest stored point distances (indices optional).
    void nearest2(const double* y, const NormSpec& norm, double* d1, double* d2, std::size_t* i1 = nullptr) const {
        double b1 = std::numeric_limits<double>::infinity();
        double b2 = std::numeric_limits<double>::infinity();
        std::size_t bi = 0;
        int cx = coord_cell(y[0], 0);
        int cy = dim_ >= 2 ? coord_cell(y[1], 1) : 0;
        int max_ring = nx_ + ny_ + 2;
        for (int ring = 0; ring <= max_ring; ++ring) {
            if (b2 < (ring - 1) * cell_) break;
            auto visit = [&](int gx, int gy) {
                if (gx < 0 || gx >= nx_ || gy < 0 || gy >= ny_) return;
                std::uint32_t c = static_cast<std::uint32_t>(gy) * nx_ + gx;
                for (std::uint32_t t = cells_[c]; t < cells_[c + 1]; ++t) {
                    std::uint32_t i = order_[t];
                    double d = norm.distance(y, pts_->data() + static_cast<std::size_t>(i) * dim_, dim_);
                    if (d < b1) {
                        b2 = b1;
                        b1 = d;
                        bi = i;
                    } else if (d < b2) {
                        b2 = d;
                    }
                }
            };
            if (ring == 0) {
                visit(cx, cy);
            } else if (dim_ == 1) {
                visit(cx - ring, 0);
                visit(cx + ring, 0);
            } else {
                for (int gx = cx - ring; gx <= cx + ring; ++gx) {
                    visit(gx, cy - ring);
                    visit(gx, cy + ring);
                }
                for (int gy = cy - ring + 1; gy <= cy + ring - 1; ++gy) {
                    visit(cx - ring, gy);
                    visit(cx + ring, gy);
                }
            }
        }
        *d1 = b1;
        *d2 = b2;
        if (i1) *i1 = bi;
    }

    /// Visits indices of stored points within l_inf box radius r of y.
    template <class Fn>
    void for_each_in_box(const double* y, double r, Fn&& fn) const {
        int x0 = coord_cell(y[0] - r, 0), x1 = coord_cell(y[0] + r, 0);
        int y0 = dim_ >= 2 ? coord_cell(y[1] - r, 1) : 0;
        int y1 = dim_ >= 2 ? coord_cell(y[1] + r, 1) : 0;
        x0 = std::max(x0, 0);
        y0 = std::max(y0, 0);
        x1 = std::min(x1, nx_ - 1);
        y1 = std::min(y1, ny_ - 1);
        for (int gy = y0; gy <= y1; ++gy)
            for (int gx = x0; gx <= x1; ++gx) {
                std::uint32_t c = static_cast<std::uint32_t>(gy) * nx_ + gx;
                for (std::uint32_t t = cells_[c]; t < cells_[c + 1]; ++t) fn(order_[t]);
            }
    }

private:
    int span_cells(int k) const {
        double span = hi_[k] - lo_[k];
        int n = static_cast<int>(std::floor(span / cell_)) + 1;
        return std::max(n, 1);
    }
    int coord_cell(double v, int k) const { return static_cast<int>(std::floor((v - lo_[k]) / cell_)); }
    std::uint32_t cell_of(const double* p) const {
        int gx = std::clamp(coord_cell(p[0], 0), 0, nx_ - 1);
        int gy = dim_ >= 2 ? std::clamp(coord_cell(p[1], 1), 0, ny_ - 1) : 0;
        return static_cast<std::uint32_t>(gy) * nx_ + gx;
    }

    const std::vector<double>* pts_ = nullptr;
    int dim_ = 1;
    std::size_t n_ = 0;
    double cell_ = 1.0;
    double lo_[2] = {0, 0}, hi_[2] = {0, 0};
    int nx_ = 1, ny_ = 1;
    std::vector<std::uint32_t> cells_;
    std::vector<std::uint32_t> order_;
};

}  // namespace covlab
