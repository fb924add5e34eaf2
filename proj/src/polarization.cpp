#include "covlab/polarization.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>

#include "covlab/covering.hpp"
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

double multiset_count(std::size_t candidates, int N) {
    // C(candidates + N - 1, N), saturating
    double acc = 1.0;
    for (int i = 1; i <= N; ++i) {
        acc *= static_cast<double>(candidates - 1 + i) / static_cast<double>(i);
        if (acc > 1e18) return 1e18;
    }
    return acc;
}

// Candidate-vs-sample inverse-power distance table with coincidences kept
// apart so potentials stay finite under incremental updates.
struct PotentialTable {
    std::size_t n_cand = 0, n_y = 0;
    std::vector<double> inv;      // inv_pow(dist) with 0 where coincident
    std::vector<std::uint8_t> coincident;

    void build(const Configuration& cand, const SampledSet& Y, double s, const NormSpec& norm) {
        n_cand = cand.size();
        n_y = Y.size();
        inv.assign(n_cand * n_y, 0.0);
        coincident.assign(n_cand * n_y, 0);
        for (std::size_t a = 0; a < n_cand; ++a)
            for (std::size_t j = 0; j < n_y; ++j) {
                double d = norm.distance(cand.xs.data() + a * cand.dim, Y.xs.data() + j * Y.dim, Y.dim);
                if (d == 0.0) coincident[a * n_y + j] = 1;
                else inv[a * n_y + j] = inv_pow(d, s);
            }
    }
};

struct PotentialState {
    std::vector<double> pot;
    std::vector<int> inf_count;

    void reset(std::size_t n_y) {
        pot.assign(n_y, 0.0);
        inf_count.assign(n_y, 0);
    }
    void add(const PotentialTable& t, std::size_t a, int sign) {
        const double* row = t.inv.data() + a * t.n_y;
        const std::uint8_t* co = t.coincident.data() + a * t.n_y;
        for (std::size_t j = 0; j < t.n_y; ++j) {
            if (co[j]) inf_count[j] += sign;
            else pot[j] += sign * row[j];
        }
    }
    double min_value() const {
        double best = kInf;
        for (std::size_t j = 0; j < pot.size(); ++j) {
            if (inf_count[j] > 0) continue;
            if (pot[j] < best) best = pot[j];
        }
        return best;  // +inf when every sample point coincides with a configuration point
    }
};

Configuration config_from_indices(const Configuration& cand, const std::vector<int>& idx) {
    Configuration out(cand.dim);
    for (int a : idx) out.push(cand.point(a));
    return out;
}

// steepest-ascent single-point relocation over the full candidate set
double exhaustive_ascent(const PotentialTable& table, std::vector<int>& idx,
                         PotentialState& st, int max_sweeps) {
    const std::size_t n_y = table.n_y;
    double cur = st.min_value();
    std::vector<double> tmp_pot(n_y);
    std::vector<int> tmp_inf(n_y);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double best_gain = 0;
        int best_slot = -1, best_cand = -1;
        double best_val = cur;
        for (std::size_t slot = 0; slot < idx.size(); ++slot) {
            int a = idx[slot];
            // potentials without point a
            for (std::size_t j = 0; j < n_y; ++j) {
                tmp_pot[j] = st.pot[j];
                tmp_inf[j] = st.inf_count[j];
            }
            const double* row = table.inv.data() + static_cast<std::size_t>(a) * n_y;
            const std::uint8_t* co = table.coincident.data() + static_cast<std::size_t>(a) * n_y;
            for (std::size_t j = 0; j < n_y; ++j) {
                if (co[j]) --tmp_inf[j];
                else tmp_pot[j] -= row[j];
            }
            for (std::size_t b = 0; b < table.n_cand; ++b) {
                if (static_cast<int>(b) == a) continue;
                const double* brow = table.inv.data() + b * n_y;
                const std::uint8_t* bco = table.coincident.data() + b * n_y;
                double mn = kInf;
                for (std::size_t j = 0; j < n_y; ++j) {
                    if (tmp_inf[j] > 0 || bco[j]) continue;
                    double v = tmp_pot[j] + brow[j];
                    if (v < mn) mn = v;
                }
                if (mn > best_val * (1 + 1e-15) && mn - cur > best_gain) {
                    best_gain = mn - cur;
                    best_val = mn;
                    best_slot = static_cast<int>(slot);
                    best_cand = static_cast<int>(b);
                }
            }
        }
        if (best_slot < 0) break;
        st.add(table, idx[best_slot], -1);
        st.add(table, best_cand, +1);
        idx[best_slot] = best_cand;
        cur = st.min_value();
    }
    return cur;
}

// relocation of the weakest contributor toward the minimizing sample point
double targeted_ascent(const Configuration& cand, const PotentialTable& table, const SampledSet& Y,
                       const NormSpec& norm, std::vector<int>& idx, PotentialState& st, int max_moves, double diam,
                       std::uint64_t seed) {
    double cur = st.min_value();
    double radius = diam / 4.0;
    int stagnation = 0;
    std::uint64_t rng = seed;
    GridIndex cand_index(cand.xs, cand.dim, std::max(diam / 64.0, 1e-12));
    for (int move = 0; move < max_moves && stagnation < 24; ++move) {
        // minimizing sample point
        std::size_t ystar = 0;
        double mn = kInf;
        for (std::size_t j = 0; j < table.n_y; ++j) {
            if (st.inf_count[j] > 0) continue;
            if (st.pot[j] < mn) {
                mn = st.pot[j];
                ystar = j;
            }
        }
        if (mn == kInf) break;
        // weakest contributor at y*: the farthest configuration point
        int weak_slot = 0;
        double far = -1;
        for (std::size_t slot = 0; slot < idx.size(); ++slot) {
            double d = norm.distance(Y.xs.data() + ystar * Y.dim, cand.xs.data() + static_cast<std::size_t>(idx[slot]) * cand.dim,
                                     cand.dim);
            if (d > far) {
                far = d;
                weak_slot = static_cast<int>(slot);
            }
        }
        // candidate targets near y*
        std::vector<std::uint32_t> targets;
        cand_index.for_each_in_box(Y.xs.data() + ystar * Y.dim, radius, [&](std::uint32_t t) { targets.push_back(t); });
        if (targets.size() > 32) {
            for (std::size_t i = 0; i < 32; ++i) std::swap(targets[i], targets[i + splitmix64(rng) % (targets.size() - i)]);
            targets.resize(32);
        }
        int old = idx[weak_slot];
        st.add(table, old, -1);
        double best_val = -kInf;
        int best_t = -1;
        for (std::uint32_t t : targets) {
            if (static_cast<int>(t) == old) continue;
            st.add(table, t, +1);
            double v = st.min_value();
            st.add(table, t, -1);
            if (v > best_val) {
                best_val = v;
                best_t = static_cast<int>(t);
            }
        }
        if (best_t >= 0 && best_val > cur * (1 + 1e-15)) {
            st.add(table, best_t, +1);
            idx[weak_slot] = best_t;
            cur = best_val;
            stagnation = 0;
        } else {
            st.add(table, old, +1);
            ++stagnation;
            radius *= 0.7;
            if (radius < diam * 1e-6) radius = diam / 4.0;
        }
    }
    return cur;
}

}  // namespace

FrostmanBound::FrostmanBound(double s_, double d_, double c_, double mass_) : s(s_), d(d_), regularity_c(c_), mass(mass_) {
    if (!(s > d)) throw std::domain_error("FrostmanBound requires s > d");
    if (!(c_ > 0) || !(mass_ > 0)) throw std::domain_error("FrostmanBound requires positive c and mass");
    c_fro = s / (s - d) * std::pow(2.0 * regularity_c, s / d) / std::pow(mass, s / d);
}

double frostman_upper_bound(const FrostmanBound& fb, int N) {
    if (N < 1) throw std::domain_error("frostman_upper_bound: N >= 1");
    return fb.c_fro * std::pow(static_cast<double>(N), fb.s / fb.d);
}

FrostmanBound frostman_from_audit(const IfsModel& ifs, const DRegularityReport& audit, double s) {
    NormSpec norm = NormSpec::euclid(ifs.ambient_dim());
    double diam = ifs.hull_diameter(norm);
    double c = audit.c_fit / std::pow(diam, ifs.dim_d);
    return FrostmanBound(s, ifs.dim_d, c, 1.0);
}

PolarizationResult brute_force_polarization(const Configuration& candidates, const SampledSet& Y, int N, double s,
                                            const NormSpec& norm, std::size_t budget) {
    if (N < 1) throw std::domain_error("brute_force_polarization: N >= 1");
    if (candidates.size() == 0 || Y.size() == 0) throw std::domain_error("brute_force_polarization: empty input");
    double count = multiset_count(candidates.size(), N);
    if (count > static_cast<double>(budget))
        throw BudgetError("brute force needs " + std::to_string(static_cast<long long>(count)) +
                          " multisets, budget " + std::to_string(budget));

    // sort candidates by coordinates so first-found maxima are lexicographically smallest
    std::vector<std::size_t> order(candidates.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        for (int k = 0; k < candidates.dim; ++k) {
            double va = candidates.xs[a * candidates.dim + k], vb = candidates.xs[b * candidates.dim + k];
            if (va < vb) return true;
            if (va > vb) return false;
        }
        return false;
    });
    Configuration sorted(candidates.dim);
    for (std::size_t i : order) sorted.push(candidates.point(i));

    PotentialTable table;
    table.build(sorted, Y, s, norm);
    PotentialState st;
    st.reset(table.n_y);

    std::vector<int> cur;
    std::vector<int> best_idx;
    double best = -kInf;
    std::function<void(int, int)> rec = [&](int start, int left) {
        if (left == 0) {
            double v = st.min_value();
            if (v > best) {
                best = v;
                best_idx = cur;
            }
            return;
        }
        for (int a = start; a < static_cast<int>(table.n_cand); ++a) {
            st.add(table, a, +1);
            cur.push_back(a);
            rec(a, left - 1);
            cur.pop_back();
            st.add(table, a, -1);
        }
    };
    rec(0, N);

    PolarizationResult res;
    res.exact = true;
    res.mesh_certificate = Y.mesh;
    res.config = config_from_indices(sorted, best_idx);
    // exact re-evaluation drops the incremental bookkeeping drift
    res.value = polarization_value(res.config, Y, s, norm);
    return res;
}

namespace {

double auto_polar_mesh(const SetModel& model, int N) {
    double d = std::max(model.dim_d, 0.25);
    double diam = model.diameter_bound();
    return std::max(diam * std::pow(static_cast<double>(N), -1.0 / d) / 10.0, diam * 2e-5);
}

}  // namespace

PolarizationResult maximize_polarization(const SetModel& model, int N, double s, bool constrained,
                                         const PolarizeOptions& opts) {
    if (N < 1) throw std::domain_error("maximize_polarization: N >= 1");
    if (!(s > 0)) throw std::domain_error("maximize_polarization: s > 0");
    double mesh = opts.mesh > 0 ? opts.mesh : auto_polar_mesh(model, N);
    SampledSet Y = sample(model, mesh, opts.sample_budget);
    const NormSpec& norm = model.norm;

    // covering-seeded start: the best covering configuration is both a strong
    // start and the bridge-bound witness P >= R^{-s}
    Configuration cov_cfg;
    if (opts.covering_seed && opts.covering_seed->size() == static_cast<std::size_t>(N)) {
        cov_cfg = *opts.covering_seed;
    } else {
        SolveOptions cov_opts;
        cov_opts.seed = opts.seed;
        cov_opts.restarts = std::min(4, opts.restarts);
        cov_opts.mesh = mesh;
        try {
            cov_cfg = best_covering(model, N, constrained, cov_opts).config;
        } catch (const std::exception&) {
            cov_cfg = farthest_point_net(Y, N, norm);
        }
    }

    // candidate set: the sample itself, plus covering centers when
    // configurations may leave the set
    Configuration cand(Y.dim);
    cand.xs = Y.xs;
    if (!constrained)
        for (std::size_t i = 0; i < cov_cfg.size(); ++i) cand.push(cov_cfg.point(i));

    bool brute_ok = multiset_count(cand.size(), N) <= static_cast<double>(opts.brute_budget);
    if (opts.strategy == PolarizationStrategy::brute_force && !brute_ok)
        throw BudgetError("brute force over " + std::to_string(cand.size()) + " candidates at N=" + std::to_string(N) +
                          " exceeds the budget");
    if (brute_ok &&
        (opts.strategy == PolarizationStrategy::automatic || opts.strategy == PolarizationStrategy::brute_force)) {
        PolarizationResult res = brute_force_polarization(cand, Y, N, s, norm, opts.brute_budget);
        return res;
    }

    // snap the covering seed onto the candidate set
    GridIndex cand_index(cand.xs, cand.dim, std::max(model.diameter_bound() / 64.0, 1e-12));
    std::vector<int> seed_idx;
    for (std::size_t i = 0; i < cov_cfg.size() && i < static_cast<std::size_t>(N); ++i)
        seed_idx.push_back(static_cast<int>(cand_index.nearest(cov_cfg.point(i).data(), norm, nullptr)));
    while (static_cast<int>(seed_idx.size()) < N) seed_idx.push_back(seed_idx.empty() ? 0 : seed_idx.back());

    PotentialTable table;
    bool table_fits = cand.size() * Y.size() <= 40'000'000;
    if (table_fits) table.build(cand, Y, s, norm);

    if (opts.strategy == PolarizationStrategy::construction) {
        PolarizationResult res;
        res.config = config_from_indices(cand, seed_idx);
        res.value = polarization_value(res.config, Y, s, norm);
        res.exact = false;
        res.mesh_certificate = Y.mesh;
        return res;
    }

    if (!table_fits) {
        // fall back to evaluating the seed only; logged as a construction value
        PolarizationResult res;
        res.config = config_from_indices(cand, seed_idx);
        res.value = polarization_value(res.config, Y, s, norm);
        res.exact = false;
        res.mesh_certificate = Y.mesh;
        return res;
    }

    bool small = static_cast<double>(N) * cand.size() * Y.size() <= 2e8;
    // cheap instances afford a wide multistart, which is what makes steepest
    // ascent reliably reach the brute-force optimum at small N
    int restarts = std::max(1, opts.restarts);
    if (small && static_cast<double>(N) * cand.size() * Y.size() <= 2e6) restarts = std::max(restarts, 48);
    std::vector<double> values(restarts, -kInf);
    std::vector<std::vector<int>> configs(restarts);
    std::uint64_t seed_state = opts.seed ^ 0xC0FFEE;
    std::vector<std::uint64_t> start_seeds(restarts);
    for (int i = 0; i < restarts; ++i) start_seeds[i] = splitmix64(seed_state);

    parallel_for(restarts, [&](std::size_t slot) {
        std::vector<int> idx;
        if (slot == 0) {
            idx = seed_idx;
        } else {
            std::uint64_t st_rng = start_seeds[slot];
            for (int i = 0; i < N; ++i) idx.push_back(static_cast<int>(splitmix64(st_rng) % cand.size()));
            std::sort(idx.begin(), idx.end());
        }
        PotentialState st;
        st.reset(table.n_y);
        for (int a : idx) st.add(table, a, +1);
        double v = small ? exhaustive_ascent(table, idx, st, 100)
                         : targeted_ascent(cand, table, Y, norm, idx, st, opts.max_moves, model.diameter_bound(),
                                           start_seeds[slot]);
        values[slot] = v;
        configs[slot] = std::move(idx);
    });
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;

    PolarizationResult res;
    res.config = config_from_indices(cand, configs[best]);
    res.value = polarization_value(res.config, Y, s, norm);
    res.exact = false;
    res.mesh_certificate = Y.mesh;
    return res;
}

std::vector<SequenceRecord> polarization_sequence(const SetModel& model, const std::vector<int>& schedule, double s,
                                                  bool constrained, const PolarizeOptions& opts) {
    if (schedule.empty()) throw std::invalid_argument("polarization_sequence: empty schedule");
    for (std::size_t i = 1; i < schedule.size(); ++i)
        if (schedule[i] <= schedule[i - 1]) throw std::invalid_argument("polarization_sequence: schedule must increase");
    if (!(s > model.dim_d)) throw std::domain_error("polarization_sequence: requires s > d");
    std::vector<SequenceRecord> out;
    for (int N : schedule) {
        PolarizationResult r = maximize_polarization(model, N, s, constrained, opts);
        SequenceRecord rec;
        rec.N = N;
        rec.value = r.value;
        rec.normalized = r.value / std::pow(static_cast<double>(N), s / model.dim_d);
        rec.exact = r.exact && r.mesh_certificate == 0.0;
        rec.mesh_certificate = std::max(r.mesh_certificate, 1e-300);
        out.push_back(rec);
    }
    return out;
}

BridgeSequences matched_bridge_sequences(const SetModel& model, const std::vector<int>& schedule, double s,
                                         bool constrained, std::uint64_t seed, int restarts) {
    if (!(s > model.dim_d)) throw std::domain_error("matched_bridge_sequences: requires s > d");
    BridgeSequences out;
    double d = model.dim_d;
    for (int N : schedule) {
        SolveOptions sopts;
        sopts.seed = seed;
        sopts.restarts = restarts;
        CoveringResult cov = best_covering(model, N, constrained, sopts);

        PolarizeOptions popts;
        popts.seed = seed;
        popts.restarts = std::min(restarts, 4);
        popts.mesh = auto_polar_mesh(model, N);
        popts.covering_seed = &cov.config;
        SampledSet Yp = sample(model, popts.mesh, popts.sample_budget);
        double rho_p = covering_radius_on_sample(cov.config, Yp, model.norm);
        PolarizationResult pol = maximize_polarization(model, N, s, constrained, popts);

        SequenceRecord crec;
        crec.N = N;
        crec.value = rho_p;
        crec.normalized = std::pow(static_cast<double>(N), 1.0 / d) * rho_p;
        crec.exact = false;
        crec.mesh_certificate = Yp.mesh;
        out.covering.push_back(crec);

        SequenceRecord prec;
        prec.N = N;
        prec.value = pol.value;
        prec.normalized = pol.value / std::pow(static_cast<double>(N), s / d);
        prec.exact = false;
        prec.mesh_certificate = std::max(pol.mesh_certificate, 1e-300);
        out.polarization.push_back(prec);
    }
    return out;
}

int weak_separation_audit(const Configuration& omega, const SampledSet& Y, int N, double d, int p, double eta,
                          const NormSpec& norm) {
    if (!(eta > 0)) throw std::domain_error("weak_separation_audit: eta > 0");
    double r = eta * std::pow(static_cast<double>(N), -1.0 / d);
    GridIndex pts(omega.xs, omega.dim, std::max(r, 1e-12));
    int violations = 0;
    for (std::size_t j = 0; j < Y.size(); ++j) {
        int inside = 0;
        const double* y = Y.xs.data() + j * Y.dim;
        pts.for_each_in_box(y, r, [&](std::uint32_t t) {
            if (norm.distance(y, omega.xs.data() + static_cast<std::size_t>(t) * omega.dim, omega.dim) <= r) ++inside;
        });
        if (inside > p) ++violations;
    }
    return violations;
}

double superadditivity_check(const std::map<int, double>& exact_values) {
    double slack = kInf;
    for (const auto& [n1, v1] : exact_values)
        for (const auto& [n2, v2] : exact_values) {
            if (n2 < n1) continue;
            auto it = exact_values.find(n1 + n2);
            if (it == exact_values.end()) continue;
            slack = std::min(slack, it->second - v1 - v2);
        }
    return slack;
}

double superadditivity_check(const std::vector<SequenceRecord>& exact_records) {
    std::map<int, double> table;
    for (const auto& r : exact_records) {
        if (!r.exact) throw std::invalid_argument("superadditivity_check: refuses heuristic (non-exact) values");
        table[r.N] = r.value;
    }
    return superadditivity_check(table);
}

NbhdStabilityReport neighborhood_stability_check(const Configuration& omega, const SetModel& model, double s,
                                                 double eps, int N, const FrostmanBound& fb, double mesh) {
    double limit = 1.0 / (2.0 * std::pow(fb.c_fro, 1.0 / s));
    if (!(eps > 0 && eps < limit))
        throw std::domain_error("neighborhood_stability_check: need 0 < eps < 1/(2 c_fro^{1/s})");
    double r_n = eps * std::pow(static_cast<double>(N), -1.0 / model.dim_d);
    SampledSet on_set = sample(model, mesh);
    SampledSet on_nbhd = sample(inflate(model, r_n), mesh);
    NbhdStabilityReport rep;
    rep.value_on_set = polarization_value(omega, on_set, s, model.norm);
    rep.value_on_neighborhood = polarization_value(omega, on_nbhd, s, model.norm);
    rep.bound = 1.0 - eps * s * std::pow(fb.c_fro, 1.0 / s);
    rep.ratio = rep.value_on_neighborhood / rep.value_on_set;
    rep.pass = rep.value_on_neighborhood >= rep.bound * rep.value_on_set - 1e-12;
    return rep;
}

}  // namespace covlab
