#include "tscp/experiments.hpp"

#include "tscp/graphical.hpp"
#include "tscp/io.hpp"
#include "tscp/parallel.hpp"
#include "tscp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>

namespace tscp {

namespace {

void reject_unused(const Config& cfg)
{
    const auto extra = cfg.unused();
    if (extra.empty()) return;
    std::string msg = "unknown config keys:";
    for (const auto& k : extra) msg += " " + k;
    throw ConfigError(msg);
}

void check_kind(const Config& cfg, const std::string& name)
{
    const std::string kind = cfg.get_string("exp.kind", name);
    if (kind != name) throw ConfigError("config is for '" + kind + "', not '" + name + "'");
}

double positive(const Config& cfg, const std::string& key, double fallback)
{
    const double v = cfg.get_double(key, fallback);
    if (!(v > 0.0)) throw ConfigError("key '" + key + "' must be > 0");
    return v;
}

std::string suffix(int replicate)
{
    return replicate == 0 ? "" : "_r" + std::to_string(replicate);
}

std::filesystem::path prepare(const RunOptions& opt)
{
    std::filesystem::create_directories(opt.out);
    return opt.out;
}

std::array<std::size_t, 3> sim_counts(const Simulator& sim)
{
    return {sim.count(0), sim.count(1), sim.count(2)};
}

Configuration initial_config(const InitSpec& init, const TwoScaleGraph& g, std::uint64_t seed)
{
    Rng rng(derive_seed(seed, ~std::uint64_t{0}));
    return make_initial(init, g, rng);
}

} // namespace

LatticeSpec lattice_from(const Config& cfg)
{
    LatticeSpec s;
    s.dim = static_cast<int>(cfg.get_int("graph.dim", 2));
    s.patch_size = static_cast<int>(cfg.get_int("graph.N", 3));
    s.extent = static_cast<int>(cfg.get_int("graph.extent", 1));
    const std::string b = cfg.get_string("graph.boundary", "periodic");
    if (b == "periodic")
        s.boundary = Boundary::periodic;
    else if (b == "killing")
        s.boundary = Boundary::killing;
    else
        throw ConfigError("graph.boundary must be periodic or killing");
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("graph: ") + e.what());
    }
    return s;
}

ModelParams params_from(const Config& cfg)
{
    ModelParams p;
    p.B1 = cfg.get_double("params.B1", 1.0);
    p.B2 = cfg.get_double("params.B2", 1.0);
    p.beta1 = cfg.get_double("params.beta1", 1.0);
    p.beta2 = cfg.get_double("params.beta2", 1.0);
    p.delta1 = cfg.get_double("params.delta1", 1.0);
    p.delta2 = cfg.get_double("params.delta2", 1.0);
    try {
        p.variant = parse_variant(cfg.get_string("params.variant", "plain"));
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("params: ") + e.what());
    }
    return p;
}

InitSpec init_from(const Config& cfg, const TwoScaleGraph& g)
{
    InitSpec init;
    const std::string kind = cfg.get_string("exp.init", "product");
    if (kind == "product") {
        init.kind = InitSpec::Kind::product;
        init.p0 = cfg.get_double("exp.init_p0", 0.5);
        init.p1 = cfg.get_double("exp.init_p1", 0.25);
        init.p2 = cfg.get_double("exp.init_p2", 0.25);
    } else if (kind == "empty") {
        init.kind = InitSpec::Kind::product;
        init.p0 = 1.0;
        init.p1 = init.p2 = 0.0;
    } else if (kind == "single2") {
        init.kind = InitSpec::Kind::single2_at_center;
        for (long z : cfg.get_ints("exp.init_patch", {})) init.patch.push_back(static_cast<int>(z));
    } else if (kind == "all1_except") {
        init.kind = InitSpec::Kind::all1_except;
        for (long v : cfg.get_ints("exp.init_exceptions", {})) init.exceptions.push_back(static_cast<VertexId>(v));
        init.exception_state = static_cast<State>(cfg.get_int("exp.init_exception_state", 0));
    } else if (kind == "file") {
        init.kind = InitSpec::Kind::explicit_states;
        try {
            init.states = read_states(cfg.get_string("exp.init_file"), g);
        } catch (const std::runtime_error& e) {
            throw ConfigError(std::string("exp.init_file: ") + e.what());
        }
    } else {
        throw ConfigError("exp.init must be product, empty, single2, all1_except or file");
    }
    try {
        init.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("exp.init: ") + e.what());
    }
    return init;
}

int replicates_from(const Config& cfg, const RunOptions& opt, int fallback)
{
    const long r = cfg.get_int("exp.replicates", fallback);
    const long m = opt.replicates >= 0 ? opt.replicates : r;
    if (m < 1) throw ConfigError("replicate count must be >= 1");
    return static_cast<int>(m);
}

// ---------------------------------------------------------------------------

SimulateResult simulate(const TwoScaleGraph& g, const ModelParams& params, const InitSpec& init, double t_max,
                        const std::vector<double>& snapshot_times, double density_dt, std::uint64_t seed)
{
    if (!(t_max > 0.0) || !(density_dt > 0.0)) throw std::invalid_argument("t_max and density_dt must be > 0");
    std::set<double> grid;
    for (long k = 0; k * density_dt <= t_max; ++k) grid.insert(k * density_dt);
    grid.insert(t_max);
    for (double t : snapshot_times) {
        if (t < 0.0 || t > t_max) throw std::invalid_argument("snapshot time outside [0, t_max]");
        grid.insert(t);
    }
    const std::set<double> snaps(snapshot_times.begin(), snapshot_times.end());

    SimulateResult res;
    res.initial = initial_config(init, g, seed);
    Simulator sim(g, params, res.initial, seed);
    for (double t : grid) {
        sim.advance_to(t);
        res.density.push_back({t, sim_counts(sim), hetero_pairs(sim.config(), g)});
        if (snaps.count(t)) {
            res.snapshot_times.push_back(t);
            res.snapshots.push_back(sim.config());
        }
    }
    res.events = sim.events();
    return res;
}

ExtinctionSample extinction_time(const TwoScaleGraph& g, const ModelParams& params, double t_max, std::uint64_t seed)
{
    InitSpec init;
    init.kind = InitSpec::Kind::single2_at_center;
    Simulator sim(g, params, initial_config(init, g, seed), seed);
    while (sim.count(2) > 0) {
        if (!sim.step(t_max)) return {t_max, true};
    }
    return {sim.time(), false};
}

ExtinctionSummary summarize_extinction(int N, const std::vector<ExtinctionSample>& s, double quick_cutoff,
                                       double long_cutoff)
{
    ExtinctionSummary out;
    out.N = N;
    out.runs = s.size();
    if (s.empty()) return out;
    std::vector<double> tau, long_tau;
    std::size_t quick = 0, middle = 0, long_censored = 0;
    for (const auto& e : s) {
        tau.push_back(e.tau);
        out.censored += e.censored;
        if (e.tau <= quick_cutoff && !e.censored)
            ++quick;
        else if (e.tau >= long_cutoff || e.censored) {
            long_tau.push_back(e.tau);
            long_censored += e.censored;
        } else
            ++middle;
    }
    const double n = static_cast<double>(s.size());
    out.mean = mean(tau);
    out.q10 = quantile(tau, 0.1);
    out.q50 = quantile(tau, 0.5);
    out.q90 = quantile(tau, 0.9);
    out.quick_fraction = quick / n;
    out.middle_fraction = middle / n;
    out.long_fraction = static_cast<double>(long_tau.size()) / n;
    if (!long_tau.empty()) {
        out.long_median = quantile(long_tau, 0.5);
        out.long_median_censored = 2 * long_censored >= long_tau.size();
    }
    return out;
}

// ---------------------------------------------------------------------------

std::string to_string(Geometry g)
{
    switch (g) {
    case Geometry::e1_to_0: return "e1_to_0";
    case Geometry::zero_to_e1: return "0_to_e1";
    case Geometry::e1_to_2e1: return "e1_to_2e1";
    }
    return "?";
}

Geometry parse_geometry(const std::string& s)
{
    if (s == "e1_to_0") return Geometry::e1_to_0;
    if (s == "0_to_e1") return Geometry::zero_to_e1;
    if (s == "e1_to_2e1") return Geometry::e1_to_2e1;
    throw std::invalid_argument("unknown geometry " + s);
}

std::pair<Coord, Coord> geometry_boxes(Geometry geo, int d)
{
    Coord zero(d, 0), e1(d, 0), e2(d, 0);
    e1[0] = 1;
    e2[0] = 2;
    switch (geo) {
    case Geometry::e1_to_0: return {e1, zero};
    case Geometry::zero_to_e1: return {zero, e1};
    case Geometry::e1_to_2e1: return {e1, e2};
    }
    return {zero, zero};
}

Configuration minimal_good_config(const TwoScaleGraph& g, const ScaleHierarchy& hier, const Coord& z)
{
    Configuration c;
    c.states.assign(g.num_vertices(), 0);
    for (const Coord& x : hier.box_sites(z))
        if (!hier.in_core(x)) c.states[vertex_centered(g, x)] = 2;
    return c;
}

bool goodness_trial(const TwoScaleGraph& g, const ScaleHierarchy& hier, const ModelParams& params, Geometry geo,
                    std::uint64_t seed)
{
    const auto [from, to] = geometry_boxes(geo, hier.dim);
    if (!hier.interior_box(from) || !hier.interior_box(to))
        throw std::invalid_argument("geometry " + to_string(geo) + " needs a larger K");
    Simulator sim(g, params, minimal_good_config(g, hier, from), seed);
    sim.advance_to(hier.T);
    return is_good(sim.config(), g, hier, to);
}

std::pair<double, double> Proportion::wilson(double z) const
{
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double ph = p();
    const double den = 1.0 + z * z / n;
    const double mid = (ph + z * z / (2.0 * n)) / den;
    const double half = z * std::sqrt(ph * (1.0 - ph) / n + z * z / (4.0 * n * n)) / den;
    return {std::max(0.0, mid - half), std::min(1.0, mid + half)};
}

std::vector<InclusionRow> inclusion_run(const TwoScaleGraph& g, const ScaleHierarchy& hier, const ModelParams& params,
                                        double eps, int levels, int replicate, std::uint64_t seed)
{
    Configuration init;
    init.states.assign(g.num_vertices(), 2);
    for (const Coord& x : hier.box_sites(Coord(hier.dim, 0)))
        if (hier.in_core(x)) init.states[vertex_centered(g, x)] = 0;
    Simulator sim(g, params, init, derive_seed(seed, 1));
    std::vector<std::vector<Coord>> good;
    for (int n = 0; n < levels; ++n) {
        sim.advance_to(n * hier.T);
        good.push_back(good_sites(sim.config(), g, hier, n));
    }
    const PercLattice lat{hier.dim, hier.K};
    const PercField field = PercField::iid(lat, eps, levels, derive_seed(seed, 2), (hier.K + 1) / 2);
    const WetSets wet = wet_sets(field, {Coord(hier.dim, 0)}, levels);
    const InclusionReport rep = inclusion_check(wet.levels, good);
    std::vector<InclusionRow> rows;
    for (int n = 0; n < levels; ++n)
        rows.push_back({replicate, n, wet.levels[n].size(), good[n].size(), static_cast<bool>(rep.included[n])});
    return rows;
}

InvasionStats invasion_run(const TwoScaleGraph& g, const ModelParams& params, double I, double t_max,
                           std::uint64_t seed)
{
    if (g.num_patches() < 2) throw std::invalid_argument("invasion run needs two patches");
    Coord e1(g.dim(), 0);
    e1[0] = 1;
    const PatchId p0 = g.patch_at(Coord(g.dim(), 0));
    const PatchId p1 = g.patch_at(e1);
    Configuration init;
    init.states.assign(g.num_vertices(), 0);
    for (VertexId v : g.patch_members(p0)) init.states[v] = 2;
    for (VertexId v : g.patch_members(p1)) init.states[v] = 1;
    const VertexId c0 = g.center_of_patch(p0);

    InvasionStats st;
    std::size_t twos = 0;
    double since = 0.0;
    bool c0_two = true;
    double occ = 0.0;
    Simulator sim(g, params, init, seed);
    sim.set_observer([&](const Delta& d) {
        if (d.v == c0 && d.t <= I) {
            if (c0_two) occ += d.t - since;
            since = d.t;
            c0_two = d.to == 2;
        }
        if (g.patch_id(d.v) != p1) return;
        const std::size_t before = twos;
        twos += (d.to == 2);
        twos -= (d.from == 2);
        if (before == 0 && twos > 0) st.r.push_back(d.t);
        if (before > 0 && twos == 0) st.s.push_back(d.t);
    });
    const double t_stop = std::max(I, t_max);
    while (sim.step(t_stop)) {
        if (!st.sigma && twos > 0 && sim.time() - st.r.back() > 3.0 * I) st.sigma = st.r.back();
        if (!st.sigma && st.s.size() == st.r.size() && !st.s.empty() && st.s.back() - st.r.back() > 3.0 * I)
            st.sigma = st.r.back();
        if (st.sigma && sim.time() >= I) break;
    }
    if (c0_two) occ += I - since;
    st.center_occupation = occ / I;
    if (st.sigma && *st.sigma > t_max) st.sigma.reset();
    return st;
}

CoexistRun coexist_run(const TwoScaleGraph& g, const ModelParams& params, const InitSpec& init, double t_max,
                       std::uint64_t seed, bool ones_at_centers_only)
{
    CoexistRun r;
    Configuration c0 = initial_config(init, g, seed);
    if (ones_at_centers_only)
        for (VertexId v = 0; v < g.num_vertices(); ++v)
            if (c0.states[v] == 1 && !g.is_center(v)) c0.states[v] = 2;
    Simulator sim(g, params, std::move(c0), seed);
    r.initial = sim_counts(sim);
    sim.advance_to(t_max / 2.0);
    r.mid = sim_counts(sim);
    sim.advance_to(t_max);
    r.end = sim_counts(sim);
    return r;
}

// ---------------------------------------------------------------------------

DualTrace dual_trace(const TwoScaleGraph& g, const ModelParams& params, VertexId x, double t_window, double S,
                     const std::vector<double>& probe_s, std::uint64_t seed)
{
    if (!(S > 0.0) || !(t_window > S)) throw std::invalid_argument("need 0 < S < t_window");
    const EventLog log = generate_events(g, params, 0.0, t_window, seed);
    const DualTree tree = build_dual_tree(x, t_window, log, t_window - S);
    const RenewalSequence seq = renewal_points(tree, log, Liveness::horizon(S));
    DualTrace tr;
    tr.root_lives = seq.root_lives;
    tr.truncated = seq.truncated;
    for (const auto& p : seq.points) {
        tr.tau.push_back(p.tau);
        tr.x.push_back(g.coords(p.x)[0]);
    }
    for (const auto& p : center_subsequence(seq, g)) {
        tr.y_tau.push_back(p.tau);
        tr.y.push_back(g.coords(p.x)[0]);
    }
    const int x0 = g.coords(x)[0];
    for (double s : probe_s) {
        if (s > tree.horizon || (tree.extinct && s >= tree.horizon)) break;
        int r = 0;
        for (VertexId v : ancestor_hierarchy(tree, s)) r = std::max(r, std::abs(g.coords(v)[0] - x0));
        tr.radius.push_back(r);
    }
    return tr;
}

IncrementStats increment_stats(const std::vector<std::vector<double>>& seqs)
{
    IncrementStats st;
    std::vector<double> first, second, a, b;
    for (const auto& s : seqs) {
        if (s.size() < 2) continue;
        std::vector<double> inc;
        for (std::size_t k = 0; k + 1 < s.size(); ++k) inc.push_back(s[k + 1] - s[k]);
        const std::size_t half = inc.size() / 2;
        for (std::size_t k = 0; k < inc.size(); ++k) (k < half ? first : second).push_back(inc[k]);
        for (std::size_t k = 0; k + 1 < inc.size(); ++k) {
            a.push_back(inc[k]);
            b.push_back(inc[k + 1]);
        }
        st.n += inc.size();
    }
    if (!first.empty() && !second.empty()) st.split_half = ks_two_sample(first, second);
    if (a.size() >= 3) {
        st.lag1 = correlation(a, b);
        if (!std::isfinite(st.lag1)) st.lag1 = 0.0;
        st.lag1_se = 1.0 / std::sqrt(static_cast<double>(a.size()));
    }
    return st;
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    const double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

// ---------------------------------------------------------------------------

std::vector<PercCurve> perc_curves(const PercLattice& lat, const std::vector<double>& eps, int levels,
                                   long realizations, std::uint64_t seed, int threads)
{
    std::vector<PercCurve> out;
    for (double e : eps) {
        std::vector<int> level(static_cast<std::size_t>(realizations), -1);
        parallel_for(level.size(), threads, [&](std::size_t r) {
            const PercField f = PercField::iid(lat, e, levels, derive_seed(seed, r));
            const WetSets w = wet_sets(f, {Coord(lat.d, 0)}, levels);
            if (w.extinction) level[r] = *w.extinction;
        });
        PercCurve c;
        c.eps = e;
        c.realizations = realizations;
        c.extinct_at.assign(static_cast<std::size_t>(levels), 0);
        for (int l : level) {
            if (l < 0)
                ++c.survived;
            else
                ++c.extinct_at[l];
        }
        out.push_back(std::move(c));
    }
    return out;
}

double tail_slope(const PercCurve& c)
{
    std::vector<double> m, lf;
    long beyond = 0;
    for (long k : c.extinct_at) beyond += k;
    for (std::size_t k = 0; k < c.extinct_at.size(); ++k) {
        beyond -= c.extinct_at[k];
        if (beyond > 0) {
            m.push_back(static_cast<double>(k));
            lf.push_back(std::log(static_cast<double>(beyond) / c.realizations));
        }
    }
    return ols_slope(m, lf);
}

// ---------------------------------------------------------------------------

int cmd_simulate(const Config& cfg, const RunOptions& opt)
{
    check_kind(cfg, "simulate");
    const TwoScaleGraph g(lattice_from(cfg));
    const ModelParams params = params_from(cfg);
    const InitSpec init = init_from(cfg, g);
    const double t_max = positive(cfg, "exp.t_max", 10.0);
    const auto snaps = cfg.get_doubles("exp.sample_times", {t_max});
    const double dt = positive(cfg, "exp.density_dt", t_max / 100.0);
    const bool dump_graph = cfg.get_bool("exp.dump_graph", false);
    const int reps = replicates_from(cfg, opt, 1);
    reject_unused(cfg);
    try {
        check_variant(params, g);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    const auto dir = prepare(opt);
    const std::string hash = cfg.hash();
    if (dump_graph) {
        std::ofstream os(dir / "graph.tsv", std::ios::binary);
        write_graph_tsv(os, g);
    }
    std::vector<SimulateResult> res(reps);
    parallel_for(res.size(), opt.threads, [&](std::size_t k) {
        res[k] = simulate(g, params, init, t_max, snaps, dt, k == 0 ? opt.seed : derive_seed(opt.seed, k));
    });
    for (int k = 0; k < reps; ++k) {
        const std::uint64_t seed = k == 0 ? opt.seed : derive_seed(opt.seed, k);
        CsvWriter csv(dir / ("density" + suffix(k) + ".csv"), hash, seed,
                      {"t", "n_empty", "n_1", "n_2", "hetero_pairs"});
        for (const auto& r : res[k].density) csv.row(r.t, r.n[0], r.n[1], r.n[2], r.hetero);
        for (std::size_t i = 0; i < res[k].snapshots.size(); ++i)
            write_snapshot(dir / ("snapshot_t" + fmt(res[k].snapshot_times[i]) + suffix(k) + ".txt"),
                           res[k].snapshots[i], g, res[k].snapshot_times[i], seed, hash);
    }
    return 0;
}

int cmd_extinction(const Config& cfg, const RunOptions& opt)
{
    check_kind(cfg, "extinction");
    const int d = static_cast<int>(cfg.get_int("graph.dim", 2));
    const auto sizes = cfg.get_ints("exp.sizes", {});
    const ModelParams params = params_from(cfg);
    const double t_max = positive(cfg, "exp.t_max", 1000.0);
    const double quick = cfg.get_double("exp.quick_cutoff", 5.0);
    const double long_cut = cfg.get_double("exp.long_cutoff", 50.0);
    const int reps = replicates_from(cfg, opt, 100);
    reject_unused(cfg);
    if (params.variant != Variant::finite_volume) throw ConfigError("extinction needs params.variant = finite_volume");
    if (sizes.empty()) throw ConfigError("exp.sizes must list at least one patch size");
    if (!(quick < long_cut)) throw ConfigError("exp.quick_cutoff must be below exp.long_cutoff");

    std::vector<TwoScaleGraph> graphs;
    for (long N : sizes) {
        try {
            graphs.emplace_back(LatticeSpec{d, static_cast<int>(N), 1, Boundary::killing});
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("exp.sizes: ") + e.what());
        }
    }
    std::vector<ExtinctionSample> all(graphs.size() * reps);
    parallel_for(all.size(), opt.threads, [&](std::size_t i) {
        const std::size_t c = i / reps, k = i % reps;
        all[i] = extinction_time(graphs[c], params, t_max, derive_seed(derive_seed(opt.seed, c), k));
    });

    const auto dir = prepare(opt);
    const std::string hash = cfg.hash();
    CsvWriter runs(dir / "extinction.csv", hash, opt.seed, {"N", "replicate", "tau", "censored"});
    CsvWriter sum(dir / "extinction_summary.csv", hash, opt.seed,
                  {"N", "runs", "censored", "mean", "q10", "q50", "q90", "quick_fraction", "middle_fraction",
                   "long_fraction", "long_median", "long_median_censored"});
    for (std::size_t c = 0; c < graphs.size(); ++c) {
        const std::vector<ExtinctionSample> s(all.begin() + c * reps, all.begin() + (c + 1) * reps);
        for (int k = 0; k < reps; ++k) runs.row(sizes[c], k, s[k].tau, s[k].censored);
        const auto x = summarize_extinction(static_cast<int>(sizes[c]), s, quick, long_cut);
        sum.row(x.N, x.runs, x.censored, x.mean, x.q10, x.q50, x.q90, x.quick_fraction, x.middle_fraction,
                x.long_fraction, x.long_median, x.long_median_censored);
    }
    return 0;
}

int cmd_couple(const Config& cfg, const RunOptions& opt)
{
    check_kind(cfg, "couple");
    const int d = static_cast<int>(cfg.get_int("graph.dim", 1));
    const int K = static_cast<int>(cfg.get_int("exp.K", 5));
    const auto Ls = cfg.get_ints("exp.L_values", {5});
    std::vector<Geometry> geos;
    for (const std::string name : {"e1_to_0", "0_to_e1", "e1_to_2e1"})
        if (cfg.get_bool("exp.geometry." + name, true)) geos.push_back(parse_geometry(name));
    ModelParams params = params_from(cfg);
    const int reps = replicates_from(cfg, opt, 100);
    const int inc_levels = static_cast<int>(cfg.get_int("exp.inclusion_levels", 0));
    const int inc_reps = static_cast<int>(cfg.get_int("exp.inclusion_replicates", 100));
    const double eps_cfg = cfg.get_double("exp.eps", -1.0);
    const int inv_reps = static_cast<int>(cfg.get_int("exp.invasion_replicates", 0));
    const double c = cfg.get_double("exp.c", 1.0);
    const double I_cap = positive(cfg, "exp.I_cap", 100.0);
    const double inv_t_max = positive(cfg, "exp.invasion_t_max", 4.0 * I_cap);
    reject_unused(cfg);
    if (params.variant != Variant::finite_volume) throw ConfigError("couple needs params.variant = finite_volume");
    if (Ls.empty()) throw ConfigError("exp.L_values must list at least one L");

    std::vector<ScaleHierarchy> hiers;
    std::vector<TwoScaleGraph> graphs;
    for (long L : Ls) {
        try {
            hiers.push_back(make_hierarchy(K, static_cast<int>(L), d));
            graphs.emplace_back(LatticeSpec{d, hiers.back().N, 1, Boundary::killing});
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("hierarchy: ") + e.what());
        }
    }
    for (Geometry geo : geos) {
        const auto [a, b] = geometry_boxes(geo, d);
        if (!hiers[0].interior_box(a) || !hiers[0].interior_box(b))
            throw ConfigError("geometry " + to_string(geo) + " needs a larger exp.K");
    }

    const std::size_t cells = hiers.size() * geos.size();
    std::vector<std::uint8_t> ok(cells * reps, 0);
    parallel_for(ok.size(), opt.threads, [&](std::size_t i) {
        const std::size_t cell = i / reps, k = i % reps;
        const std::size_t h = cell / geos.size(), gi = cell % geos.size();
        ok[i] = goodness_trial(graphs[h], hiers[h], params, geos[gi], derive_seed(derive_seed(opt.seed, cell), k));
    });

    const auto dir = prepare(opt);
    const std::string hash = cfg.hash();
    CsvWriter good(dir / "goodness.csv", hash, opt.seed, {"L", "N", "geometry", "trials", "successes", "p", "lo", "hi"});
    double p_min = 1.0;
    for (std::size_t cell = 0; cell < cells; ++cell) {
        Proportion pr;
        for (int k = 0; k < reps; ++k) {
            ++pr.trials;
            pr.successes += ok[cell * reps + k];
        }
        const std::size_t h = cell / geos.size();
        const auto [lo, hi] = pr.wilson();
        good.row(hiers[h].L, hiers[h].N, to_string(geos[cell % geos.size()]), pr.trials, pr.successes, pr.p(), lo, hi);
        if (h + 1 == hiers.size()) p_min = std::min(p_min, pr.p());
    }

    if (inc_levels > 0) {
        const double eps = eps_cfg >= 0.0 ? eps_cfg : 1.0 - p_min;
        std::vector<std::vector<InclusionRow>> rows(inc_reps);
        parallel_for(rows.size(), opt.threads, [&](std::size_t k) {
            rows[k] = inclusion_run(graphs.back(), hiers.back(), params, eps, inc_levels, static_cast<int>(k),
                                    derive_seed(derive_seed(opt.seed, cells), k));
        });
        CsvWriter inc(dir / "inclusion.csv", hash, opt.seed, {"replicate", "level", "n_wet", "n_good", "included"});
        long all_included = 0;
        for (const auto& rr : rows) {
            bool all = true;
            for (const auto& r : rr) {
                inc.row(r.replicate, r.level, r.n_wet, r.n_good, r.included);
                all = all && r.included;
            }
            all_included += all;
        }
        CsvWriter isum(dir / "inclusion_summary.csv", hash, opt.seed, {"L", "eps", "replicates", "inclusion_frequency"});
        isum.row(hiers.back().L, eps, inc_reps, static_cast<double>(all_included) / inc_reps);
    }

    if (inv_reps > 0) {
        const ScaleHierarchy& h = hiers.back();
        const double I = std::min(std::exp(c * K), I_cap);
        ModelParams mp = params;
        mp.variant = Variant::modified;
        const TwoScaleGraph g2(LatticeSpec{d, h.N, 2, Boundary::killing});
        std::vector<InvasionStats> st(inv_reps);
        parallel_for(st.size(), opt.threads, [&](std::size_t k) {
            st[k] = invasion_run(g2, mp, I, inv_t_max, derive_seed(derive_seed(opt.seed, cells + 1), k));
        });
        CsvWriter att(dir / "invasion.csv", hash, opt.seed, {"replicate", "i", "r", "s"});
        CsvWriter isum(dir / "invasion_summary.csv", hash, opt.seed,
                       {"replicate", "I", "attempts", "sigma", "censored", "center_occupation", "threshold"});
        for (int k = 0; k < inv_reps; ++k) {
            for (std::size_t i = 0; i < st[k].r.size(); ++i)
                att.row(k, i + 1, st[k].r[i], i < st[k].s.size() ? fmt(st[k].s[i]) : std::string("NA"));
            isum.row(k, I, st[k].r.size(), st[k].sigma ? fmt(*st[k].sigma) : std::string("NA"), !st[k].sigma,
                     st[k].center_occupation, 1.0 / K);
        }
    }
    return 0;
}

int cmd_coexist(const Config& cfg, const RunOptions& opt)
{
    check_kind(cfg, "coexist");
    LatticeSpec base;
    base.dim = static_cast<int>(cfg.get_int("graph.dim", 1));
    base.extent = static_cast<int>(cfg.get_int("graph.extent", 10));
    const std::string b = cfg.get_string("graph.boundary", "periodic");
    if (b != "periodic" && b != "killing") throw ConfigError("graph.boundary must be periodic or killing");
    base.boundary = b == "periodic" ? Boundary::periodic : Boundary::killing;
    auto Ns = cfg.get_ints("exp.N_values", {15});
    const auto deltas = cfg.get_doubles("exp.delta1_values", {cfg.get_double("params.delta1", 1.0)});
    const bool control = cfg.get_bool("exp.control", true);
    const bool centers_only = cfg.get_bool("exp.init_ones_at_centers_only", false);
    ModelParams params = params_from(cfg);
    const double t_max = positive(cfg, "exp.t_max", 2000.0);
    const int reps = replicates_from(cfg, opt, 40);
    std::vector<TwoScaleGraph> graphs;
    if (control && std::find(Ns.begin(), Ns.end(), 1L) == Ns.end()) Ns.insert(Ns.begin(), 1L);
    for (long N : Ns) {
        LatticeSpec s = base;
        s.patch_size = static_cast<int>(N);
        try {
            graphs.emplace_back(s);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("exp.N_values: ") + e.what());
        }
    }
    const InitSpec init = init_from(cfg, graphs.front());
    reject_unused(cfg);
    if (params.variant != Variant::plain) throw ConfigError("coexist needs params.variant = plain");
    if (init.kind == InitSpec::Kind::explicit_states) throw ConfigError("coexist runs several graphs; use a product init");

    const std::size_t cells = graphs.size() * deltas.size();
    std::vector<CoexistRun> runs(cells * reps);
    parallel_for(runs.size(), opt.threads, [&](std::size_t i) {
        const std::size_t cell = i / reps, k = i % reps;
        ModelParams p = params;
        p.delta1 = deltas[cell % deltas.size()];
        runs[i] = coexist_run(graphs[cell / deltas.size()], p, init, t_max, derive_seed(derive_seed(opt.seed, cell), k),
                              centers_only);
    });

    const auto dir = prepare(opt);
    const std::string hash = cfg.hash();
    CsvWriter out(dir / "coexist.csv", hash, opt.seed,
                  {"N", "delta1", "replicate", "n1_0", "n2_0", "n1_mid", "n2_mid", "n1_end", "n2_end", "both"});
    CsvWriter sum(dir / "coexist_summary.csv", hash, opt.seed,
                  {"N", "delta1", "replicates", "both_fraction", "two_halved_fraction", "density1", "density2"});
    for (std::size_t cell = 0; cell < cells; ++cell) {
        const long N = Ns[cell / deltas.size()];
        const double d1 = deltas[cell % deltas.size()];
        const double sites = static_cast<double>(graphs[cell / deltas.size()].num_vertices());
        long both = 0, halved = 0;
        double rho1 = 0.0, rho2 = 0.0;
        for (int k = 0; k < reps; ++k) {
            const CoexistRun& r = runs[cell * reps + k];
            out.row(N, d1, k, r.initial[1], r.initial[2], r.mid[1], r.mid[2], r.end[1], r.end[2], r.both_present());
            both += r.both_present();
            halved += 2 * r.end[2] < r.initial[2];
            rho1 += r.end[1] / sites / reps;
            rho2 += r.end[2] / sites / reps;
        }
        sum.row(N, d1, reps, static_cast<double>(both) / reps, static_cast<double>(halved) / reps, rho1, rho2);
    }
    return 0;
}

int cmd_dualstats(const Config& cfg, const RunOptions& opt)
{
    check_kind(cfg, "dualstats");
    const TwoScaleGraph g(lattice_from(cfg));
    const ModelParams params = params_from(cfg);
    const double t_window = positive(cfg, "exp.t_window", 60.0);
    const double S = positive(cfg, "exp.horizon_S", 10.0);
    const double probe_dt = positive(cfg, "exp.probe_dt", 1.0);
    Coord q(g.dim(), 0);
    if (cfg.has("exp.query")) {
        const auto v = cfg.get_ints("exp.query", {});
        if (static_cast<int>(v.size()) != g.dim()) throw ConfigError("exp.query needs graph.dim coordinates");
        for (int i = 0; i < g.dim(); ++i) q[i] = static_cast<int>(v[i]);
    }
    const int reps = replicates_from(cfg, opt, 1000);
    reject_unused(cfg);
    if (params.delta1 != params.delta2) throw ConfigError("dualstats needs params.delta1 = params.delta2");
    if (!(S < t_window)) throw ConfigError("exp.horizon_S must be below exp.t_window");
    VertexId x;
    try {
        check_variant(params, g);
        x = vertex_centered(g, q);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }

    std::vector<double> probes;
    for (long k = 0; k * probe_dt <= t_window - S; ++k) probes.push_back(k * probe_dt);
    std::vector<DualTrace> tr(reps);
    parallel_for(tr.size(), opt.threads,
                 [&](std::size_t k) { tr[k] = dual_trace(g, params, x, t_window, S, probes, derive_seed(opt.seed, k)); });

    std::vector<std::vector<double>> sig, ys;
    std::vector<double> ps, rs;
    long lived = 0, truncated = 0;
    for (const auto& t : tr) {
        truncated += t.truncated;
        for (std::size_t i = 0; i < t.radius.size(); ++i) {
            ps.push_back(probes[i]);
            rs.push_back(t.radius[i]);
        }
        if (!t.root_lives) continue;
        ++lived;
        sig.push_back(t.tau);
        ys.emplace_back(t.y.begin(), t.y.end());
    }
    const IncrementStats s_sig = increment_stats(sig);
    const IncrementStats s_y = increment_stats(ys);

    const auto dir = prepare(opt);
    const std::string hash = cfg.hash();
    CsvWriter rows(dir / "renewals.csv", hash, opt.seed, {"tree", "n", "tau", "x", "center"});
    for (int k = 0; k < reps; ++k) {
        std::size_t yi = 0;
        for (std::size_t n = 0; n < tr[k].tau.size(); ++n) {
            const bool at_center = n > 0 && yi < tr[k].y_tau.size() && tr[k].y_tau[yi] == tr[k].tau[n];
            yi += at_center;
            rows.row(k, n, tr[k].tau[n], tr[k].x[n], at_center);
        }
    }
    CsvWriter sum(dir / "dualstats_summary.csv", hash, opt.seed, {"quantity", "value"});
    sum.row("trees", reps);
    sum.row("root_lives", lived);
    sum.row("truncated", truncated);
    sum.row("degenerate_center_filter", g.patch_size() == 1);
    sum.row("sigma_increments", s_sig.n);
    sum.row("sigma_ks_D", s_sig.split_half.statistic);
    sum.row("sigma_ks_p", s_sig.split_half.p_value);
    sum.row("sigma_lag1", s_sig.lag1);
    sum.row("sigma_lag1_se", s_sig.lag1_se);
    sum.row("y_increments", s_y.n);
    sum.row("y_ks_D", s_y.split_half.statistic);
    sum.row("y_ks_p", s_y.split_half.p_value);
    sum.row("y_lag1", s_y.lag1);
    sum.row("y_lag1_se", s_y.lag1_se);
    sum.row("radius_slope", ols_slope(ps, rs));
    return 0;
}

int cmd_perc(const Config& cfg, const RunOptions& opt)
{
    check_kind(cfg, "perc");
    PercLattice lat;
    lat.d = static_cast<int>(cfg.get_int("exp.d", 1));
    lat.K = static_cast<int>(cfg.get_int("exp.K", 0));
    const auto eps = cfg.get_doubles("exp.eps_values", {0.1, 0.2, 0.3, 0.4});
    const int levels = static_cast<int>(cfg.get_int("exp.levels", 100));
    const int reps = replicates_from(cfg, opt, 1000);
    reject_unused(cfg);
    if (lat.d < 1) throw ConfigError("exp.d must be >= 1");
    if (lat.K < 0 || (lat.K > 0 && lat.K % 2 == 0)) throw ConfigError("exp.K must be 0 or odd");
    if (levels < 1) throw ConfigError("exp.levels must be >= 1");
    for (double e : eps)
        if (e < 0.0 || e > 1.0) throw ConfigError("exp.eps_values must lie in [0, 1]");

    const auto curves = perc_curves(lat, eps, levels, reps, opt.seed, opt.threads);
    const auto dir = prepare(opt);
    const std::string hash = cfg.hash();
    CsvWriter sum(dir / "perc.csv", hash, opt.seed, {"eps", "realizations", "survived", "frequency", "tail_slope"});
    CsvWriter ext(dir / "perc_extinction.csv", hash, opt.seed, {"eps", "level", "count"});
    for (const auto& c : curves) {
        const double slope = tail_slope(c);
        sum.row(c.eps, c.realizations, c.survived, static_cast<double>(c.survived) / c.realizations,
                std::isfinite(slope) ? fmt(slope) : std::string("NA"));
        for (std::size_t l = 0; l < c.extinct_at.size(); ++l)
            if (c.extinct_at[l]) ext.row(c.eps, l, c.extinct_at[l]);
    }
    return 0;
}

int run_command(const std::string& name, const Config& cfg, const RunOptions& opt)
{
    if (name == "simulate") return cmd_simulate(cfg, opt);
    if (name == "extinction") return cmd_extinction(cfg, opt);
    if (name == "couple") return cmd_couple(cfg, opt);
    if (name == "coexist") return cmd_coexist(cfg, opt);
    if (name == "dualstats") return cmd_dualstats(cfg, opt);
    if (name == "perc") return cmd_perc(cfg, opt);
    throw ConfigError("unknown command " + name);
}

} // namespace tscp
