#include "tscp/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tscp {

std::string to_string(Variant v)
{
    switch (v) {
    case Variant::plain: return "plain";
    case Variant::finite_volume: return "finite_volume";
    case Variant::modified: return "modified";
    }
    return "?";
}

Variant parse_variant(const std::string& s)
{
    if (s == "plain") return Variant::plain;
    if (s == "finite_volume") return Variant::finite_volume;
    if (s == "modified") return Variant::modified;
    throw std::invalid_argument("unknown variant: " + s);
}

void ModelParams::validate() const
{
    for (double r : {B1, B2, beta1, beta2, delta1, delta2})
        if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("rates must be finite and >= 0");
}

void check_variant(const ModelParams& params, const TwoScaleGraph& g)
{
    params.validate();
    if (params.variant == Variant::finite_volume &&
        (g.num_patches() != 1 || g.spec().boundary != Boundary::killing))
        throw std::invalid_argument("finite_volume variant needs a single-patch graph with killing boundary");
}

std::array<std::size_t, 3> Configuration::counts() const
{
    std::array<std::size_t, 3> c{};
    for (State s : states) ++c[s];
    return c;
}

void InitSpec::validate() const
{
    if (kind == Kind::product) {
        if (p0 < 0 || p1 < 0 || p2 < 0) throw std::invalid_argument("product weights must be >= 0");
        if (std::abs(p0 + p1 + p2 - 1.0) > 1e-9) throw std::invalid_argument("product weights must sum to 1");
    }
    if (exception_state > 2) throw std::invalid_argument("state must be 0, 1 or 2");
    for (State s : states)
        if (s > 2) throw std::invalid_argument("state must be 0, 1 or 2");
}

Configuration make_initial(const InitSpec& init, const TwoScaleGraph& g, Rng& rng)
{
    init.validate();
    Configuration cfg;
    const std::size_t n = g.num_vertices();
    switch (init.kind) {
    case InitSpec::Kind::product:
        cfg.states.resize(n);
        for (auto& s : cfg.states) {
            const double u = rng.uniform();
            s = u < init.p1 ? 1 : (u < init.p1 + init.p2 ? 2 : 0);
        }
        break;
    case InitSpec::Kind::single2_at_center: {
        cfg.states.assign(n, 0);
        const Coord z = init.patch.empty() ? Coord(g.dim(), 0) : init.patch;
        cfg.states[g.center_of_patch(g.patch_at(z))] = 2;
        break;
    }
    case InitSpec::Kind::all1_except:
        cfg.states.assign(n, 1);
        for (VertexId v : init.exceptions) {
            if (v >= n) throw std::out_of_range("exception vertex out of range");
            cfg.states[v] = init.exception_state;
        }
        break;
    case InitSpec::Kind::explicit_states:
        if (init.states.size() != n) throw std::invalid_argument("explicit configuration size mismatch");
        cfg.states = init.states;
        break;
    }
    return cfg;
}

Rates transition_rates(VertexId x, const Configuration& cfg, const ModelParams& p, const TwoScaleGraph& g)
{
    check_variant(p, g);
    if (cfg.states.size() != g.num_vertices()) throw std::invalid_argument("configuration size mismatch");
    if (x >= g.num_vertices()) throw std::out_of_range("vertex out of range");

    Rates r;
    const State s = cfg.states[x];
    if (s != 0) {
        r.to0 = p.delta(s);
        return r;
    }
    int s1 = 0, s2 = 0, l1 = 0, l2 = 0;
    for (VertexId y : g.short_neighbors(x)) {
        s1 += cfg.states[y] == 1;
        s2 += cfg.states[y] == 2;
    }
    for (VertexId y : g.long_neighbors(x)) {
        l1 += cfg.states[y] == 1;
        l2 += cfg.states[y] == 2;
    }
    r.to1 = p.beta1 * s1;
    r.to2 = p.beta2 * s2;
    const double spont = 2.0 * g.dim() * p.B1;
    switch (p.variant) {
    case Variant::plain:
        r.to1 += p.B1 * l1;
        r.to2 += p.B2 * l2;
        break;
    case Variant::finite_volume:
        if (g.is_center(x)) r.to1 += spont;
        break;
    case Variant::modified: {
        if (g.is_center(x)) r.to1 += spont;
        bool void_of_2 = true;
        for (VertexId w : g.patch_members(g.patch_id(x))) void_of_2 = void_of_2 && cfg.states[w] != 2;
        if (void_of_2) r.to2 += p.B2 * l2;
        break;
    }
    }
    return r;
}

Simulator::Simulator(const TwoScaleGraph& g, const ModelParams& params, Configuration init, std::uint64_t seed)
    : g_(g), params_(params), cfg_(std::move(init)), rng_(seed)
{
    check_variant(params_, g_);
    const std::size_t n = g_.num_vertices();
    if (cfg_.states.size() != n) throw std::invalid_argument("configuration size mismatch");
    for (State s : cfg_.states)
        if (s > 2) throw std::invalid_argument("state must be 0, 1 or 2");

    spont1_ = params_.variant == Variant::plain ? 0.0 : 2.0 * g_.dim() * params_.B1;
    short_cnt_.assign(n, {0, 0});
    long_cnt_.assign(n, {0, 0});
    patch2_.assign(g_.num_patches(), 0);
    counts_ = cfg_.counts();
    for (VertexId v = 0; v < n; ++v) {
        const State s = cfg_.states[v];
        if (s == 0) continue;
        for (VertexId y : g_.short_neighbors(v)) ++short_cnt_[y][s - 1];
        for (VertexId y : g_.long_neighbors(v)) ++long_cnt_[y][s - 1];
        if (s == 2) ++patch2_[g_.patch_id(v)];
    }
    while (cap_ < n) cap_ <<= 1;
    tree_.assign(2 * cap_, 0.0);
    for (VertexId v = 0; v < n; ++v) {
        const Rates r = rates(v);
        tree_[cap_ + v] = r.to0 + r.to1 + r.to2;
    }
    for (std::size_t i = cap_ - 1; i >= 1; --i) tree_[i] = tree_[2 * i] + tree_[2 * i + 1];
}

Rates Simulator::rates(VertexId v) const
{
    Rates r;
    const State s = cfg_.states[v];
    if (s != 0) {
        r.to0 = params_.delta(s);
        return r;
    }
    const auto& sc = short_cnt_[v];
    const auto& lc = long_cnt_[v];
    r.to1 = params_.beta1 * sc[0];
    r.to2 = params_.beta2 * sc[1];
    switch (params_.variant) {
    case Variant::plain:
        r.to1 += params_.B1 * lc[0];
        r.to2 += params_.B2 * lc[1];
        break;
    case Variant::finite_volume:
        if (g_.is_center(v)) r.to1 += spont1_;
        break;
    case Variant::modified:
        if (g_.is_center(v)) r.to1 += spont1_;
        if (patch2_[g_.patch_id(v)] == 0) r.to2 += params_.B2 * lc[1];
        break;
    }
    return r;
}

void Simulator::refresh(VertexId v)
{
    const Rates r = rates(v);
    std::size_t i = cap_ + v;
    tree_[i] = r.to0 + r.to1 + r.to2;
    for (i >>= 1; i >= 1; i >>= 1) tree_[i] = tree_[2 * i] + tree_[2 * i + 1];
}

void Simulator::apply(VertexId v, State to)
{
    const State from = cfg_.states[v];
    cfg_.states[v] = to;
    --counts_[from];
    ++counts_[to];
    const State occ = from != 0 ? from : to;
    const int delta = to != 0 ? 1 : -1;
    for (VertexId y : g_.short_neighbors(v)) short_cnt_[y][occ - 1] += delta;
    for (VertexId y : g_.long_neighbors(v)) long_cnt_[y][occ - 1] += delta;

    refresh(v);
    for (VertexId y : g_.short_neighbors(v))
        if (cfg_.states[y] == 0) refresh(y);
    for (VertexId y : g_.long_neighbors(v))
        if (cfg_.states[y] == 0) refresh(y);
    if (occ == 2) {
        const PatchId p = g_.patch_id(v);
        const std::uint32_t before = patch2_[p];
        patch2_[p] += delta;
        if (params_.variant == Variant::modified && (before == 0 || patch2_[p] == 0)) {
            const VertexId c = g_.center_of_patch(p);
            if (cfg_.states[c] == 0) refresh(c);
        }
    }
    ++events_;
    if (observer_) observer_({cfg_.time, v, from, to});
}

bool Simulator::step(double t_stop)
{
    const double total = tree_[1];
    if (!(total > 0.0)) {
        cfg_.time = std::max(cfg_.time, t_stop);
        return false;
    }
    const double t_next = cfg_.time + rng_.exponential(total);
    if (t_next > t_stop) {
        cfg_.time = t_stop;
        return false;
    }
    cfg_.time = t_next;

    std::size_t i;
    do {
        double u = rng_.uniform() * total;
        i = 1;
        while (i < cap_) {
            const double left = tree_[2 * i];
            if (u < left) {
                i = 2 * i;
            } else {
                u -= left;
                i = 2 * i + 1;
            }
        }
    } while (!(tree_[i] > 0.0));
    const VertexId v = static_cast<VertexId>(i - cap_);

    if (cfg_.states[v] != 0) {
        apply(v, 0);
    } else {
        const Rates r = rates(v);
        apply(v, rng_.uniform() * (r.to1 + r.to2) < r.to1 ? 1 : 2);
    }
    return true;
}

void Simulator::advance_to(double t)
{
    while (step(t)) {
    }
}

Configuration Trajectory::state_at(double t) const
{
    if (t < initial.time || t > t_end) throw std::out_of_range("time outside trajectory");
    Configuration c = initial;
    for (const Delta& d : deltas) {
        if (d.t > t) break;
        c.states[d.v] = d.to;
    }
    c.time = t;
    return c;
}

Trajectory run_gillespie(const InitSpec& init, const ModelParams& params, const TwoScaleGraph& g, double t_max,
                         std::uint64_t seed, const std::vector<double>& sample_times, bool keep_deltas)
{
    if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be > 0");
    Rng init_rng(derive_seed(seed, ~std::uint64_t{0}));
    Trajectory tr;
    tr.initial = make_initial(init, g, init_rng);
    Simulator sim(g, params, tr.initial, seed);
    if (keep_deltas) sim.set_observer([&tr](const Delta& d) { tr.deltas.push_back(d); });

    std::vector<double> times = sample_times;
    std::sort(times.begin(), times.end());
    for (double t : times) {
        if (t < 0.0 || t > t_max) throw std::invalid_argument("sample time outside [0, t_max]");
        sim.advance_to(t);
        tr.sample_times.push_back(t);
        tr.samples.push_back(sim.config());
    }
    sim.advance_to(t_max);
    tr.t_end = t_max;
    tr.events = sim.events();
    return tr;
}

double occupation_time(State initial, const std::vector<Delta>& deltas, double horizon, double s, double len, State k)
{
    if (s < 0.0 || len < 0.0 || s + len > horizon) throw std::out_of_range("window exceeds horizon");
    const double lo = s, hi = s + len;
    double total = 0.0;
    double seg_start = 0.0;
    State cur = initial;
    auto add = [&](double a, double b) {
        const double x = std::max(a, lo), y = std::min(b, hi);
        if (y > x) total += y - x;
    };
    for (const Delta& d : deltas) {
        if (d.t >= hi) break;
        if (cur == k) add(seg_start, d.t);
        cur = d.to;
        seg_start = d.t;
    }
    if (cur == k) add(seg_start, hi);
    return total;
}

double occupation_time(const Trajectory& tr, VertexId x, double s, double len, State k)
{
    if (x >= tr.initial.states.size()) throw std::out_of_range("vertex out of range");
    std::vector<Delta> mine;
    for (const Delta& d : tr.deltas)
        if (d.v == x) mine.push_back(d);
    return occupation_time(tr.initial.states[x], mine, tr.t_end, s, len, k);
}

std::size_t hetero_pairs(const Configuration& cfg, const TwoScaleGraph& g)
{
    std::size_t n = 0;
    for (const Edge& e : g.edges()) {
        const State a = cfg.states[e.a], b = cfg.states[e.b];
        n += (a == 1 && b == 2) || (a == 2 && b == 1);
    }
    return n;
}

} // namespace tscp
