#include "tscp/percolation.hpp"

#include "tscp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace tscp {

namespace {

bool parity_ok(const Coord& z, int n)
{
    long s = n;
    for (int zi : z) s += zi;
    return s % 2 == 0;
}

} // namespace

bool PercLattice::contains(const Coord& z, int n) const
{
    if (static_cast<int>(z.size()) != d || n < 0) return false;
    if (!parity_ok(z, n)) return false;
    if (restricted())
        for (int zi : z)
            if (2 * std::abs(zi) > K - 1) return false;
    return true;
}

double site_uniform(std::uint64_t seed, const Coord& z, int n)
{
    std::uint64_t h = mix64(seed ^ 0x5be0cd19137e2179ULL);
    h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(n)));
    for (int zi : z) h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(zi)));
    return to_unit(h);
}

PercField::PercField(const PercLattice& lat, int levels, int radius) : lat_(lat), levels_(levels), radius_(radius)
{
    if (lat.d < 1) throw std::invalid_argument("dimension must be >= 1");
    if (lat.restricted() && lat.K % 2 == 0) throw std::invalid_argument("K must be odd");
    if (levels < 1 || radius < 0) throw std::invalid_argument("bad field extent");
    box_ = 1;
    for (int i = 0; i < lat.d; ++i) box_ *= static_cast<std::size_t>(2 * radius + 1);
    open_.assign(levels, std::vector<std::uint8_t>(box_, 0));
}

PercField PercField::iid(const PercLattice& lat, double eps, int levels, std::uint64_t seed, int radius)
{
    if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in [0, 1]");
    if (radius < 0) radius = lat.restricted() ? (lat.K - 1) / 2 : levels;
    return from(lat, levels, radius, [&](const Coord& z, int n) { return site_uniform(seed, z, n) >= eps; });
}

PercField PercField::from(const PercLattice& lat, int levels, int radius,
                          const std::function<bool(const Coord&, int)>& open)
{
    PercField f(lat, levels, radius);
    for (int n = 0; n < levels; ++n)
        for (std::size_t i = 0; i < f.box_; ++i) {
            const Coord z = f.coord(i);
            f.open_[n][i] = lat.contains(z, n) && open(z, n);
        }
    return f;
}

bool PercField::in_box(const Coord& z) const
{
    if (static_cast<int>(z.size()) != lat_.d) return false;
    return std::all_of(z.begin(), z.end(), [this](int zi) { return std::abs(zi) <= radius_; });
}

std::size_t PercField::index(const Coord& z) const
{
    std::size_t i = 0, mult = 1;
    for (int k = 0; k < lat_.d; ++k) {
        i += static_cast<std::size_t>(z[k] + radius_) * mult;
        mult *= static_cast<std::size_t>(2 * radius_ + 1);
    }
    return i;
}

Coord PercField::coord(std::size_t i) const
{
    Coord z(lat_.d);
    const std::size_t w = static_cast<std::size_t>(2 * radius_ + 1);
    for (int k = 0; k < lat_.d; ++k) {
        z[k] = static_cast<int>(i % w) - radius_;
        i /= w;
    }
    return z;
}

bool PercField::open(const Coord& z, int n) const
{
    if (n < 0 || n >= levels_ || !in_box(z)) return false;
    return open_[n][index(z)] != 0;
}

void PercField::set_open(const Coord& z, int n, bool v)
{
    if (n < 0 || n >= levels_ || !in_box(z)) throw std::out_of_range("site outside field");
    if (v && !lat_.contains(z, n)) throw std::invalid_argument("site not in lattice");
    open_[n][index(z)] = v;
}

namespace {

void check_w0(const PercField& field, const std::vector<Coord>& w0, int levels)
{
    if (levels < 1 || levels > field.levels()) throw std::invalid_argument("levels exceed field");
    for (const Coord& z : w0)
        if (static_cast<int>(z.size()) != field.lattice().d || !parity_ok(z, 0))
            throw std::invalid_argument("W0 site violates parity");
}

} // namespace

WetSets wet_sets(const PercField& field, const std::vector<Coord>& w0, int levels)
{
    check_w0(field, w0, levels);
    const int d = field.lattice().d;
    const std::size_t box = field.box_size();
    const long w = 2L * field.radius() + 1;
    std::vector<long> stride(d);
    for (int k = 0; k < d; ++k) stride[k] = k == 0 ? 1 : stride[k - 1] * w;

    std::vector<std::uint8_t> cur(box, 0), next(box, 0);
    for (const Coord& z : w0)
        if (field.open(z, 0)) cur[field.index(z)] = 1;

    WetSets out;
    out.levels.resize(levels);
    for (int n = 0;; ++n) {
        auto& level = out.levels[n];
        for (std::size_t i = 0; i < box; ++i)
            if (cur[i]) level.push_back(field.coord(i));
        std::sort(level.begin(), level.end());
        if (level.empty() && !out.extinction) out.extinction = n;
        if (n + 1 >= levels) break;

        const auto& open = field.level(n + 1);
        const long nbox = static_cast<long>(box);
#pragma omp parallel for schedule(static)
        for (long i = 0; i < nbox; ++i) {
            std::uint8_t wet = 0;
            if (open[i]) {
                long rem = i;
                for (int k = 0; k < d && !wet; ++k) {
                    const long c = rem % w;
                    rem /= w;
                    if (c > 0 && cur[i - stride[k]]) wet = 1;
                    if (c + 1 < w && cur[i + stride[k]]) wet = 1;
                }
            }
            next[i] = wet;
        }
        std::swap(cur, next);
    }
    return out;
}

WetSets wet_sets_reference(const PercField& field, const std::vector<Coord>& w0, int levels)
{
    check_w0(field, w0, levels);
    std::set<Coord> cur;
    for (const Coord& z : w0)
        if (field.open(z, 0)) cur.insert(z);
    WetSets out;
    for (int n = 0; n < levels; ++n) {
        out.levels.emplace_back(cur.begin(), cur.end());
        if (cur.empty() && !out.extinction) out.extinction = n;
        std::set<Coord> next;
        for (const Coord& z : cur)
            for (std::size_t k = 0; k < z.size(); ++k)
                for (int step : {-1, 1}) {
                    Coord y = z;
                    y[k] += step;
                    if (field.open(y, n + 1)) next.insert(y);
                }
        cur = std::move(next);
    }
    return out;
}

CouplingReport restricted_coupling_check(double eps, int K, int levels, std::uint64_t seed, int d)
{
    if (K < 1 || K % 2 == 0) throw std::invalid_argument("K must be odd and >= 1");
    const PercLattice full{d, 0}, restricted{d, K};
    const PercField f = PercField::iid(full, eps, levels, seed);
    const PercField fk = PercField::iid(restricted, eps, levels, seed);
    const std::vector<Coord> w0{Coord(d, 0)};
    const WetSets w = wet_sets(f, w0, levels);
    const WetSets wk = wet_sets(fk, w0, levels);

    CouplingReport rep;
    const PercLattice inner{d, K - 2};
    for (int n = 0; n < levels; ++n) {
        const auto& a = w.levels[n];
        const auto& b = wk.levels[n];
        if (!std::includes(a.begin(), a.end(), b.begin(), b.end())) rep.dominated = false;
        if (a != b && !rep.differed) {
            rep.differed = true;
            rep.first_difference = n;
        }
        for (const Coord& z : b)
            if (K < 3 || !inner.contains(z, n)) rep.escaped = true;
    }
    rep.implication = !rep.differed || rep.escaped;
    return rep;
}

VertexId vertex_centered(const TwoScaleGraph& g, const Coord& x)
{
    Coord y = x;
    for (int& yi : y) yi += (g.patch_size() - 1) / 2;
    return g.vertex_at(y);
}

bool is_good(const Configuration& cfg, const TwoScaleGraph& g, const ScaleHierarchy& hier, const Coord& z)
{
    if (!hier.interior_box(z)) return false;
    for (const Coord& x : hier.box_sites(z)) {
        if (hier.in_core(x)) continue;
        if (cfg.states[vertex_centered(g, x)] == 1) return false;
    }
    for (const auto& box : hier.sub_boxes(z)) {
        const bool has2 = std::any_of(box.begin(), box.end(),
                                      [&](const Coord& x) { return cfg.states[vertex_centered(g, x)] == 2; });
        if (!has2) return false;
    }
    return true;
}

std::vector<Coord> good_sites(const Configuration& cfg, const TwoScaleGraph& g, const ScaleHierarchy& hier, int n)
{
    if (g.patch_size() != hier.N || g.dim() != hier.dim || g.num_patches() != 1)
        throw std::invalid_argument("hierarchy does not match the single-patch graph");
    if (cfg.states.size() != g.num_vertices()) throw std::invalid_argument("configuration size mismatch");
    const PercLattice lat{hier.dim, hier.K};
    std::vector<Coord> out;
    for (const Coord& z : hier.all_boxes())
        if (lat.contains(z, n) && is_good(cfg, g, hier, z)) out.push_back(z);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

std::vector<std::vector<Delta>> center_deltas(const Trajectory& tr, const TwoScaleGraph& g)
{
    std::vector<std::vector<Delta>> out(g.num_patches());
    for (const Delta& d : tr.deltas)
        if (g.is_center(d.v)) out[g.patch_id(d.v)].push_back(d);
    return out;
}

} // namespace

std::vector<std::vector<Coord>> stable_sites_type2(const Trajectory& tr, const TwoScaleGraph& g, double I, int K,
                                                   int levels)
{
    if (!(I > 0) || K < 1 || levels < 1) throw std::invalid_argument("bad stability parameters");
    if (levels * I > tr.t_end + 1e-9) throw std::out_of_range("horizon too short");
    const auto per = center_deltas(tr, g);
    const PercLattice lat{g.dim(), 0};
    std::vector<std::vector<Coord>> out(levels);
    for (int n = 0; n < levels; ++n) {
        for (PatchId p = 0; p < g.num_patches(); ++p) {
            const Coord z = g.patch_coords(p);
            if (!lat.contains(z, n)) continue;
            const VertexId c = g.center_of_patch(p);
            const double occ = occupation_time(tr.initial.states[c], per[p], tr.t_end, n * I, I, 2);
            if (occ >= I / K) out[n].push_back(z);
        }
        std::sort(out[n].begin(), out[n].end());
    }
    return out;
}

std::vector<std::vector<Coord>> stable_sites_type1(const Trajectory& tr, const TwoScaleGraph& g, double J, int levels)
{
    if (!(J > 0) || levels < 1) throw std::invalid_argument("bad stability parameters");
    if ((levels - 1) * J > tr.t_end + 1e-9) throw std::out_of_range("horizon too short");
    const auto per = center_deltas(tr, g);
    const PercLattice lat{g.dim(), 0};
    std::vector<std::vector<Coord>> out(levels);
    for (int n = 0; n < levels; ++n) {
        for (PatchId p = 0; p < g.num_patches(); ++p) {
            const Coord z = g.patch_coords(p);
            if (!lat.contains(z, n)) continue;
            State s = tr.initial.states[g.center_of_patch(p)];
            for (const Delta& d : per[p]) {
                if (d.t > n * J) break;
                s = d.to;
            }
            if (s == 1) out[n].push_back(z);
        }
        std::sort(out[n].begin(), out[n].end());
    }
    return out;
}

InclusionReport inclusion_check(const std::vector<std::vector<Coord>>& w, const std::vector<std::vector<Coord>>& x)
{
    if (w.size() != x.size()) throw std::invalid_argument("level mismatch");
    InclusionReport rep;
    for (std::size_t n = 0; n < w.size(); ++n) {
        std::vector<Coord> a = w[n], b = x[n];
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        const bool inc = std::includes(b.begin(), b.end(), a.begin(), a.end());
        rep.included.push_back(inc);
        if (!inc && rep.first_violation < 0) rep.first_violation = static_cast<int>(n);
    }
    return rep;
}

} // namespace tscp
