#include "tscp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace tscp {

namespace {

int floor_div(int a, int b)
{
    int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

int wrap(int a, int m)
{
    int r = a % m;
    return r < 0 ? r + m : r;
}

template <class F>
void for_each_in_box(const Coord& lo, const Coord& hi, F&& f)
{
    const std::size_t d = lo.size();
    for (std::size_t i = 0; i < d; ++i)
        if (lo[i] > hi[i]) return;
    Coord x = lo;
    while (true) {
        f(x);
        std::size_t i = 0;
        while (i < d) {
            if (x[i] < hi[i]) {
                ++x[i];
                break;
            }
            x[i] = lo[i];
            ++i;
        }
        if (i == d) return;
    }
}

} // namespace

void LatticeSpec::validate() const
{
    if (dim < 1) throw std::invalid_argument("lattice dimension must be >= 1");
    if (patch_size < 1) throw std::invalid_argument("patch size N must be >= 1");
    if (patch_size % 2 == 0) throw std::invalid_argument("patch size N must be odd");
    if (extent < 1) throw std::invalid_argument("extent must be >= 1");
    double n = 1.0;
    for (int i = 0; i < dim; ++i) n *= side();
    if (n > 4.0e9) throw std::invalid_argument("lattice too large");
}

bool crosses_hyperplane(const Coord& a, const Coord& b, int patch_size)
{
    if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
    int axis = -1;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == b[i]) continue;
        if (axis >= 0 || std::abs(a[i] - b[i]) != 1)
            throw std::invalid_argument("points are not lattice neighbours");
        axis = static_cast<int>(i);
    }
    if (axis < 0) throw std::invalid_argument("points are not lattice neighbours");
    // Segment midpoint, in doubled units, must equal N + 2jN after shifting the
    // patch center to the origin; equivalently a + b + 1 is a multiple of 2N.
    const int s = a[axis] + b[axis] + 1;
    return wrap(s, 2 * patch_size) == 0;
}

Coord patch_of(const Coord& x, const LatticeSpec& spec)
{
    if (static_cast<int>(x.size()) != spec.dim) throw std::invalid_argument("dimension mismatch");
    Coord z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        int xi = x[i];
        if (xi < 0 || xi >= spec.side()) {
            if (spec.boundary == Boundary::killing) throw std::out_of_range("vertex outside window");
            xi = wrap(xi, spec.side());
        }
        z[i] = xi / spec.patch_size;
    }
    return z;
}

Coord center_of(const Coord& z, const LatticeSpec& spec)
{
    if (static_cast<int>(z.size()) != spec.dim) throw std::invalid_argument("dimension mismatch");
    Coord c(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        int zi = z[i];
        if (zi < 0 || zi >= spec.extent) {
            if (spec.boundary == Boundary::killing) throw std::out_of_range("patch outside window");
            zi = wrap(zi, spec.extent);
        }
        c[i] = zi * spec.patch_size + (spec.patch_size - 1) / 2;
    }
    return c;
}

TwoScaleGraph::TwoScaleGraph(const LatticeSpec& spec) : spec_(spec)
{
    spec_.validate();
    const int d = spec_.dim;
    const int side = spec_.side();
    const int n_sz = spec_.patch_size;
    const int ext = spec_.extent;
    const bool periodic = spec_.boundary == Boundary::periodic;

    num_vertices_ = 1;
    std::size_t n_patches = 1;
    for (int i = 0; i < d; ++i) {
        num_vertices_ *= static_cast<std::size_t>(side);
        n_patches *= static_cast<std::size_t>(ext);
    }

    std::vector<std::size_t> stride(d), pstride(d);
    for (int i = 0; i < d; ++i) {
        stride[i] = i == 0 ? 1 : stride[i - 1] * side;
        pstride[i] = i == 0 ? 1 : pstride[i - 1] * ext;
    }

    patch_.resize(num_vertices_);
    centers_.assign(n_patches, 0);
    std::vector<std::vector<VertexId>> sadj(num_vertices_);
    Coord x(d, 0);
    for (std::size_t v = 0; v < num_vertices_; ++v) {
        std::size_t rem = v;
        for (int i = 0; i < d; ++i) {
            x[i] = static_cast<int>(rem % side);
            rem /= side;
        }
        PatchId p = 0;
        bool center = true;
        for (int i = 0; i < d; ++i) {
            p += static_cast<PatchId>((x[i] / n_sz) * pstride[i]);
            center = center && (x[i] % n_sz == (n_sz - 1) / 2);
        }
        patch_[v] = p;
        if (center) centers_[p] = static_cast<VertexId>(v);

        for (int i = 0; i < d; ++i) {
            // x and x+e_i share a patch unless x_i is the last row of its patch;
            // under periodic wrap the seam is itself a cut.
            if ((x[i] + 1) % n_sz == 0) continue;
            const VertexId u = static_cast<VertexId>(v + stride[i]);
            sadj[v].push_back(u);
            sadj[u].push_back(static_cast<VertexId>(v));
        }
    }

    std::vector<std::vector<VertexId>> ladj(num_vertices_);
    Coord z(d, 0);
    for (std::size_t p = 0; p < n_patches; ++p) {
        std::size_t rem = p;
        for (int i = 0; i < d; ++i) {
            z[i] = static_cast<int>(rem % ext);
            rem /= ext;
        }
        const VertexId c = centers_[p];
        for (int i = 0; i < d; ++i) {
            for (int dir : {-1, 1}) {
                int zi = z[i] + dir;
                if (zi < 0 || zi >= ext) {
                    if (!periodic) continue;
                    zi = wrap(zi, ext);
                }
                if (zi == z[i]) continue;
                const std::size_t q = p + (static_cast<std::size_t>(zi) - z[i]) * pstride[i];
                ladj[c].push_back(centers_[q]);
            }
        }
    }

    auto flatten = [this](std::vector<std::vector<VertexId>>& adj, std::vector<std::uint32_t>& off,
                          std::vector<VertexId>& flat) {
        off.assign(num_vertices_ + 1, 0);
        for (std::size_t v = 0; v < num_vertices_; ++v) off[v + 1] = off[v] + static_cast<std::uint32_t>(adj[v].size());
        flat.reserve(off.back());
        for (auto& a : adj) {
            std::sort(a.begin(), a.end());
            flat.insert(flat.end(), a.begin(), a.end());
        }
    };
    flatten(sadj, short_off_, short_adj_);
    flatten(ladj, long_off_, long_adj_);

    member_off_.assign(n_patches + 1, 0);
    for (std::size_t v = 0; v < num_vertices_; ++v) ++member_off_[patch_[v] + 1];
    for (std::size_t p = 0; p < n_patches; ++p) member_off_[p + 1] += member_off_[p];
    members_.resize(num_vertices_);
    std::vector<std::uint32_t> fill(member_off_.begin(), member_off_.end() - 1);
    for (std::size_t v = 0; v < num_vertices_; ++v) members_[fill[patch_[v]]++] = static_cast<VertexId>(v);
}

TwoScaleGraph build_two_scale_graph(const LatticeSpec& spec)
{
    return TwoScaleGraph(spec);
}

Coord TwoScaleGraph::coords(VertexId v) const
{
    Coord x(spec_.dim);
    std::size_t rem = v;
    for (int i = 0; i < spec_.dim; ++i) {
        x[i] = static_cast<int>(rem % spec_.side());
        rem /= spec_.side();
    }
    return x;
}

VertexId TwoScaleGraph::vertex_at(const Coord& x) const
{
    if (static_cast<int>(x.size()) != spec_.dim) throw std::invalid_argument("dimension mismatch");
    std::size_t v = 0, mult = 1;
    for (int i = 0; i < spec_.dim; ++i) {
        int xi = x[i];
        if (xi < 0 || xi >= spec_.side()) {
            if (spec_.boundary == Boundary::killing) throw std::out_of_range("vertex outside window");
            xi = wrap(xi, spec_.side());
        }
        v += static_cast<std::size_t>(xi) * mult;
        mult *= spec_.side();
    }
    return static_cast<VertexId>(v);
}

Coord TwoScaleGraph::patch_coords(PatchId p) const
{
    Coord z(spec_.dim);
    std::size_t rem = p;
    for (int i = 0; i < spec_.dim; ++i) {
        z[i] = static_cast<int>(rem % spec_.extent);
        rem /= spec_.extent;
    }
    return z;
}

PatchId TwoScaleGraph::patch_at(const Coord& z) const
{
    return patch_id(vertex_at(center_of(z, spec_)));
}

Coord TwoScaleGraph::centered(VertexId v) const
{
    Coord x = coords(v);
    for (auto& xi : x) xi = xi % spec_.patch_size - (spec_.patch_size - 1) / 2;
    return x;
}

std::vector<Edge> TwoScaleGraph::edges() const
{
    std::vector<Edge> out;
    out.reserve(num_short_edges() + num_long_edges());
    for (std::size_t v = 0; v < num_vertices_; ++v)
        for (VertexId u : short_neighbors(static_cast<VertexId>(v)))
            if (u > v) out.push_back({static_cast<VertexId>(v), u, EdgeScale::short_edge});
    // Long edges: one per (patch, axis) in the + direction.
    const int ext = spec_.extent;
    const bool periodic = spec_.boundary == Boundary::periodic;
    for (PatchId p = 0; p < num_patches(); ++p) {
        Coord z = patch_coords(p);
        for (int i = 0; i < spec_.dim; ++i) {
            if (z[i] + 1 >= ext && (!periodic || ext == 1)) continue;
            Coord w = z;
            w[i] = wrap(z[i] + 1, ext);
            out.push_back({centers_[p], centers_[patch_at(w)], EdgeScale::long_edge});
        }
    }
    return out;
}

std::string format_coord(const Coord& x, char sep)
{
    std::string s;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) s += sep;
        s += std::to_string(x[i]);
    }
    return s;
}

void write_graph_tsv(std::ostream& os, const TwoScaleGraph& g)
{
    for (const Edge& e : g.edges())
        os << format_coord(g.coords(e.a)) << '\t' << format_coord(g.coords(e.b)) << '\t'
           << (e.scale == EdgeScale::short_edge ? 'S' : 'L') << '\n';
}

void SimpleGraph::add_edge(VertexId a, VertexId b)
{
    if (a >= adj.size() || b >= adj.size()) throw std::out_of_range("edge endpoint out of range");
    adj[a].push_back(b);
    if (a != b) adj[b].push_back(a);
}

bool SimpleGraph::has_edge(VertexId a, VertexId b) const
{
    if (a >= adj.size()) return false;
    return std::find(adj[a].begin(), adj[a].end(), b) != adj[a].end();
}

namespace {

// Longest-needed search for a simple H1 path through v with at least n
// vertices: extend one arm from v, then try to complete with a second arm.
bool on_long_path(const SimpleGraph& h, VertexId v, int n)
{
    if (n <= 1) return true;
    std::vector<char> used(h.size(), 0);
    used[v] = 1;

    std::function<bool(VertexId, int, int)> arm2 = [&](VertexId u, int have, int need) -> bool {
        if (have >= need) return true;
        for (VertexId w : h.adj[u]) {
            if (used[w]) continue;
            used[w] = 1;
            bool ok = arm2(w, have + 1, need);
            used[w] = 0;
            if (ok) return true;
        }
        return false;
    };
    std::function<bool(VertexId, int)> arm1 = [&](VertexId u, int have) -> bool {
        if (have >= n) return true;
        if (arm2(v, have, n)) return true;
        for (VertexId w : h.adj[u]) {
            if (used[w]) continue;
            used[w] = 1;
            bool ok = arm1(w, have + 1);
            used[w] = 0;
            if (ok) return true;
        }
        return false;
    };
    return arm1(v, 1);
}

} // namespace

SeparationReport check_scale_separation(const GeneralTwoScaleGraph& g, int n)
{
    const std::size_t nv = g.h1.size();
    std::vector<char> in_v2(nv, 0);
    for (VertexId v : g.v2) {
        if (v >= nv) throw std::invalid_argument("V2 vertex not in V1");
        in_v2[v] = 1;
    }
    SimpleGraph h2(nv);
    for (auto [a, b] : g.e2) {
        if (a >= nv || b >= nv || !in_v2[a] || !in_v2[b])
            throw std::invalid_argument("E2 edge endpoint not in V2");
        if (g.h1.has_edge(a, b)) throw std::invalid_argument("E1 and E2 overlap");
        h2.add_edge(a, b);
    }
    if (g.path.empty()) throw std::invalid_argument("designated path is empty");
    std::vector<char> seen(nv, 0);
    for (std::size_t j = 0; j < g.path.size(); ++j) {
        const VertexId v = g.path[j];
        if (v >= nv || !in_v2[v]) throw std::invalid_argument("path vertex not in V2");
        if (seen[v]) throw std::invalid_argument("designated path is not self-avoiding");
        seen[v] = 1;
        if (j > 0 && !h2.has_edge(g.path[j - 1], v))
            throw std::invalid_argument("consecutive path vertices not joined by E2");
    }

    SeparationReport rep;
    rep.long_paths = true;
    for (VertexId v : g.path) {
        if (!on_long_path(g.h1, v, n)) {
            rep.long_paths = false;
            rep.violations.push_back("path vertex " + std::to_string(v) + " has no H1 path with " +
                                     std::to_string(n) + " vertices");
        }
    }

    rep.far_apart = true;
    std::vector<int> dist(nv, -1);
    std::vector<VertexId> touched;
    for (VertexId s : g.v2) {
        std::deque<VertexId> q{s};
        dist[s] = 0;
        touched.assign(1, s);
        while (!q.empty()) {
            const VertexId u = q.front();
            q.pop_front();
            if (dist[u] + 1 >= n) continue;
            for (VertexId w : g.h1.adj[u]) {
                if (dist[w] >= 0) continue;
                dist[w] = dist[u] + 1;
                touched.push_back(w);
                if (in_v2[w] && w > s) {
                    rep.far_apart = false;
                    rep.violations.push_back("V2 vertices " + std::to_string(s) + " and " + std::to_string(w) +
                                             " at H1 distance " + std::to_string(dist[w]));
                }
                q.push_back(w);
            }
        }
        for (VertexId t : touched) dist[t] = -1;
    }
    rep.ok = rep.long_paths && rep.far_apart;
    return rep;
}

GeneralTwoScaleGraph to_general(const TwoScaleGraph& g)
{
    GeneralTwoScaleGraph out;
    out.h1 = SimpleGraph(g.num_vertices());
    for (const Edge& e : g.edges()) {
        if (e.scale == EdgeScale::short_edge)
            out.h1.add_edge(e.a, e.b);
        else if (e.a != e.b)
            out.e2.emplace_back(e.a, e.b);
    }
    out.v2.assign(g.centers().begin(), g.centers().end());
    Coord z(g.dim(), 0);
    for (int j = 0; j < g.spec().extent; ++j) {
        z[0] = j;
        out.path.push_back(g.center_of_patch(g.patch_at(z)));
    }
    return out;
}

ScaleHierarchy make_hierarchy(int K, int L, int d)
{
    if (K < 1 || K % 2 == 0) throw std::invalid_argument("K must be odd and >= 1");
    if (L < 1 || L % 2 == 0) throw std::invalid_argument("L must be odd and >= 1");
    if (d < 1) throw std::invalid_argument("dimension must be >= 1");
    ScaleHierarchy h;
    h.dim = d;
    h.K = K;
    h.L = L;
    h.N = (K + 2) * L;
    h.T = static_cast<double>(L) * L;
    h.sub_box_side = std::max(1, static_cast<int>(std::lround(std::pow(static_cast<double>(L), 0.1))));
    return h;
}

bool ScaleHierarchy::in_patch(const Coord& x) const
{
    return std::all_of(x.begin(), x.end(), [this](int xi) { return 2 * std::abs(xi) < N; });
}

bool ScaleHierarchy::in_core(const Coord& x) const
{
    return std::all_of(x.begin(), x.end(), [this](int xi) { return 6 * std::abs(xi) < L; });
}

bool ScaleHierarchy::in_outer_core(const Coord& x) const
{
    return std::all_of(x.begin(), x.end(), [this](int xi) { return 3 * std::abs(xi) < L; });
}

Coord ScaleHierarchy::box_of(const Coord& x) const
{
    Coord z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = floor_div(x[i] + (L - 1) / 2, L);
    return z;
}

bool ScaleHierarchy::interior_box(const Coord& z) const
{
    return std::all_of(z.begin(), z.end(), [this](int zi) { return 2 * std::abs(zi) <= K - 1; });
}

std::vector<Coord> ScaleHierarchy::box_sites(const Coord& z) const
{
    Coord lo(dim), hi(dim);
    for (int i = 0; i < dim; ++i) {
        lo[i] = L * z[i] - (L - 1) / 2;
        hi[i] = L * z[i] + (L - 1) / 2;
    }
    std::vector<Coord> out;
    for_each_in_box(lo, hi, [&](const Coord& x) { out.push_back(x); });
    return out;
}

std::vector<std::vector<Coord>> ScaleHierarchy::sub_boxes(const Coord& z) const
{
    const int s = sub_box_side;
    const int per_axis = std::max(1, L / s);
    Coord first(dim, 0), last(dim, per_axis - 1);
    std::vector<std::vector<Coord>> out;
    for_each_in_box(first, last, [&](const Coord& k) {
        Coord lo(dim), hi(dim);
        for (int i = 0; i < dim; ++i) {
            const int base = L * z[i] - (L - 1) / 2;
            lo[i] = base + k[i] * s;
            hi[i] = k[i] == per_axis - 1 ? base + L - 1 : lo[i] + s - 1;
        }
        std::vector<Coord> box;
        bool meets_core = false;
        for_each_in_box(lo, hi, [&](const Coord& x) {
            meets_core = meets_core || in_core(x);
            box.push_back(x);
        });
        if (!meets_core) out.push_back(std::move(box));
    });
    return out;
}

std::vector<Coord> ScaleHierarchy::all_boxes() const
{
    const int r = (K + 1) / 2;
    std::vector<Coord> out;
    for_each_in_box(Coord(dim, -r), Coord(dim, r), [&](const Coord& z) { out.push_back(z); });
    return out;
}

} // namespace tscp
