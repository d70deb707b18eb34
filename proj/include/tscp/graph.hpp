#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tscp {

using VertexId = std::uint32_t;
using PatchId = std::uint32_t;
using Coord = std::vector<int>;

enum class Boundary { periodic, killing };

/// Geometry of a finite window of the two-scale lattice: `extent` patches of
/// side `patch_size` along each of `dim` axes.
struct LatticeSpec {
    int dim = 2;
    int patch_size = 3;
    int extent = 1;
    Boundary boundary = Boundary::periodic;

    void validate() const;
    int side() const { return extent * patch_size; }
};

/// Whether the open unit segment between adjacent lattice points `a` and `b`
/// meets a cutting hyperplane {x^i = N/2 + jN}. Coordinates are window
/// coordinates; patch 0 occupies [0, N) on every axis.
bool crosses_hyperplane(const Coord& a, const Coord& b, int patch_size);

/// Patch coordinate of a vertex and the center vertex of a patch. Periodic
/// windows wrap out-of-range input; killing windows reject it.
Coord patch_of(const Coord& x, const LatticeSpec& spec);
Coord center_of(const Coord& z, const LatticeSpec& spec);

enum class EdgeScale : std::uint8_t { short_edge, long_edge };

struct Edge {
    VertexId a;
    VertexId b;
    EdgeScale scale;
};

// Dense index-based two-scale graph. Vertex ids are row-major with axis 0
// fastest. Long-edge lists keep one entry per lattice direction, so a
// two-patch periodic axis yields a double edge between the two centers.
class TwoScaleGraph {
public:
    explicit TwoScaleGraph(const LatticeSpec& spec);

    const LatticeSpec& spec() const { return spec_; }
    int dim() const { return spec_.dim; }
    int patch_size() const { return spec_.patch_size; }

    std::size_t num_vertices() const { return num_vertices_; }
    std::size_t num_patches() const { return centers_.size(); }

    std::span<const VertexId> short_neighbors(VertexId v) const
    {
        return {short_adj_.data() + short_off_[v], short_adj_.data() + short_off_[v + 1]};
    }
    std::span<const VertexId> long_neighbors(VertexId v) const
    {
        return {long_adj_.data() + long_off_[v], long_adj_.data() + long_off_[v + 1]};
    }

    bool is_center(VertexId v) const { return centers_[patch_[v]] == v; }
    PatchId patch_id(VertexId v) const { return patch_[v]; }
    VertexId center_of_patch(PatchId p) const { return centers_[p]; }
    std::span<const VertexId> centers() const { return centers_; }
    std::span<const VertexId> patch_members(PatchId p) const
    {
        return {members_.data() + member_off_[p], members_.data() + member_off_[p + 1]};
    }

    Coord coords(VertexId v) const;
    VertexId vertex_at(const Coord& x) const;
    Coord patch_coords(PatchId p) const;
    PatchId patch_at(const Coord& z) const;

    /// Coordinates relative to the center of the vertex's own patch.
    Coord centered(VertexId v) const;

    /// Every undirected edge once (long edges once per lattice direction).
    std::vector<Edge> edges() const;

    std::size_t num_short_edges() const { return short_adj_.size() / 2; }
    std::size_t num_long_edges() const { return long_adj_.size() / 2; }

private:
    LatticeSpec spec_;
    std::size_t num_vertices_ = 0;
    std::vector<std::uint32_t> short_off_, long_off_;
    std::vector<VertexId> short_adj_, long_adj_;
    std::vector<PatchId> patch_;
    std::vector<VertexId> centers_;
    std::vector<std::uint32_t> member_off_;
    std::vector<VertexId> members_;
};

TwoScaleGraph build_two_scale_graph(const LatticeSpec& spec);

/// `graph.tsv`: `x-coords <TAB> y-coords <TAB> S|L`, coordinates comma-separated.
void write_graph_tsv(std::ostream& os, const TwoScaleGraph& g);

// ---------------------------------------------------------------------------
// General microscopic/mesoscopic framework.

struct SimpleGraph {
    explicit SimpleGraph(std::size_t n = 0) : adj(n) {}
    std::size_t size() const { return adj.size(); }
    void add_edge(VertexId a, VertexId b);
    bool has_edge(VertexId a, VertexId b) const;

    std::vector<std::vector<VertexId>> adj;
};

struct GeneralTwoScaleGraph {
    SimpleGraph h1;
    std::vector<VertexId> v2;
    std::vector<std::pair<VertexId, VertexId>> e2;
    /// Designated self-avoiding path of mesoscopic vertices.
    std::vector<VertexId> path;
};

struct SeparationReport {
    bool ok = false;
    bool long_paths = false;    // every path vertex sits on an H1 path of >= N vertices
    bool far_apart = false;     // every pair of V2 vertices at H1-distance >= N
    std::vector<std::string> violations;
};

/// Checks both scale-separation conditions. Throws std::invalid_argument on a
/// malformed designated path or on overlapping edge sets.
SeparationReport check_scale_separation(const GeneralTwoScaleGraph& g, int n);

/// H1 = short edges, V2 = centers, E2 = long edges, path = centers along axis 0.
GeneralTwoScaleGraph to_general(const TwoScaleGraph& g);

// ---------------------------------------------------------------------------
// Mesoscopic scales inside one patch of side N = (K+2)L. All coordinates here
// are centered on the patch center.

struct ScaleHierarchy {
    int dim = 1;
    int K = 1;
    int L = 1;
    int N = 3;
    double T = 1.0;       // L^2
    int sub_box_side = 1; // max(1, round(L^0.1))

    bool in_patch(const Coord& x) const;       // A_0
    bool in_core(const Coord& x) const;        // B_* = (-L/6, L/6)^d
    bool in_outer_core(const Coord& x) const;  // B^* = (-L/3, L/3)^d
    /// Box index z with x in B_z = Lz + B_0.
    Coord box_of(const Coord& x) const;
    /// (z, n) in G_K apart from parity: sup_i |z^i| <= (K-1)/2.
    bool interior_box(const Coord& z) const;
    std::vector<Coord> box_sites(const Coord& z) const;
    /// Sub-boxes of side `sub_box_side` tiling B_z; rim remainders are merged
    /// into the last full box. Boxes meeting B_* are dropped.
    std::vector<std::vector<Coord>> sub_boxes(const Coord& z) const;
    /// Box coordinates z with sup_i |z^i| <= (K+1)/2 (interior and frontier).
    std::vector<Coord> all_boxes() const;
};

ScaleHierarchy make_hierarchy(int K, int L, int d);

std::string format_coord(const Coord& x, char sep = ',');

} // namespace tscp
