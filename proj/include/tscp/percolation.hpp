#pragma once

#include "tscp/dynamics.hpp"
#include "tscp/graph.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace tscp {

/// Oriented site-percolation lattice: sites (z, n) with z^1 + ... + z^d + n
/// even; K > 0 restricts to sup_i |z^i| <= (K - 1) / 2.
struct PercLattice {
    int d = 1;
    int K = 0;

    bool restricted() const { return K > 0; }
    bool contains(const Coord& z, int n) const;
};

/// Counter-based uniform attached to site (z, n); fields built from the same
/// seed are coupled across eps and across restrictions.
double site_uniform(std::uint64_t seed, const Coord& z, int n);

// Dense site variables over the box [-R, R]^d for levels 0..levels-1.
class PercField {
public:
    PercField(const PercLattice& lat, int levels, int radius);

    static PercField iid(const PercLattice& lat, double eps, int levels, std::uint64_t seed, int radius = -1);
    static PercField from(const PercLattice& lat, int levels, int radius,
                          const std::function<bool(const Coord&, int)>& open);

    const PercLattice& lattice() const { return lat_; }
    int levels() const { return levels_; }
    int radius() const { return radius_; }
    std::size_t box_size() const { return box_; }

    bool open(const Coord& z, int n) const;
    void set_open(const Coord& z, int n, bool v);

    bool in_box(const Coord& z) const;
    std::size_t index(const Coord& z) const;
    Coord coord(std::size_t i) const;
    const std::vector<std::uint8_t>& level(int n) const { return open_[n]; }

private:
    PercLattice lat_;
    int levels_;
    int radius_;
    std::size_t box_;
    std::vector<std::vector<std::uint8_t>> open_;
};

struct WetSets {
    std::vector<std::vector<Coord>> levels; // lexicographically sorted per level
    std::optional<int> extinction;          // first empty level, absent if alive at the horizon
};

/// Level-by-level recursion, dense kernel (OpenMP over box sites).
WetSets wet_sets(const PercField& field, const std::vector<Coord>& w0, int levels);

/// Same recursion on ordered sets, kept as the serial reference.
WetSets wet_sets_reference(const PercField& field, const std::vector<Coord>& w0, int levels);

struct CouplingReport {
    bool dominated = true;   // W_n^K subset of W_n at every level
    bool differed = false;   // W_n != W_n^K at some level
    bool escaped = false;    // W_n^K leaves the K-2 lattice at some level
    bool implication = true; // differed implies escaped
    int first_difference = -1;
};

CouplingReport restricted_coupling_check(double eps, int K, int levels, std::uint64_t seed, int d = 1);

/// Good sites at level n from the configuration at time nT of a single-patch
/// run with patch size hier.N. Frontier boxes are never good.
std::vector<Coord> good_sites(const Configuration& cfg, const TwoScaleGraph& g, const ScaleHierarchy& hier, int n);
bool is_good(const Configuration& cfg, const TwoScaleGraph& g, const ScaleHierarchy& hier, const Coord& z);

/// Patch coordinates z with (z, n) in the lattice and the center of patch z
/// holding a 2 for at least I/K time units during (nI, (n+1)I).
std::vector<std::vector<Coord>> stable_sites_type2(const Trajectory& tr, const TwoScaleGraph& g, double I, int K,
                                                   int levels);
/// Patch coordinates z with (z, n) in the lattice and the center of z holding a 1 at time nJ.
std::vector<std::vector<Coord>> stable_sites_type1(const Trajectory& tr, const TwoScaleGraph& g, double J, int levels);

struct InclusionReport {
    std::vector<bool> included;
    int first_violation = -1;
    bool all() const { return first_violation < 0; }
};

InclusionReport inclusion_check(const std::vector<std::vector<Coord>>& w, const std::vector<std::vector<Coord>>& x);

/// Vertex at coordinates centered on patch 0's center.
VertexId vertex_centered(const TwoScaleGraph& g, const Coord& x);

} // namespace tscp
