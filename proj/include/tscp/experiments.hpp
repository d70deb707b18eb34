#pragma once

#include "tscp/config.hpp"
#include "tscp/dual.hpp"
#include "tscp/dynamics.hpp"
#include "tscp/graph.hpp"
#include "tscp/percolation.hpp"
#include "tscp/stats.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tscp {

struct RunOptions {
    std::filesystem::path out = ".";
    std::uint64_t seed = 1;
    int replicates = -1; // -1: take exp.replicates from the config
    int threads = 0;
};

LatticeSpec lattice_from(const Config& cfg);
ModelParams params_from(const Config& cfg);
InitSpec init_from(const Config& cfg, const TwoScaleGraph& g);
int replicates_from(const Config& cfg, const RunOptions& opt, int fallback);

// ---------------------------------------------------------------------------
// simulate

struct DensityRow {
    double t;
    std::array<std::size_t, 3> n;
    std::size_t hetero;
};

struct SimulateResult {
    Configuration initial;
    std::vector<DensityRow> density;
    std::vector<double> snapshot_times;
    std::vector<Configuration> snapshots;
    std::uint64_t events = 0;
};

/// Density rows on the grid {0, dt, 2dt, ...} merged with the snapshot times.
SimulateResult simulate(const TwoScaleGraph& g, const ModelParams& params, const InitSpec& init, double t_max,
                        const std::vector<double>& snapshot_times, double density_dt, std::uint64_t seed);

// ---------------------------------------------------------------------------
// extinction

struct ExtinctionSample {
    double tau;
    bool censored;
};

/// Extinction time of the 2's from a single 2 at the center of a finite-volume patch.
ExtinctionSample extinction_time(const TwoScaleGraph& g, const ModelParams& params, double t_max, std::uint64_t seed);

struct ExtinctionSummary {
    int N = 0;
    std::size_t runs = 0;
    std::size_t censored = 0;
    double mean = 0.0;
    double q10 = 0.0, q50 = 0.0, q90 = 0.0;
    double quick_fraction = 0.0;  // tau <= quick cutoff
    double long_fraction = 0.0;   // tau >= long cutoff (censored runs included)
    double middle_fraction = 0.0; // strictly between the cutoffs
    double long_median = 0.0;     // median over the long mode; censored runs count as t_max
    bool long_median_censored = false;
};

ExtinctionSummary summarize_extinction(int N, const std::vector<ExtinctionSample>& s, double quick_cutoff,
                                       double long_cutoff);

// ---------------------------------------------------------------------------
// couple

enum class Geometry { e1_to_0, zero_to_e1, e1_to_2e1 };

std::string to_string(Geometry g);
Geometry parse_geometry(const std::string& s);

/// Box whose goodness is conditioned on, and box checked one level later.
std::pair<Coord, Coord> geometry_boxes(Geometry geo, int d);

/// Minimal good configuration for box z: every site of B_z \ B_* holds a 2, the rest of the patch is empty.
Configuration minimal_good_config(const TwoScaleGraph& g, const ScaleHierarchy& hier, const Coord& z);

/// One trial: start from the minimal good configuration of the source box, run
/// the finite-volume process for T = L^2 and test the target box.
bool goodness_trial(const TwoScaleGraph& g, const ScaleHierarchy& hier, const ModelParams& params, Geometry geo,
                    std::uint64_t seed);

struct Proportion {
    long trials = 0;
    long successes = 0;
    double p() const { return trials ? static_cast<double>(successes) / trials : 0.0; }
    /// Wilson score interval at z standard deviations.
    std::pair<double, double> wilson(double z = 1.96) const;
};

struct InclusionRow {
    int replicate;
    int level;
    std::size_t n_wet;
    std::size_t n_good;
    bool included;
};

/// Good-site field of one single-patch run (all 2's outside B_* at time 0,
/// observed at times nT) against i.i.d. wet sets at eps on the restricted lattice.
std::vector<InclusionRow> inclusion_run(const TwoScaleGraph& g, const ScaleHierarchy& hier, const ModelParams& params,
                                        double eps, int levels, int replicate, std::uint64_t seed);

struct InvasionStats {
    std::vector<double> r; // times patch e1 stops being void of 2's
    std::vector<double> s; // times patch e1 becomes void of 2's again
    std::optional<double> sigma;
    double center_occupation = 0.0; // fraction of (0, I) the center of patch 0 holds a 2
};

/// Modified process on two patches along axis 0: patch 0 full of 2's, patch e1
/// full of 1's. sigma is the first r_i followed by 3I time units with a 2 in e1.
InvasionStats invasion_run(const TwoScaleGraph& g, const ModelParams& params, double I, double t_max,
                           std::uint64_t seed);

// ---------------------------------------------------------------------------
// coexist

struct CoexistRun {
    std::array<std::size_t, 3> initial{};
    std::array<std::size_t, 3> mid{};
    std::array<std::size_t, 3> end{};

    bool both_present() const { return mid[1] && mid[2] && end[1] && end[2]; }
};

/// With `ones_at_centers_only`, initial 1's drawn off the patch centers become 2's.
CoexistRun coexist_run(const TwoScaleGraph& g, const ModelParams& params, const InitSpec& init, double t_max,
                       std::uint64_t seed, bool ones_at_centers_only = false);

// ---------------------------------------------------------------------------
// dualstats

struct DualTrace {
    std::vector<double> tau;       // renewal dual times, tau[0] = 0
    std::vector<int> x;            // axis-0 coordinate of each renewal point
    std::vector<double> y_tau;     // center subsequence
    std::vector<int> y;
    std::vector<double> radius;    // max axis-0 distance of live branches at the probe times
    bool root_lives = false;
    bool truncated = false;
};

/// Renewal sequence of (x, t_window) over a fresh log on [0, t_window]; the tree
/// is cut at t_window - S so that every liveness query is decided.
DualTrace dual_trace(const TwoScaleGraph& g, const ModelParams& params, VertexId x, double t_window, double S,
                     const std::vector<double>& probe_s, std::uint64_t seed);

struct IncrementStats {
    std::size_t n = 0;
    KsResult split_half;
    double lag1 = 0.0;
    double lag1_se = 0.0;
};

/// Increments of each sequence; the first half of every sequence is tested
/// against the second half, and lag-1 pairs are pooled within sequences.
IncrementStats increment_stats(const std::vector<std::vector<double>>& seqs);

/// Least-squares slope of y on x.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);

// ---------------------------------------------------------------------------
// perc

struct PercCurve {
    double eps = 0.0;
    long realizations = 0;
    long survived = 0;
    std::vector<long> extinct_at; // histogram of the extinction level
};

/// Survival to `levels` from W0 = {0}; realization r uses seed derive_seed(seed, r) for every eps.
std::vector<PercCurve> perc_curves(const PercLattice& lat, const std::vector<double>& eps, int levels,
                                   long realizations, std::uint64_t seed, int threads);

/// Slope of log P(m < pi < inf) against m over the levels with a nonzero count.
double tail_slope(const PercCurve& c);

// ---------------------------------------------------------------------------
// CLI commands: read the config, write files under opt.out, return 0.

int cmd_simulate(const Config& cfg, const RunOptions& opt);
int cmd_extinction(const Config& cfg, const RunOptions& opt);
int cmd_couple(const Config& cfg, const RunOptions& opt);
int cmd_coexist(const Config& cfg, const RunOptions& opt);
int cmd_dualstats(const Config& cfg, const RunOptions& opt);
int cmd_perc(const Config& cfg, const RunOptions& opt);

/// Dispatch by command name; throws ConfigError for unknown commands or unused keys.
int run_command(const std::string& name, const Config& cfg, const RunOptions& opt);

} // namespace tscp
