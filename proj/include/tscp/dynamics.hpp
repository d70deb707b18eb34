#pragma once

#include "tscp/graph.hpp"
#include "tscp/rng.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace tscp {

using State = std::uint8_t;

enum class Variant { plain, finite_volume, modified };

std::string to_string(Variant v);
Variant parse_variant(const std::string& s);

struct ModelParams {
    double B1 = 1.0;
    double B2 = 1.0;
    double beta1 = 1.0;
    double beta2 = 1.0;
    double delta1 = 1.0;
    double delta2 = 1.0;
    Variant variant = Variant::plain;

    void validate() const;
    double B(int type) const { return type == 1 ? B1 : B2; }
    double beta(int type) const { return type == 1 ? beta1 : beta2; }
    double delta(int type) const { return type == 1 ? delta1 : delta2; }
};

/// Throws std::invalid_argument when the variant cannot run on this graph.
void check_variant(const ModelParams& params, const TwoScaleGraph& g);

struct Configuration {
    std::vector<State> states;
    double time = 0.0;

    std::array<std::size_t, 3> counts() const;
};

struct InitSpec {
    enum class Kind { product, single2_at_center, all1_except, explicit_states };

    Kind kind = Kind::product;
    double p0 = 0.5, p1 = 0.25, p2 = 0.25;
    Coord patch;                      // single2_at_center (empty = patch 0)
    std::vector<VertexId> exceptions; // all1_except: these vertices hold `exception_state`
    State exception_state = 0;
    std::vector<State> states;        // explicit_states

    void validate() const;
};

Configuration make_initial(const InitSpec& init, const TwoScaleGraph& g, Rng& rng);

struct Rates {
    double to1 = 0.0;
    double to2 = 0.0;
    double to0 = 0.0;

    bool operator==(const Rates&) const = default;
};

/// Transition rates at x computed from scratch by scanning its neighbourhood.
Rates transition_rates(VertexId x, const Configuration& cfg, const ModelParams& params, const TwoScaleGraph& g);

struct Delta {
    double t;
    VertexId v;
    State from;
    State to;
};

using Observer = std::function<void(const Delta&)>;

// Exact continuous-time simulation. Rates are kept per vertex in a binary sum
// tree; neighbour type counts and per-patch type-2 counts are updated
// incrementally after every event.
class Simulator {
public:
    Simulator(const TwoScaleGraph& g, const ModelParams& params, Configuration init, std::uint64_t seed);

    /// Performs the next event if it happens no later than `t_stop`. Otherwise
    /// the clock is set to `t_stop` and false is returned.
    bool step(double t_stop);

    /// Runs all events up to time t.
    void advance_to(double t);

    const Configuration& config() const { return cfg_; }
    double time() const { return cfg_.time; }
    double total_rate() const { return tree_[1]; }
    std::uint64_t events() const { return events_; }
    std::size_t count(int type) const { return counts_[type]; }
    std::size_t patch_twos(PatchId p) const { return patch2_[p]; }
    Rates rates(VertexId v) const;

    void set_observer(Observer obs) { observer_ = std::move(obs); }

private:
    void refresh(VertexId v);
    void apply(VertexId v, State to);

    const TwoScaleGraph& g_;
    ModelParams params_;
    Configuration cfg_;
    Rng rng_;
    Observer observer_;
    std::uint64_t events_ = 0;
    std::array<std::size_t, 3> counts_{};
    std::vector<std::array<std::uint16_t, 2>> short_cnt_, long_cnt_;
    std::vector<std::uint32_t> patch2_;
    std::vector<double> tree_;
    std::size_t cap_ = 1;
    double spont1_ = 0.0;
};

struct Trajectory {
    Configuration initial;
    std::vector<Delta> deltas;
    std::vector<double> sample_times;
    std::vector<Configuration> samples;
    double t_end = 0.0;
    std::uint64_t events = 0;

    Configuration state_at(double t) const;
};

Trajectory run_gillespie(const InitSpec& init, const ModelParams& params, const TwoScaleGraph& g, double t_max,
                         std::uint64_t seed, const std::vector<double>& sample_times, bool keep_deltas = true);

/// Lebesgue measure of {t in (s, s + len) : state of x at t == k}.
double occupation_time(const Trajectory& tr, VertexId x, double s, double len, State k);

/// Same, from the initial state and the time-ordered deltas of a single vertex.
double occupation_time(State initial, const std::vector<Delta>& deltas, double horizon, double s, double len, State k);

/// Number of edges (short and long, with multiplicity) whose endpoints hold types 1 and 2.
std::size_t hetero_pairs(const Configuration& cfg, const TwoScaleGraph& g);

} // namespace tscp
