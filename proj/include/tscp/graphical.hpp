#pragma once

#include "tscp/dynamics.hpp"
#include "tscp/graph.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace tscp {

enum class MarkKind : std::uint8_t { arrow, death, dot };
enum class MarkLabel : std::uint8_t { both, only1, only2 };

/// Whether a particle of `type` (1 or 2) may use a mark with this label.
constexpr bool label_allows(MarkLabel l, State type) noexcept
{
    return l == MarkLabel::both || (l == MarkLabel::only1 && type == 1) || (l == MarkLabel::only2 && type == 2);
}

struct Mark {
    double t;
    VertexId src; // arrow tail, or the vertex of a death/dot
    VertexId dst; // arrow head; equals src for deaths and dots
    MarkKind kind;
    MarkLabel label;
    bool long_edge = false;
};

enum class LabelMode { generalized, paper_exact };

class EventLog {
public:
    EventLog() = default;
    EventLog(std::size_t num_vertices, double t_lo, double t_hi, std::vector<Mark> marks);

    double t_lo() const { return t_lo_; }
    double t_hi() const { return t_hi_; }
    std::size_t num_vertices() const { return num_vertices_; }
    const std::vector<Mark>& marks() const { return marks_; }

    /// Indices (into marks()) of arrows into v, deaths at v and dots at v, in time order.
    std::span<const std::uint32_t> at(VertexId v) const
    {
        return {at_.data() + at_off_[v], at_.data() + at_off_[v + 1]};
    }

    /// Long only2-arrows into a center take effect only when the target patch holds no 2.
    bool gated() const { return !patch_.empty(); }
    void set_gating(std::vector<PatchId> patch_of_vertex) { patch_ = std::move(patch_of_vertex); }
    const std::vector<PatchId>& patches() const { return patch_; }

    /// False once any death mark is type-specific, or when set by the generator.
    bool equal_death_rates() const { return equal_deaths_; }
    void set_equal_death_rates(bool eq) { equal_deaths_ = eq; }

private:
    std::size_t num_vertices_ = 0;
    double t_lo_ = 0.0, t_hi_ = 0.0;
    std::vector<Mark> marks_;
    std::vector<std::uint32_t> at_off_, at_;
    std::vector<PatchId> patch_;
    bool equal_deaths_ = true;
};

/// Poisson marks over (t_lo, t_hi). Throws std::invalid_argument in paper_exact
/// mode when type 1 has the larger birth rate on either scale.
EventLog generate_events(const TwoScaleGraph& g, const ModelParams& params, double t_lo, double t_hi,
                         std::uint64_t seed, LabelMode mode = LabelMode::generalized);

/// Forward replay from `init` (taken at t_lo) through every mark.
Trajectory replay(const Configuration& init, const EventLog& log, bool keep_deltas = true);

/// Configuration at time t (marks with time <= t applied).
Configuration replay_to(const Configuration& init, const EventLog& log, double t);

/// Vertices y with a dual path from (x, t) to (y, t - s). Labels and dots are ignored.
std::vector<VertexId> dual_set(VertexId x, double t, double s, const EventLog& log);

void write_events_tsv(std::ostream& os, const EventLog& log);

} // namespace tscp
