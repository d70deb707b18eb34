#pragma once

#include "tscp/graphical.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace tscp {

/// Finite prefix (u1, ..., un) of a label; the tail is infinite.
using Label = std::vector<std::uint32_t>;

/// Lexicographic a << b with the infinite continuation: a proper prefix is
/// larger than each of its extensions.
bool label_less(const Label& a, const Label& b);
std::string format_label(const Label& l);

struct LabelGreater {
    bool operator()(const Label& a, const Label& b) const { return label_less(b, a); }
};

/// Longest common prefix, i.e. the label of the most recent common ancestor.
Label common_ancestor(const Label& a, const Label& b);

inline constexpr double kNever = std::numeric_limits<double>::infinity();
inline constexpr std::int32_t kNoBranch = -1;

struct Branch {
    VertexId v;
    double birth_s;
    double death_s = kNever; // kNever while alive at the tree horizon
    std::int32_t parent = kNoBranch;
    Label label;
    std::int64_t created_by = -1; // index of the creating arrow in the event log
    bool superseded = false;      // replaced at its site by a branch with a larger label
};

struct FirstAncestorStep {
    double s;
    VertexId v;
    std::int32_t branch;
};

// Dual tree of (x, t). At most one branch per site is kept at any dual time:
// the one with the largest label among the branches of the unrolled tree at
// that site. Labels, the hierarchy between sites and the first-ancestor path
// are those of the unrolled tree.
struct DualTree {
    VertexId x = 0;
    double t = 0.0;
    double horizon = 0.0; // dual time reached (window start, extinction or cap)
    bool extinct = false;
    std::vector<Branch> branches;
    std::vector<FirstAncestorStep> first_ancestor;
};

/// Throws std::invalid_argument when the log has type-specific deaths, and
/// std::out_of_range when t lies outside the window.
DualTree build_dual_tree(VertexId x, double t, const EventLog& log, double max_s = kNever);

/// Sites alive at dual time s, first ancestor first.
std::vector<VertexId> ancestor_hierarchy(const DualTree& tree, double s);
std::vector<std::int32_t> ancestor_branches(const DualTree& tree, double s);

/// Piecewise-constant first-ancestor path; empty once the tree is extinct.
const std::vector<FirstAncestorStep>& first_ancestor_path(const DualTree& tree);

struct Liveness {
    enum class Kind { horizon, finite_volume };
    Kind kind = Kind::finite_volume;
    double S = 0.0;

    static Liveness horizon(double s) { return {Kind::horizon, s}; }
    static Liveness finite_volume() { return {Kind::finite_volume, 0.0}; }
};

enum class Live { yes, no, undecided };

/// Whether (x, t) lives: its dual survives S dual-time units (horizon) or
/// down to the window start (finite volume). Undecided when S reaches past
/// the window.
Live lives(VertexId x, double t, const EventLog& log, const Liveness& rule);

struct RenewalPoint {
    VertexId x;
    double tau;
    std::int32_t branch;
    bool two_arrow; // the first arrow crossed moving up from the point is an only2-arrow
};

struct RenewalSequence {
    std::vector<RenewalPoint> points; // points[0] = (x, 0)
    bool root_lives = false;
    bool truncated = false; // stopped at a jump whose liveness could not be decided
};

RenewalSequence renewal_points(const DualTree& tree, const EventLog& log, const Liveness& rule);

/// Renewal points after the first that sit at patch centers.
std::vector<RenewalPoint> center_subsequence(const RenewalSequence& seq, const TwoScaleGraph& g);

/// Type of (x, t) read off the dual tree and the configuration at the window start.
State determine_type(VertexId x, double t, const EventLog& log, const Configuration& init);

struct SelectedPathOptions {
    enum class Mode { single_target, corner_then_center };
    Mode mode = Mode::single_target;
    double m = 10.0;
    Liveness liveness;
    Coord target; // single_target, coordinates centered on patch 0
    int L = 0;    // corner_then_center
    double stop_s = kNever;
};

struct Reposition {
    double s;
    VertexId at;
    VertexId second; // equals `at` when there is no second ancestor
    bool second_lives;
    bool moved;
    char rule[3];
};

struct SelectedPath {
    std::vector<std::pair<double, VertexId>> path; // (dual time, site), piecewise constant
    std::vector<Reposition> decisions;
    Coord final_target;
    double end_s = 0.0;
    bool died = false;

    VertexId at(double s) const;
};

SelectedPath selected_path(VertexId x, double t, const EventLog& log, const TwoScaleGraph& g,
                           const SelectedPathOptions& opt);

/// `dualtree.tsv`: vertex, birth_s, death_s, parent id, dot-separated label.
void write_dualtree_tsv(std::ostream& os, const DualTree& tree);

} // namespace tscp
