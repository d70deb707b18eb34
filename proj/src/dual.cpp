#include "tscp/dual.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <set>
#include <stdexcept>

namespace tscp {

bool label_less(const Label& a, const Label& b)
{
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i)
        if (a[i] != b[i]) return a[i] < b[i];
    return a.size() > b.size();
}

std::string format_label(const Label& l)
{
    if (l.empty()) return "-";
    std::string s;
    for (std::size_t i = 0; i < l.size(); ++i) {
        if (i) s += '.';
        s += std::to_string(l[i]);
    }
    return s;
}

Label common_ancestor(const Label& a, const Label& b)
{
    std::size_t i = 0;
    while (i < a.size() && i < b.size() && a[i] == b[i]) ++i;
    return Label(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(i));
}

namespace {

class DualSweep {
public:
    DualSweep(VertexId x, double t, const EventLog& log, double max_s)
        : log_(log), at_site_(log.num_vertices(), kNoBranch), live_(ByLabel{&tree.branches})
    {
        if (!log.equal_death_rates()) throw std::invalid_argument("dual tree needs equal death rates");
        if (x >= log.num_vertices()) throw std::out_of_range("vertex out of range");
        if (t < log.t_lo() || t > log.t_hi()) throw std::out_of_range("point outside window");
        tree.x = x;
        tree.t = t;
        floor_s_ = std::min(max_s, t - log.t_lo());
        const auto& marks = log.marks();
        cursor_ = std::upper_bound(marks.begin(), marks.end(), t, [](double v, const Mark& m) { return v < m.t; }) -
                  marks.begin() - 1;
        tree.branches.push_back({x, 0.0, kNever, kNoBranch, {}, -1, false});
        children_.push_back(0);
        at_site_[x] = 0;
        live_.insert(0);
        tree.first_ancestor.push_back({0.0, x, 0});
    }

    // Processes the next mark going backwards. False once the sweep is over.
    bool advance()
    {
        fa_changed = false;
        if (done_) return false;
        const auto& marks = log_.marks();
        if (cursor_ < 0 || tree.t - marks[cursor_].t >= floor_s_) {
            finish(floor_s_);
            return false;
        }
        const std::int64_t idx = cursor_--;
        const Mark& m = marks[idx];
        s = tree.t - m.t;
        const std::int32_t p = at_site_[m.dst];
        if (p == kNoBranch || m.kind == MarkKind::dot) return true;

        if (m.kind == MarkKind::arrow) {
            Label label = tree.branches[p].label;
            label.push_back(++children_[p]);
            const std::int32_t q = at_site_[m.src];
            if (q != kNoBranch) {
                if (label_less(label, tree.branches[q].label)) return true;
                retire(q);
                tree.branches[q].superseded = true;
            }
            const auto id = static_cast<std::int32_t>(tree.branches.size());
            tree.branches.push_back({m.src, s, kNever, p, std::move(label), idx, false});
            children_.push_back(0);
            at_site_[m.src] = id;
            live_.insert(id);
            return true;
        }

        const bool was_first = *live_.begin() == p;
        retire(p);
        if (live_.empty()) {
            fa_changed = true;
            finish(s);
            tree.extinct = true;
            return false;
        }
        if (was_first) {
            fa_changed = true;
            const std::int32_t f = *live_.begin();
            tree.first_ancestor.push_back({s, tree.branches[f].v, f});
        }
        return true;
    }

    std::int32_t first() const { return live_.empty() ? kNoBranch : *live_.begin(); }
    std::int32_t second() const
    {
        if (live_.size() < 2) return kNoBranch;
        return *std::next(live_.begin());
    }

    DualTree tree;
    double s = 0.0;
    bool fa_changed = false;

private:
    struct ByLabel {
        const std::vector<Branch>* b;
        bool operator()(std::int32_t x, std::int32_t y) const { return label_less((*b)[y].label, (*b)[x].label); }
    };

    void retire(std::int32_t id)
    {
        tree.branches[id].death_s = s;
        live_.erase(id);
        at_site_[tree.branches[id].v] = kNoBranch;
    }

    void finish(double horizon)
    {
        done_ = true;
        tree.horizon = horizon;
    }

    const EventLog& log_;
    std::vector<std::int32_t> at_site_;
    std::vector<std::uint32_t> children_;
    std::set<std::int32_t, ByLabel> live_;
    std::int64_t cursor_ = -1;
    double floor_s_ = 0.0;
    bool done_ = false;
};

} // namespace

DualTree build_dual_tree(VertexId x, double t, const EventLog& log, double max_s)
{
    DualSweep sw(x, t, log, max_s);
    while (sw.advance()) {
    }
    return std::move(sw.tree);
}

std::vector<std::int32_t> ancestor_branches(const DualTree& tree, double s)
{
    std::vector<std::int32_t> out;
    for (std::int32_t i = 0; i < static_cast<std::int32_t>(tree.branches.size()); ++i) {
        const Branch& b = tree.branches[i];
        if (b.birth_s <= s && s < b.death_s) out.push_back(i);
    }
    std::sort(out.begin(), out.end(), [&](std::int32_t a, std::int32_t b) {
        return label_less(tree.branches[b].label, tree.branches[a].label);
    });
    return out;
}

std::vector<VertexId> ancestor_hierarchy(const DualTree& tree, double s)
{
    std::vector<VertexId> out;
    for (std::int32_t id : ancestor_branches(tree, s)) out.push_back(tree.branches[id].v);
    return out;
}

const std::vector<FirstAncestorStep>& first_ancestor_path(const DualTree& tree)
{
    return tree.first_ancestor;
}

Live lives(VertexId x, double t, const EventLog& log, const Liveness& rule)
{
    double span = t - log.t_lo();
    if (rule.kind == Liveness::Kind::horizon) {
        if (rule.S > span) return Live::undecided;
        span = rule.S;
    }
    return dual_set(x, t, span, log).empty() ? Live::no : Live::yes;
}

RenewalSequence renewal_points(const DualTree& tree, const EventLog& log, const Liveness& rule)
{
    RenewalSequence seq;
    seq.points.push_back({tree.x, 0.0, 0, false});
    const Live root = lives(tree.x, tree.t, log, rule);
    seq.root_lives = root == Live::yes;
    if (root == Live::undecided) seq.truncated = true;
    const auto& fa = tree.first_ancestor;
    for (std::size_t k = 1; k < fa.size() && !seq.truncated; ++k) {
        const Live l = lives(fa[k].v, tree.t - fa[k].s, log, rule);
        if (l == Live::undecided) {
            seq.truncated = true;
            break;
        }
        if (l == Live::no) continue;
        const Branch& b = tree.branches[fa[k].branch];
        const bool two = b.created_by >= 0 && log.marks()[b.created_by].label == MarkLabel::only2;
        seq.points.push_back({fa[k].v, fa[k].s, fa[k].branch, two});
    }
    return seq;
}

std::vector<RenewalPoint> center_subsequence(const RenewalSequence& seq, const TwoScaleGraph& g)
{
    std::vector<RenewalPoint> out;
    for (std::size_t n = 1; n < seq.points.size(); ++n)
        if (g.is_center(seq.points[n].x)) out.push_back(seq.points[n]);
    return out;
}

State determine_type(VertexId x, double t, const EventLog& log, const Configuration& init)
{
    if (!log.equal_death_rates()) throw std::invalid_argument("type determination needs equal death rates");
    if (log.gated()) throw std::invalid_argument("type determination is not defined for the modified variant");
    if (init.states.size() != log.num_vertices()) throw std::invalid_argument("configuration size mismatch");
    if (x >= log.num_vertices()) throw std::out_of_range("vertex out of range");
    if (t < log.t_lo() || t > log.t_hi()) throw std::out_of_range("point outside window");

    const auto& marks = log.marks();
    std::vector<std::int8_t> memo(marks.size(), -1);

    // Depth-first walk of the unrolled dual tree in hierarchy order. The
    // branch at v below the query point is visited first (its label is the
    // shortest), then the children created by arrows into v, latest-born
    // (earliest in real time) first. A child whose landing type is forbidden
    // by its arrow's label is truncated together with its subtree; a dot is a
    // child that lands on a 1.
    std::function<State(VertexId, std::int64_t)> explore = [&](VertexId v, std::int64_t limit) -> State {
        const auto at = log.at(v);
        const auto end = std::lower_bound(at.begin(), at.end(), static_cast<std::uint32_t>(limit)) - at.begin();
        std::ptrdiff_t start = end;
        while (start > 0 && marks[at[start - 1]].kind != MarkKind::death) --start;
        if (start == 0 && init.states[v] != 0) return init.states[v];
        for (std::ptrdiff_t j = start; j < end; ++j) {
            const std::uint32_t i = at[j];
            const Mark& m = marks[i];
            State r;
            if (m.kind == MarkKind::dot) {
                r = 1;
            } else {
                if (memo[i] < 0) memo[i] = static_cast<std::int8_t>(explore(m.src, i));
                r = static_cast<State>(memo[i]);
            }
            if (r != 0 && label_allows(m.label, r)) return r;
        }
        return 0;
    };
    const auto limit = std::upper_bound(marks.begin(), marks.end(), t, [](double v, const Mark& m) { return v < m.t; }) -
                       marks.begin();
    return explore(x, limit);
}

VertexId SelectedPath::at(double s) const
{
    VertexId v = path.front().second;
    for (const auto& [ps, pv] : path) {
        if (ps > s) break;
        v = pv;
    }
    return v;
}

namespace {

std::vector<double> position(const TwoScaleGraph& g, VertexId v)
{
    const Coord c = g.coords(v);
    std::vector<double> p(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) p[i] = c[i] - (g.patch_size() - 1) / 2;
    return p;
}

double dist(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

double dist_to_line(const std::vector<double>& p, const std::vector<double>& o, const std::vector<double>& y)
{
    std::vector<double> u(p.size()), w(p.size());
    double norm = 0, proj = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        u[i] = y[i] - o[i];
        norm += u[i] * u[i];
    }
    if (norm == 0) return dist(p, o);
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < p.size(); ++i) {
        u[i] /= norm;
        w[i] = p[i] - o[i];
        proj += w[i] * u[i];
    }
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) s += (w[i] - proj * u[i]) * (w[i] - proj * u[i]);
    return std::sqrt(s);
}

} // namespace

SelectedPath selected_path(VertexId x, double t, const EventLog& log, const TwoScaleGraph& g,
                           const SelectedPathOptions& opt)
{
    using Mode = SelectedPathOptions::Mode;
    const int d = g.dim();
    std::vector<double> origin = position(g, x), target(d, 0.0), final_target(d, 0.0);
    bool first_leg = opt.mode == Mode::corner_then_center;
    if (opt.mode == Mode::single_target) {
        if (static_cast<int>(opt.target.size()) != d) throw std::invalid_argument("target dimension mismatch");
        for (int i = 0; i < d; ++i) target[i] = opt.target[i];
    } else {
        if (opt.L < 1) throw std::invalid_argument("corner_then_center needs L >= 1");
        for (int i = 0; i < d; ++i) target[i] = (origin[i] < 0 ? -1.0 : 1.0) * opt.L / 3.0;
        final_target[0] = opt.L;
    }
    const double radius = opt.mode == Mode::corner_then_center ? std::sqrt(static_cast<double>(opt.L)) / 4.0 : 0.0;

    SelectedPath out;
    out.path.push_back({0.0, x});
    auto maybe_switch = [&](VertexId v) {
        if (!first_leg) return;
        const auto p = position(g, v);
        if (dist(p, target) < radius) {
            first_leg = false;
            origin = p;
            target = final_target;
        }
    };
    maybe_switch(x);

    VertexId cur = x;
    double s0 = 0.0;
    const double total = std::min(opt.stop_s, t - log.t_lo());
    while (true) {
        if (s0 >= total) {
            out.end_s = s0;
            break;
        }
        DualSweep sw(cur, t - s0, log, total - s0);
        bool restarted = false;
        while (sw.advance() || sw.fa_changed) {
            if (!sw.fa_changed) continue;
            const std::int32_t f = sw.first();
            if (f == kNoBranch) break;
            const Branch& b = sw.tree.branches[f];
            const double s = sw.s;
            out.path.push_back({s0 + s, b.v});
            maybe_switch(b.v);
            if (b.created_by < 0 || log.marks()[b.created_by].label != MarkLabel::only2) continue;
            if (lives(b.v, t - s0 - s, log, opt.liveness) != Live::yes) continue;

            Reposition r{s0 + s, b.v, b.v, false, false, "2a"};
            const std::int32_t sec = sw.second();
            if (sec != kNoBranch) {
                r.second = sw.tree.branches[sec].v;
                r.second_lives = lives(r.second, t - s0 - s, log, opt.liveness) == Live::yes;
            }
            if (r.second_lives) {
                const auto pa = position(g, r.at), pb = position(g, r.second);
                const double da = dist_to_line(pa, origin, target);
                if (da > opt.m) {
                    r.moved = dist_to_line(pb, origin, target) < da;
                    std::copy_n(r.moved ? "1a" : "1c", 3, r.rule);
                } else {
                    r.moved = dist(pb, target) < dist(pa, target);
                    std::copy_n(r.moved ? "1b" : "1c", 3, r.rule);
                }
            }
            out.decisions.push_back(r);
            s0 += s;
            cur = r.moved ? r.second : r.at;
            if (r.moved) {
                out.path.push_back({s0, cur});
                maybe_switch(cur);
            }
            restarted = true;
            break;
        }
        if (!restarted) {
            out.end_s = s0 + sw.tree.horizon;
            out.died = sw.tree.extinct;
            break;
        }
    }
    out.final_target.assign(target.begin(), target.end());
    for (std::size_t i = 0; i < target.size(); ++i) out.final_target[i] = static_cast<int>(std::lround(target[i]));
    return out;
}

void write_dualtree_tsv(std::ostream& os, const DualTree& tree)
{
    for (const Branch& b : tree.branches) {
        os << b.v << '\t' << b.birth_s << '\t';
        if (b.death_s == kNever)
            os << "inf";
        else
            os << b.death_s;
        os << '\t' << b.parent << '\t' << format_label(b.label) << '\n';
    }
}

} // namespace tscp
