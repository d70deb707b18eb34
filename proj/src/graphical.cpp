#include "tscp/graphical.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <tuple>

namespace tscp {

EventLog::EventLog(std::size_t num_vertices, double t_lo, double t_hi, std::vector<Mark> marks)
    : num_vertices_(num_vertices), t_lo_(t_lo), t_hi_(t_hi), marks_(std::move(marks))
{
    if (!(t_hi >= t_lo)) throw std::invalid_argument("empty window");
    std::stable_sort(marks_.begin(), marks_.end(), [](const Mark& a, const Mark& b) {
        return std::tie(a.t, a.dst, a.src, a.kind) < std::tie(b.t, b.dst, b.src, b.kind);
    });
    at_off_.assign(num_vertices_ + 1, 0);
    for (const Mark& m : marks_) {
        if (m.src >= num_vertices_ || m.dst >= num_vertices_) throw std::out_of_range("mark vertex out of range");
        if (m.t <= t_lo_ || m.t > t_hi_) throw std::out_of_range("mark outside window");
        ++at_off_[m.dst + 1];
        if (m.kind == MarkKind::death && m.label != MarkLabel::both) equal_deaths_ = false;
    }
    for (std::size_t v = 0; v < num_vertices_; ++v) at_off_[v + 1] += at_off_[v];
    at_.resize(marks_.size());
    std::vector<std::uint32_t> fill(at_off_.begin(), at_off_.end() - 1);
    for (std::uint32_t i = 0; i < marks_.size(); ++i) at_[fill[marks_[i].dst]++] = i;
}

namespace {

struct Channel {
    VertexId src, dst;
    MarkKind kind;
    MarkLabel label;
    bool long_edge;
    double rate;
};

void add_arrow_channels(std::vector<Channel>& ch, VertexId x, VertexId y, double r1, double r2, bool long_edge)
{
    const double both = std::min(r1, r2);
    if (both > 0) ch.push_back({x, y, MarkKind::arrow, MarkLabel::both, long_edge, both});
    if (r2 > r1) ch.push_back({x, y, MarkKind::arrow, MarkLabel::only2, long_edge, r2 - r1});
    if (r1 > r2) ch.push_back({x, y, MarkKind::arrow, MarkLabel::only1, long_edge, r1 - r2});
}

} // namespace

EventLog generate_events(const TwoScaleGraph& g, const ModelParams& p, double t_lo, double t_hi, std::uint64_t seed,
                         LabelMode mode)
{
    check_variant(p, g);
    if (!(t_hi >= t_lo)) throw std::invalid_argument("empty window");
    if (mode == LabelMode::paper_exact && (p.B1 > p.B2 || p.beta1 > p.beta2))
        throw std::invalid_argument("paper-exact labeling needs B2 >= B1 and beta2 >= beta1");

    std::vector<Channel> ch;
    const std::size_t n = g.num_vertices();
    const double spont = 2.0 * g.dim() * p.B1;
    for (VertexId x = 0; x < n; ++x) {
        for (VertexId y : g.short_neighbors(x)) add_arrow_channels(ch, x, y, p.beta1, p.beta2, false);
        for (VertexId y : g.long_neighbors(x)) {
            switch (p.variant) {
            case Variant::plain: add_arrow_channels(ch, x, y, p.B1, p.B2, true); break;
            case Variant::modified:
                if (p.B2 > 0) ch.push_back({x, y, MarkKind::arrow, MarkLabel::only2, true, p.B2});
                break;
            case Variant::finite_volume: break;
            }
        }
        const double both = std::min(p.delta1, p.delta2);
        if (both > 0) ch.push_back({x, x, MarkKind::death, MarkLabel::both, false, both});
        if (p.delta1 > p.delta2) ch.push_back({x, x, MarkKind::death, MarkLabel::only1, false, p.delta1 - p.delta2});
        if (p.delta2 > p.delta1) ch.push_back({x, x, MarkKind::death, MarkLabel::only2, false, p.delta2 - p.delta1});
        if (p.variant != Variant::plain && g.is_center(x) && spont > 0)
            ch.push_back({x, x, MarkKind::dot, MarkLabel::both, false, spont});
    }

    std::vector<double> cum(ch.size());
    double total = 0.0;
    for (std::size_t i = 0; i < ch.size(); ++i) cum[i] = (total += ch[i].rate);

    std::vector<Mark> marks;
    Rng rng(seed);
    if (total > 0) {
        marks.reserve(static_cast<std::size_t>(total * (t_hi - t_lo) * 1.05) + 16);
        double t = t_lo;
        while (true) {
            t += rng.exponential(total);
            if (t > t_hi) break;
            const double u = rng.uniform() * total;
            std::size_t k = std::upper_bound(cum.begin(), cum.end(), u) - cum.begin();
            if (k >= ch.size()) k = ch.size() - 1;
            const Channel& c = ch[k];
            marks.push_back({t, c.src, c.dst, c.kind, c.label, c.long_edge});
        }
    }
    EventLog log(n, t_lo, t_hi, std::move(marks));
    if (p.delta1 != p.delta2) log.set_equal_death_rates(false);
    if (p.variant == Variant::modified) {
        std::vector<PatchId> patch(n);
        for (VertexId v = 0; v < n; ++v) patch[v] = g.patch_id(v);
        log.set_gating(std::move(patch));
    }
    return log;
}

namespace {

class Replayer {
public:
    Replayer(const Configuration& init, const EventLog& log) : log_(log), cfg_(init)
    {
        if (init.states.size() != log.num_vertices()) throw std::invalid_argument("configuration size mismatch");
        cfg_.time = log.t_lo();
        if (log.gated()) {
            patch2_.assign(*std::max_element(log.patches().begin(), log.patches().end()) + 1, 0);
            for (VertexId v = 0; v < cfg_.states.size(); ++v)
                if (cfg_.states[v] == 2) ++patch2_[log.patches()[v]];
        }
    }

    // Returns the applied change, if any.
    bool apply(const Mark& m, Delta& out)
    {
        State& target = cfg_.states[m.dst];
        const State before = target;
        switch (m.kind) {
        case MarkKind::arrow: {
            const State src = cfg_.states[m.src];
            if (target != 0 || src == 0 || !label_allows(m.label, src)) return false;
            if (log_.gated() && m.long_edge && patch2_[log_.patches()[m.dst]] != 0) return false;
            target = src;
            break;
        }
        case MarkKind::death:
            if (target == 0 || !label_allows(m.label, target)) return false;
            target = 0;
            break;
        case MarkKind::dot:
            if (target != 0) return false;
            target = 1;
            break;
        }
        if (log_.gated() && (before == 2 || target == 2)) patch2_[log_.patches()[m.dst]] += target == 2 ? 1 : -1;
        out = {m.t, m.dst, before, target};
        return true;
    }

    Configuration& config() { return cfg_; }

private:
    const EventLog& log_;
    Configuration cfg_;
    std::vector<std::uint32_t> patch2_;
};

} // namespace

Trajectory replay(const Configuration& init, const EventLog& log, bool keep_deltas)
{
    Replayer r(init, log);
    Trajectory tr;
    tr.initial = r.config();
    Delta d{};
    for (const Mark& m : log.marks()) {
        if (r.apply(m, d)) {
            ++tr.events;
            if (keep_deltas) tr.deltas.push_back(d);
        }
    }
    tr.t_end = log.t_hi();
    return tr;
}

Configuration replay_to(const Configuration& init, const EventLog& log, double t)
{
    if (t < log.t_lo() || t > log.t_hi()) throw std::out_of_range("time outside window");
    Replayer r(init, log);
    Delta d{};
    for (const Mark& m : log.marks()) {
        if (m.t > t) break;
        r.apply(m, d);
    }
    r.config().time = t;
    return r.config();
}

std::vector<VertexId> dual_set(VertexId x, double t, double s, const EventLog& log)
{
    if (x >= log.num_vertices()) throw std::out_of_range("vertex out of range");
    if (s < 0.0 || t > log.t_hi() || t - s < log.t_lo()) throw std::out_of_range("dual time outside window");
    const double floor_t = t - s;
    std::vector<char> in(log.num_vertices(), 0);
    in[x] = 1;
    std::size_t live = 1;
    const auto& marks = log.marks();
    auto it = std::upper_bound(marks.begin(), marks.end(), t, [](double v, const Mark& m) { return v < m.t; });
    while (it != marks.begin() && live > 0) {
        --it;
        const Mark& m = *it;
        if (m.t <= floor_t) break;
        if (!in[m.dst]) continue;
        if (m.kind == MarkKind::arrow) {
            if (!in[m.src]) {
                in[m.src] = 1;
                ++live;
            }
        } else if (m.kind == MarkKind::death) {
            in[m.dst] = 0;
            --live;
        }
    }
    std::vector<VertexId> out;
    for (VertexId v = 0; v < in.size(); ++v)
        if (in[v]) out.push_back(v);
    return out;
}

void write_events_tsv(std::ostream& os, const EventLog& log)
{
    static constexpr char kind[] = {'A', 'D', 'O'};
    static constexpr char label[] = {'B', '1', '2'};
    for (const Mark& m : log.marks()) {
        os << m.t << '\t' << kind[static_cast<int>(m.kind)] << '\t' << m.src << '\t';
        if (m.kind == MarkKind::arrow)
            os << m.dst;
        else
            os << '-';
        os << '\t' << label[static_cast<int>(m.label)] << '\n';
    }
}

} // namespace tscp
