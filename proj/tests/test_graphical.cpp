#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tscp/graphical.hpp"

#include <cmath>
#include <set>
#include <sstream>

using namespace tscp;

namespace {

struct Tally {
    long both_short = 0, only1_short = 0, only2_short = 0;
    long both_long = 0, only1_long = 0, only2_long = 0;
    long death_both = 0, death1 = 0, death2 = 0, dots = 0;
};

Tally tally(const EventLog& log)
{
    Tally t;
    for (const Mark& m : log.marks()) {
        if (m.kind == MarkKind::dot) {
            ++t.dots;
        } else if (m.kind == MarkKind::death) {
            (m.label == MarkLabel::both ? t.death_both : m.label == MarkLabel::only1 ? t.death1 : t.death2)++;
        } else if (m.long_edge) {
            (m.label == MarkLabel::both ? t.both_long : m.label == MarkLabel::only1 ? t.only1_long : t.only2_long)++;
        } else {
            (m.label == MarkLabel::both ? t.both_short : m.label == MarkLabel::only1 ? t.only1_short : t.only2_short)++;
        }
    }
    return t;
}

// Poisson count against its mean, 5 standard deviations.
void check_poisson(long count, double mean)
{
    if (mean == 0.0) {
        CHECK(count == 0);
        return;
    }
    CHECK(std::abs(count - mean) < 5.0 * std::sqrt(mean));
}

Configuration random_config(std::size_t n, Rng& rng, int max_state = 2)
{
    Configuration c;
    c.states.resize(n);
    for (auto& s : c.states) s = static_cast<State>(rng.below(max_state + 1));
    return c;
}

// Forward reachability of x at time t from (y, t - s): a set of marked sites
// spreads along arrows and is thinned by deaths.
bool reaches(VertexId y, VertexId x, double t, double s, const EventLog& log)
{
    std::vector<char> in(log.num_vertices(), 0);
    in[y] = 1;
    for (const Mark& m : log.marks()) {
        if (m.t <= t - s || m.t > t) continue;
        if (m.kind == MarkKind::arrow && in[m.src]) in[m.dst] = 1;
        if (m.kind == MarkKind::death) in[m.src] = 0;
    }
    return in[x];
}

} // namespace

TEST_CASE("mark counts follow the labelled rates")
{
    const TwoScaleGraph g(LatticeSpec{1, 3, 4, Boundary::periodic});
    const double T = 2000.0;
    const double n_short = 2.0 * g.num_short_edges(), n_long = 2.0 * g.num_long_edges();
    const double n = static_cast<double>(g.num_vertices());

    const ModelParams p{0.5, 2.0, 0.5, 2.0, 1.0, 1.0, Variant::plain};
    Tally t = tally(generate_events(g, p, 0.0, T, 1, LabelMode::paper_exact));
    check_poisson(t.both_short, 0.5 * n_short * T);
    check_poisson(t.only2_short, 1.5 * n_short * T);
    check_poisson(t.both_long, 0.5 * n_long * T);
    check_poisson(t.only2_long, 1.5 * n_long * T);
    check_poisson(t.death_both, n * T);
    CHECK(t.only1_short + t.only1_long + t.death1 + t.death2 + t.dots == 0);

    const ModelParams q{2.0, 0.5, 3.0, 1.0, 0.5, 1.5, Variant::plain};
    t = tally(generate_events(g, q, 0.0, T, 2));
    check_poisson(t.both_short, 1.0 * n_short * T);
    check_poisson(t.only1_short, 2.0 * n_short * T);
    check_poisson(t.both_long, 0.5 * n_long * T);
    check_poisson(t.only1_long, 1.5 * n_long * T);
    check_poisson(t.death_both, 0.5 * n * T);
    check_poisson(t.death2, 1.0 * n * T);
    CHECK(t.death1 == 0);
}

TEST_CASE("equal short rates give no only2 short arrows")
{
    const TwoScaleGraph g(LatticeSpec{2, 3, 2, Boundary::periodic});
    const Tally t = tally(generate_events(g, ModelParams{1, 2, 3, 3, 1, 1, Variant::plain}, 0, 50, 3));
    CHECK(t.only2_short == 0);
    CHECK(t.only1_short == 0);
    CHECK(t.only2_long > 0);
}

TEST_CASE("paper-exact labelling rejects a type-1 advantage")
{
    const TwoScaleGraph g(LatticeSpec{1, 3, 2, Boundary::periodic});
    CHECK_THROWS_AS(generate_events(g, ModelParams{2, 1, 1, 1, 1, 1, Variant::plain}, 0, 1, 1, LabelMode::paper_exact),
                    std::invalid_argument);
    CHECK_NOTHROW(generate_events(g, ModelParams{2, 1, 1, 1, 1, 1, Variant::plain}, 0, 1, 1));
}

TEST_CASE("finite-volume and modified logs carry dots at centers only")
{
    const TwoScaleGraph g(LatticeSpec{2, 5, 1, Boundary::killing});
    const double T = 3000.0;
    const EventLog log = generate_events(g, ModelParams{0.5, 1, 1, 2, 1, 1, Variant::finite_volume}, 0, T, 4);
    const Tally t = tally(log);
    check_poisson(t.dots, 2.0 * 2 * 0.5 * T);
    for (const Mark& m : log.marks())
        if (m.kind == MarkKind::dot) CHECK(g.is_center(m.src));
    CHECK(t.both_long + t.only1_long + t.only2_long == 0);
    CHECK_FALSE(log.gated());

    const TwoScaleGraph g2(LatticeSpec{1, 3, 3, Boundary::killing});
    const EventLog mod = generate_events(g2, ModelParams{0.5, 1.5, 1, 2, 1, 1, Variant::modified}, 0, T, 5);
    const Tally tm = tally(mod);
    CHECK(mod.gated());
    CHECK(tm.both_long + tm.only1_long == 0);
    check_poisson(tm.only2_long, 1.5 * 2.0 * g2.num_long_edges() * T);
    check_poisson(tm.dots, 2.0 * 0.5 * 3 * T);
}

TEST_CASE("replay applies each mark kind")
{
    std::vector<Mark> marks = {
        {1.0, 0, 1, MarkKind::arrow, MarkLabel::both},  // 1 -> empty: spreads
        {2.0, 2, 1, MarkKind::arrow, MarkLabel::both},  // onto an occupied site: no effect
        {3.0, 0, 3, MarkKind::arrow, MarkLabel::only2}, // 1 on an only2 arrow: no effect
        {4.0, 2, 3, MarkKind::arrow, MarkLabel::only2}, // 2 on an only2 arrow: spreads
        {5.0, 0, 0, MarkKind::death, MarkLabel::only2}, // a 2-death on a 1: no effect
        {6.0, 2, 2, MarkKind::death, MarkLabel::only2}, // kills the 2
        {7.0, 4, 4, MarkKind::dot, MarkLabel::both},    // dot on empty: new 1
        {8.0, 1, 1, MarkKind::dot, MarkLabel::both},    // dot on occupied: no effect
    };
    const EventLog log(5, 0.0, 10.0, marks);
    CHECK_FALSE(log.equal_death_rates());
    Configuration init;
    init.states = {1, 0, 2, 0, 0};
    const Trajectory tr = replay(init, log);
    CHECK(tr.state_at(10.0).states == std::vector<State>{1, 1, 0, 2, 1});
    CHECK(tr.deltas.size() == 4);
    CHECK(replay_to(init, log, 4.0).states == std::vector<State>{1, 1, 2, 2, 0});
    CHECK(replay_to(init, log, 3.999).states == std::vector<State>{1, 1, 2, 0, 0});
}

TEST_CASE("gated replay blocks long 2-arrows into patches holding a 2")
{
    const TwoScaleGraph g(LatticeSpec{1, 3, 2, Boundary::killing});
    std::vector<Mark> marks = {{1.0, 1, 4, MarkKind::arrow, MarkLabel::only2, true}};
    EventLog log(6, 0.0, 2.0, marks);
    std::vector<PatchId> patch(6);
    for (VertexId v = 0; v < 6; ++v) patch[v] = g.patch_id(v);
    log.set_gating(patch);
    Configuration init;
    init.states = {0, 2, 0, 0, 0, 0};
    CHECK(replay_to(init, log, 2.0).states[4] == 2);
    init.states = {0, 2, 0, 2, 0, 0};
    CHECK(replay_to(init, log, 2.0).states[4] == 0);
}

TEST_CASE("replay_to agrees with the replayed trajectory")
{
    const TwoScaleGraph g(LatticeSpec{2, 3, 2, Boundary::periodic});
    const EventLog log = generate_events(g, ModelParams{1, 1.5, 2, 2.5, 1, 1, Variant::plain}, 0, 10, 6);
    Rng rng(1);
    const Configuration init = random_config(g.num_vertices(), rng);
    const Trajectory tr = replay(init, log);
    for (double t : {0.0, 1.3, 5.0, 9.99, 10.0}) CHECK(replay_to(init, log, t).states == tr.state_at(t).states);
}

TEST_CASE("removing the 1's never removes a 2")
{
    const TwoScaleGraph g(LatticeSpec{1, 5, 3, Boundary::periodic});
    const ModelParams p{0.7, 1.2, 1.5, 2.5, 1, 1, Variant::plain};
    Rng rng(9);
    for (int rep = 0; rep < 30; ++rep) {
        const EventLog log = generate_events(g, p, 0, 20, derive_seed(7, rep), LabelMode::paper_exact);
        const Configuration a = random_config(g.num_vertices(), rng);
        Configuration b = a;
        for (auto& s : b.states)
            if (s == 1) s = 0;
        Configuration ca = a, cb = b;
        double last = 0.0;
        for (const Mark& m : log.marks()) {
            if (m.t == last) continue;
            last = m.t;
            ca = replay_to(a, log, m.t);
            cb = replay_to(b, log, m.t);
            for (VertexId v = 0; v < g.num_vertices(); ++v)
                if (ca.states[v] == 2) CHECK(cb.states[v] == 2);
            if (rep > 2) break;
        }
        ca = replay_to(a, log, 20);
        cb = replay_to(b, log, 20);
        for (VertexId v = 0; v < g.num_vertices(); ++v)
            if (ca.states[v] == 2) CHECK(cb.states[v] == 2);
    }
}

TEST_CASE("dual set equals forward reachability")
{
    const TwoScaleGraph g(LatticeSpec{1, 3, 3, Boundary::periodic});
    const ModelParams p{1, 1, 1.5, 1.5, 1, 1, Variant::plain};
    for (int rep = 0; rep < 20; ++rep) {
        const EventLog log = generate_events(g, p, 0, 6, derive_seed(3, rep));
        for (VertexId x = 0; x < g.num_vertices(); ++x)
            for (double s : {0.5, 2.0, 6.0}) {
                const auto d = dual_set(x, 6.0, s, log);
                const std::set<VertexId> got(d.begin(), d.end());
                for (VertexId y = 0; y < g.num_vertices(); ++y) CHECK(got.count(y) == reaches(y, x, 6.0, s, log));
            }
    }
}

TEST_CASE("occupancy duality per realization")
{
    const TwoScaleGraph g(LatticeSpec{2, 3, 2, Boundary::periodic});
    const ModelParams p{1.5, 1.5, 2, 2, 1, 1, Variant::plain};
    Rng rng(2);
    for (int rep = 0; rep < 50; ++rep) {
        const EventLog log = generate_events(g, p, 0, 3, derive_seed(4, rep));
        const Configuration init = random_config(g.num_vertices(), rng);
        const Configuration end = replay_to(init, log, 3.0);
        for (VertexId x = 0; x < g.num_vertices(); ++x) {
            bool meets = false;
            for (VertexId y : dual_set(x, 3.0, 3.0, log)) meets = meets || init.states[y] != 0;
            CHECK(meets == (end.states[x] != 0));
        }
    }
}

TEST_CASE("events.tsv format")
{
    const EventLog log(3, 0.0, 5.0,
                       {{1.5, 0, 1, MarkKind::arrow, MarkLabel::only2}, {2.0, 2, 2, MarkKind::death, MarkLabel::both}});
    std::ostringstream os;
    write_events_tsv(os, log);
    CHECK(os.str() == "1.5\tA\t0\t1\t2\n2\tD\t2\t-\tB\n");
}

TEST_CASE("label gate")
{
    CHECK(label_allows(MarkLabel::both, 1));
    CHECK(label_allows(MarkLabel::both, 2));
    CHECK(label_allows(MarkLabel::only1, 1));
    CHECK_FALSE(label_allows(MarkLabel::only1, 2));
    CHECK_FALSE(label_allows(MarkLabel::only2, 1));
    CHECK(label_allows(MarkLabel::only2, 2));
}
