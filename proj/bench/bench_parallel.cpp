// Serial vs OpenMP timings for the two parallel kernels: the dense wet-set
// recursion and replicate fan-out. Results must match the serial runs.

#include "tscp/parallel.hpp"
#include "tscp/percolation.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>

using namespace tscp;

namespace {

template <class F>
double seconds(F&& f)
{
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Parallel benchmarks"};
    int levels = 200, replicates = 2000, threads = 0;
    double eps = 0.1;
    app.add_option("--levels", levels, "wet-set levels (d=2)");
    app.add_option("--replicates", replicates, "replicates for the fan-out benchmark");
    app.add_option("--eps", eps, "closed-site probability");
    app.add_option("--threads", threads, "OpenMP threads (0 = default)");
    CLI11_PARSE(app, argc, argv);

    std::printf("threads available: %d\n", available_threads());

    const PercField field = PercField::iid(PercLattice{2, 0}, eps, levels, 4);
    WetSets dense, ref;
    const double t_dense = seconds([&] { dense = wet_sets(field, {{0, 0}}, levels); });
    const double t_ref = seconds([&] { ref = wet_sets_reference(field, {{0, 0}}, levels); });
    std::printf("wet sets d=2, %d levels, %s: dense %.3f s, reference %.3f s, equal %s\n", levels,
                dense.extinction ? "extinct" : "alive", t_dense, t_ref,
                dense.levels == ref.levels ? "yes" : "NO");

    const int rep_levels = 60;
    std::vector<int> par(replicates), ser(replicates);
    auto one = [&](std::size_t k) {
        const PercField f = PercField::iid(PercLattice{1, 0}, eps, rep_levels, derive_seed(2, k));
        const WetSets w = wet_sets_reference(f, {{0}}, rep_levels);
        return w.extinction.value_or(-1);
    };
    const double t_ser = seconds([&] { serial_for(ser.size(), [&](std::size_t k) { ser[k] = one(k); }); });
    const double t_par = seconds([&] { parallel_for(par.size(), threads, [&](std::size_t k) { par[k] = one(k); }); });
    std::printf("replicates x%d (d=1, %d levels): serial %.3f s, parallel %.3f s, equal %s\n", replicates, rep_levels,
                t_ser, t_par, ser == par ? "yes" : "NO");
    return dense.levels == ref.levels && ser == par ? 0 : 1;
}
