// Serial against OpenMP finite-difference Jacobians of the shooting residual.

#include "delayoc/problems.hpp"
#include "delayoc/solve.hpp"

#include <benchmark/benchmark.h>

using namespace delayoc;

namespace {

struct Fixture {
    ProblemDef prob;
    ShootingState state;
    ResidualFn F;
    Vec z, Fz;

    Fixture(ProblemDef p, DelayPair tau, int N)
        : prob(std::move(p)),
          state(prob, tau, N,
                DenseTrajectory::constant(Grid(0.0, prob.horizonGuess(), N), prob.historyState(0.0),
                                          prob.stateHistory())),
          F(state.residualFn()), z(Vec::LinSpaced(state.size(), -0.1, 0.1)), Fz(F(z))
    {}
};

Fixture& ocp2(int N)
{
    static Fixture f50(builtinOCP2(), {0.4, 0.0}, 50);
    static Fixture f100(builtinOCP2(), {0.4, 0.0}, 100);
    return N == 50 ? f50 : f100;
}

void serial(benchmark::State& st)
{
    Fixture& f = ocp2(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(fdJacobian(f.F, f.z, f.Fz, 1e-7));
    st.counters["unknowns"] = static_cast<double>(f.z.size());
}

void parallel(benchmark::State& st)
{
    Fixture& f = ocp2(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(fdJacobianParallel(f.F, f.z, f.Fz, 1e-7));
    st.counters["unknowns"] = static_cast<double>(f.z.size());
}

}  // namespace

BENCHMARK(serial)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(parallel)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
