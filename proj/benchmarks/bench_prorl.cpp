#include <benchmark/benchmark.h>

#include "prorl/classes.hpp"
#include "prorl/dataset.hpp"
#include "prorl/generators.hpp"
#include "prorl/oracle.hpp"
#include "prorl/saddle.hpp"

using namespace prorl;

namespace {

struct Problem {
    TabularMdp mdp;
    Occupancy dD;
};

Problem make_problem(int S, int A) {
    TabularMdp mdp = random_mdp(S, A, 0.9, 17);
    Occupancy dD = behavior_occupancy(mdp, random_policy(S, A, 18, 0.05));
    return {std::move(mdp), std::move(dD)};
}

void BM_OracleNewton(benchmark::State& state) {
    const Problem p = make_problem(static_cast<int>(state.range(0)), 3);
    const Regularizer reg = Regularizer::quadratic(1.0);
    for (auto _ : state) benchmark::DoNotOptimize(solve_regularized(p.mdp, p.dD, reg, 0.1));
}
BENCHMARK(BM_OracleNewton)->Arg(5)->Arg(10)->Arg(20)->Arg(50);

void BM_OracleExtragradient(benchmark::State& state) {
    const Problem p = make_problem(static_cast<int>(state.range(0)), 3);
    const Regularizer reg = Regularizer::quadratic(1.0);
    OracleOptions options;
    options.path = SolverPath::extragradient;
    for (auto _ : state) benchmark::DoNotOptimize(solve_regularized(p.mdp, p.dD, reg, 0.5, options));
}
BENCHMARK(BM_OracleExtragradient)->Arg(5)->Arg(10);

// Payoff table plus enumeration for |V| = |W| = distractors + 1.
void BM_SaddleEnumeration(benchmark::State& state) {
    const Problem p = make_problem(10, 3);
    const Regularizer reg = Regularizer::quadratic(1.0);
    const RegularizedSolution sol = solve_regularized(p.mdp, p.dD, reg, 0.3);
    const FunctionClasses k =
        build_realizable(p.mdp, p.dD, reg, sol, static_cast<int>(state.range(0)), 19, {DistractorMode::multiscale});
    const EmpiricalModel model(generate_dataset(p.mdp, p.dD, 10000, 10000, 20));
    for (auto _ : state) {
        const Matrix payoffs = empirical_payoffs(model, k.values, k.weights, reg, 0.3);
        benchmark::DoNotOptimize(solve_exact(payoffs, k.values, k.weights));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SaddleEnumeration)->RangeMultiplier(4)->Range(8, 512)->Complexity();

void BM_GenerateDataset(benchmark::State& state) {
    const Problem p = make_problem(10, 3);
    for (auto _ : state) benchmark::DoNotOptimize(generate_dataset(p.mdp, p.dD, static_cast<std::size_t>(state.range(0)), 0, 1));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GenerateDataset)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
