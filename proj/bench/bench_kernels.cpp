// Serial reference vs OpenMP kernels on the 2D benchmark sizes.
#include <benchmark/benchmark.h>

#include <optional>

#include "parctrl/asymptotics.hpp"
#include "parctrl/kernels.hpp"
#include "parctrl/mesh.hpp"
#include "parctrl/operators.hpp"

namespace {

using parctrl::Exec;

struct Fixture {
    parctrl::DiscreteOperators ops;
    parctrl::TimeGrid grid{1.0, 200};
    Eigen::MatrixXd u;
    Eigen::MatrixXd v;

    explicit Fixture(int n)
    {
        ops = parctrl::assemble(parctrl::build_rect_mesh(n, n, {parctrl::Side::Left}));
        u = Eigen::MatrixXd::Random(ops.num_nodes(), grid.N + 1);
        v = Eigen::MatrixXd::Random(ops.num_nodes(), grid.N + 1);
    }
};

const Fixture& fixture()
{
    static const Fixture f(32);
    return f;
}

Exec policy(const benchmark::State& state) { return state.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

void BM_TimeBilinear(benchmark::State& state)
{
    const Fixture& f = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(parctrl::kernels::time_bilinear(f.ops.mass, f.u, f.v, f.grid.dt(), policy(state)));
    state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}
BENCHMARK(BM_TimeBilinear)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_ApplyColumns(benchmark::State& state)
{
    const Fixture& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(parctrl::kernels::apply_columns(f.ops.stiffness, f.u, policy(state)));
    state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}
BENCHMARK(BM_ApplyColumns)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_AlphaSweepRows(benchmark::State& state)
{
    const Fixture& f = fixture();
    const int n = f.ops.num_nodes();
    parctrl::ProblemSpec spec;
    spec.g = parctrl::TimeField(Eigen::MatrixXd::Constant(n, f.grid.N + 1, 1.0));
    spec.z_d = parctrl::TimeField::zeros(n, f.grid);
    spec.b = parctrl::Vector::Zero(static_cast<Eigen::Index>(f.ops.dirichlet_nodes.size()));
    spec.v_b = parctrl::Vector::Zero(n);
    const parctrl::BoundaryControl q(Eigen::MatrixXd::Constant(f.ops.num_gamma2(), f.grid.N + 1, 0.5));
    const std::vector<double> alphas = {10.0, 100.0, 1000.0, 10000.0};
    for (auto _ : state)
        benchmark::DoNotOptimize(parctrl::alpha_sweep(f.ops, spec, f.grid, q, alphas, {}, policy(state)));
    state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}
BENCHMARK(BM_AlphaSweepRows)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
