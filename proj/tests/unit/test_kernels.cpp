#include <gtest/gtest.h>

#include <cstdlib>
#include <stdexcept>

#include "parctrl/error.hpp"
#include "parctrl/kernels.hpp"
#include "parctrl/norms.hpp"
#include "support.hpp"

using namespace parctrl;

namespace {

struct Data {
    DiscreteOperators ops = parctrl::testing::ops_2d(12);
    TimeGrid grid{1.0, 37};
    Eigen::MatrixXd u, v;
    Data()
    {
        std::srand(7);
        u = Eigen::MatrixXd::Random(ops.num_nodes(), grid.N + 1);
        v = Eigen::MatrixXd::Random(ops.num_nodes(), grid.N + 1);
    }
};

} // namespace

TEST(Kernels, ColumnBilinearParallelIsBitIdentical)
{
    const Data d;
    std::vector<double> s(static_cast<std::size_t>(d.grid.N + 1)), p(s.size());
    kernels::column_bilinear(d.ops.mass, d.u, d.v, s, Exec::Serial);
    kernels::column_bilinear(d.ops.mass, d.u, d.v, p, Exec::Parallel);
    EXPECT_EQ(s, p);
    EXPECT_DOUBLE_EQ(s[3], d.u.col(3).dot(d.ops.mass * d.v.col(3)));
}

TEST(Kernels, TimeBilinearSkipsInitialColumn)
{
    const Data d;
    Eigen::MatrixXd u = d.u;
    const double a = kernels::time_bilinear(d.ops.mass, u, d.v, d.grid.dt(), Exec::Serial);
    u.col(0).setConstant(1e6);
    const double b = kernels::time_bilinear(d.ops.mass, u, d.v, d.grid.dt(), Exec::Parallel);
    EXPECT_EQ(a, b);
    double ref = 0.0;
    for (int k = 1; k <= d.grid.N; ++k) ref += d.grid.dt() * d.u.col(k).dot(d.ops.mass * d.v.col(k));
    EXPECT_NEAR(a, ref, 1e-12 * std::abs(ref));
}

TEST(Kernels, ApplyColumnsParallelIsBitIdentical)
{
    const Data d;
    const Eigen::MatrixXd s = kernels::apply_columns(d.ops.stiffness, d.u, Exec::Serial);
    const Eigen::MatrixXd p = kernels::apply_columns(d.ops.stiffness, d.u, Exec::Parallel);
    EXPECT_TRUE((s.array() == p.array()).all());
    EXPECT_LT((s - Eigen::MatrixXd(d.ops.stiffness * d.u)).norm(), 1e-12 * s.norm());
}

TEST(Kernels, ForEachIndexVisitsAllAndPropagatesErrors)
{
    std::vector<int> hits(100, 0);
    kernels::for_each_index(100, [&](int i) { hits[static_cast<std::size_t>(i)] += 1; }, Exec::Parallel);
    for (int h : hits) EXPECT_EQ(h, 1);
    EXPECT_THROW(kernels::for_each_index(
                     8, [](int i) { if (i == 5) throw SolverError("boom"); }, Exec::Parallel),
                 SolverError);
    EXPECT_THROW(kernels::for_each_index(
                     8, [](int i) { if (i == 2) throw ValidationError("bad"); }, Exec::Serial),
                 ValidationError);
}

TEST(Kernels, ThreadEnv)
{
    const int before = kernels::thread_cap();
    ::setenv("PARCTRL_THREADS", "2", 1);
    kernels::apply_thread_env();
    EXPECT_EQ(kernels::thread_cap(), 2);
    ::setenv("PARCTRL_THREADS", "zero", 1);
    EXPECT_THROW(kernels::apply_thread_env(), ValidationError);
    ::setenv("PARCTRL_THREADS", "-3", 1);
    EXPECT_THROW(kernels::apply_thread_env(), ValidationError);
    ::unsetenv("PARCTRL_THREADS");
    kernels::set_thread_cap(before);
}

TEST(Norms, ScriptInnerProductsAgreeAcrossPolicies)
{
    const Data d;
    const TimeField u(d.u), v(d.v);
    EXPECT_EQ(inner_scriptH(d.grid, d.ops, u, v, Exec::Serial), inner_scriptH(d.grid, d.ops, u, v, Exec::Parallel));
    const BoundaryControl q(d.u.topRows(d.ops.num_gamma2())), r(d.v.topRows(d.ops.num_gamma2()));
    EXPECT_EQ(inner_scriptQ(d.grid, d.ops, q, r, Exec::Serial), inner_scriptQ(d.grid, d.ops, q, r, Exec::Parallel));
}

TEST(Norms, ConstantFieldNorms)
{
    // ||1||_scriptH^2 = T |Omega|, ||1||_scriptQ^2 = T |Gamma2|, L2(V) adds no gradient
    const DiscreteOperators ops = parctrl::testing::ops_2d(6);
    const TimeGrid grid{2.0, 10};
    const TimeField one(Eigen::MatrixXd::Ones(ops.num_nodes(), grid.N + 1));
    const BoundaryControl qone(Eigen::MatrixXd::Ones(ops.num_gamma2(), grid.N + 1));
    EXPECT_NEAR(norm_scriptH(grid, ops, one), std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(norm_scriptQ(grid, ops, qone), std::sqrt(6.0), 1e-12);
    EXPECT_NEAR(norm_L2V(grid, ops, one), std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(norm_L2Gamma1(grid, ops, one), std::sqrt(2.0), 1e-12);
}

TEST(Norms, TraceAndEmbedAreInverse)
{
    const DiscreteOperators ops = parctrl::testing::ops_2d(4);
    const TimeGrid grid{1.0, 3};
    const BoundaryControl q(Eigen::MatrixXd::Random(ops.num_gamma2(), grid.N + 1));
    const BoundaryControl back = trace_gamma2(ops, embed_control(ops, q));
    EXPECT_TRUE((back.values.array() == q.values.array()).all());
}
