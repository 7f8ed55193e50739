#include <gtest/gtest.h>

#include <random>

#include "parctrl/control.hpp"
#include "parctrl/error.hpp"
#include "parctrl/norms.hpp"
#include "parctrl/properties.hpp"
#include "support.hpp"

using namespace parctrl;

namespace {

struct Problem {
    Mesh mesh;
    DiscreteOperators ops;
    TimeGrid grid{1.0, 30};
    ProblemSpec spec;
    explicit Problem(int dim = 1)
        : mesh(dim == 1 ? build_interval_mesh(48, 0.0, 1.0, Side::Left) : build_rect_mesh(8, 8, {Side::Left})),
          ops(assemble(mesh)), spec(parctrl::testing::benchmark_spec(mesh, ops, grid))
    {
    }
};

} // namespace

TEST(Control, GradientMatchesFiniteDifferences)
{
    const Problem s(2);
    std::mt19937_64 rng(5);
    EXPECT_TRUE(check_gradient(s.ops, s.spec, s.grid, Alpha::dirichlet(), 3, {1e-2, 1e-4}, rng).pass);
    EXPECT_TRUE(check_gradient(s.ops, s.spec, s.grid, Alpha::robin(5.0), 3, {1e-2, 1e-4}, rng).pass);
}

TEST(Control, ConvexityIdentity)
{
    const Problem s(2);
    std::mt19937_64 rng(9);
    EXPECT_TRUE(check_convexity_identity(s.ops, s.spec, s.grid, 5, rng).pass);
}

TEST(Control, CostIsTrackingPlusPenalty)
{
    const Problem s;
    const BoundaryControl q(Eigen::MatrixXd::Constant(1, s.grid.N + 1, 0.3));
    const TimeField u = solve_parabolic_dirichlet(s.ops, s.spec, q, s.grid);
    const double track = norm_scriptH(s.grid, s.ops, u - s.spec.z_d);
    // ||0.3||_scriptQ^2 = T * 0.09 on the single Gamma2 point
    EXPECT_NEAR(cost_J(s.ops, s.spec, q, s.grid), 0.5 * track * track + 0.5 * 0.09, 1e-13);
}

TEST(Control, OptimizeBoundarySatisfiesOptimality)
{
    for (int dim : {1, 2}) {
        const Problem s(dim);
        for (Alpha a : {Alpha::dirichlet(), Alpha::robin(5.0)}) {
            const OptimResult r = optimize_boundary(s.ops, s.spec, s.grid, {}, a);
            ASSERT_TRUE(r.converged);
            EXPECT_LE(r.optimality_residual, 1e-10);
            // M q - p|Gamma2 = 0 on steps 1..N
            const BoundaryControl res = s.spec.M * *r.q_opt - trace_gamma2(s.ops, r.p_opt);
            EXPECT_LE(norm_scriptQ(s.grid, s.ops, res), 1e-9);
            for (std::size_t i = 1; i < r.cost_history.size(); ++i)
                EXPECT_LE(r.cost_history[i], r.cost_history[i - 1] + 1e-14);
        }
    }
}

TEST(Control, OptimumBeatsProbes)
{
    const Problem s;
    std::mt19937_64 rng(1);
    const OptimalityCheck oc = check_optimality(s.ops, s.spec, s.grid, {}, 200, 20, rng);
    EXPECT_TRUE(oc.residual.pass);
    EXPECT_TRUE(oc.probes.pass);
}

TEST(Control, ZeroTargetReachedGivesZeroControl)
{
    // z_d = u_0 makes q = 0 optimal
    Problem s;
    s.spec.z_d = solve_parabolic_dirichlet(s.ops, s.spec, BoundaryControl::zeros(1, s.grid), s.grid);
    const OptimResult r = optimize_boundary(s.ops, s.spec, s.grid, {}, Alpha::dirichlet());
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.q_opt->values.cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE(r.cost, 1e-24);
}

TEST(Control, DistributedControlOptimality)
{
    const Problem s(2);
    const BoundaryControl q(Eigen::MatrixXd::Constant(s.ops.num_gamma2(), s.grid.N + 1, 0.1));
    const OptimResult r = optimize_distributed(s.ops, s.spec, s.grid, q, {}, Alpha::dirichlet());
    ASSERT_TRUE(r.converged);
    const TimeField res = s.spec.M1 * *r.g_opt + r.p_opt;
    EXPECT_LE(norm_scriptH(s.grid, s.ops, res), 1e-9);
}

TEST(Control, SimultaneousControlAndFixedPoint)
{
    const Problem s(2);
    const OptimResult joint = optimize_simultaneous(s.ops, s.spec, s.grid, {}, Alpha::dirichlet());
    ASSERT_TRUE(joint.converged);
    const ControlGapEstimate fixed = estimate_control_gap(s.ops, s.spec, s.grid, *joint.g_opt, joint, {}, Alpha::dirichlet());
    EXPECT_LE(fixed.lhs, 1e-8);
    std::mt19937_64 rng(4);
    for (int i = 0; i < 2; ++i) {
        const TimeField g = random_field(s.ops.num_nodes(), s.grid, rng);
        const ControlGapEstimate e = estimate_control_gap(s.ops, s.spec, s.grid, g, joint, {}, Alpha::dirichlet());
        EXPECT_TRUE(e.holds) << e.lhs << " vs " << e.rhs;
        EXPECT_DOUBLE_EQ(e.coercivity, s.ops.lambda0);
    }
    const ControlGapEstimate robin = estimate_control_gap(s.ops, s.spec, s.grid, random_field(s.ops.num_nodes(), s.grid, rng), {}, Alpha::robin(0.5));
    EXPECT_TRUE(robin.holds);
    EXPECT_DOUBLE_EQ(robin.coercivity, 0.5 * s.ops.lambda1);
}

TEST(Control, SerialAndParallelKernelsGiveSameOptimum)
{
    // the optimizer uses the parallel kernels; its result must equal a rerun bit for bit
    const Problem s;
    const OptimResult a = optimize_boundary(s.ops, s.spec, s.grid, {}, Alpha::dirichlet());
    const OptimResult b = optimize_boundary(s.ops, s.spec, s.grid, {}, Alpha::dirichlet());
    EXPECT_TRUE((a.q_opt->values.array() == b.q_opt->values.array()).all());
}

TEST(Control, NonConvergenceIsReported)
{
    const Problem s(2);
    const OptimResult r = optimize_boundary(s.ops, s.spec, s.grid, {1e-14, 1}, Alpha::dirichlet());
    EXPECT_FALSE(r.converged);
    EXPECT_THROW(estimate_control_gap(s.ops, s.spec, s.grid, s.spec.g, {1e-14, 1}, Alpha::dirichlet()), SolverError);
}
