#include <gtest/gtest.h>

#include <random>

#include "parctrl/adjoint.hpp"
#include "parctrl/control.hpp"
#include "parctrl/norms.hpp"
#include "parctrl/properties.hpp"
#include "support.hpp"

using namespace parctrl;

namespace {

struct Problem {
    Mesh mesh = build_rect_mesh(8, 8, {Side::Left});
    DiscreteOperators ops = assemble(mesh);
    TimeGrid grid{1.0, 25};
    ProblemSpec spec = parctrl::testing::benchmark_spec(mesh, ops, grid);
};

} // namespace

TEST(Adjoint, DualityDirichletAndRobin)
{
    const Problem s;
    std::mt19937_64 rng(11);
    EXPECT_TRUE(check_adjoint_duality(s.ops, s.spec, s.grid, Alpha::dirichlet(), 5, rng).pass);
    EXPECT_TRUE(check_adjoint_duality(s.ops, s.spec, s.grid, Alpha::robin(5.0), 5, rng).pass);
}

TEST(Adjoint, TransposeOfStateMap)
{
    // (S eta, w)_scriptH = (eta, S^* w): the linear state map against the adjoint with an arbitrary source
    const Problem s;
    const HeatStepper st(s.ops, s.grid, Alpha::dirichlet());
    std::mt19937_64 rng(3);
    const TimeField w = random_field(s.ops.num_nodes(), s.grid, rng);
    const BoundaryControl eta = random_control(s.ops.num_gamma2(), s.grid, rng);
    const Vector zb = Vector::Zero(static_cast<Eigen::Index>(s.ops.dirichlet_nodes.size()));
    const TimeField u = st.forward(zb, Vector::Zero(s.ops.num_nodes()), TimeField::zeros(s.ops.num_nodes(), s.grid), eta);
    const TimeField p = st.backward(w);
    const double lhs = inner_scriptH(s.grid, s.ops, u, w);
    const double rhs = -inner_scriptQ(s.grid, s.ops, eta, trace_gamma2(s.ops, p));
    EXPECT_LT(relative_gap(lhs, rhs), 1e-11);
}

TEST(Adjoint, VanishesOnGamma1AndForZeroSource)
{
    const Problem s;
    const TimeField u = solve_parabolic_dirichlet(s.ops, s.spec, BoundaryControl::zeros(s.ops.num_gamma2(), s.grid), s.grid);
    const TimeField p = solve_adjoint_dirichlet(s.ops, u, s.spec.z_d, s.grid);
    for (int k = 0; k <= s.grid.N; ++k)
        for (int node : s.ops.dirichlet_nodes) EXPECT_EQ(p.values(node, k), 0.0);
    const TimeField p0 = solve_adjoint_dirichlet(s.ops, s.spec.z_d, s.spec.z_d, s.grid);
    EXPECT_EQ(p0.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Adjoint, LastStepHasOnlyOneSourceTerm)
{
    // A p^N = dt M (u^N - z^N)
    const Problem s;
    const TimeField u = solve_parabolic_dirichlet(s.ops, s.spec, BoundaryControl::zeros(s.ops.num_gamma2(), s.grid), s.grid);
    const TimeField p = solve_adjoint_robin(s.ops, u, s.spec.z_d, 2.0, s.grid);
    const double dt = s.grid.dt();
    const SparseMatrix A = s.ops.mass + dt * (s.ops.stiffness + 2.0 * s.ops.boundary_gamma1);
    const Vector r = A * p.step(s.grid.N) - dt * (s.ops.mass * (u.step(s.grid.N) - s.spec.z_d.step(s.grid.N)));
    EXPECT_LT(r.norm(), 1e-12);
}

TEST(Adjoint, RoutesOnAlpha)
{
    const Problem s;
    const TimeField u = solve_parabolic_dirichlet(s.ops, s.spec, BoundaryControl::zeros(s.ops.num_gamma2(), s.grid), s.grid);
    EXPECT_EQ(solve_adjoint(s.ops, u, s.spec.z_d, Alpha::robin(3.0), s.grid).values,
              solve_adjoint_robin(s.ops, u, s.spec.z_d, 3.0, s.grid).values);
    EXPECT_EQ(solve_adjoint(s.ops, u, s.spec.z_d, Alpha::dirichlet(), s.grid).values,
              solve_adjoint_dirichlet(s.ops, u, s.spec.z_d, s.grid).values);
}
