#include "parctrl/state.hpp"

#include <string>

#include "parctrl/error.hpp"
#include "parctrl/kernels.hpp"
#include "parctrl/norms.hpp"

namespace parctrl {

namespace {

void require_alpha(Alpha alpha)
{
    PARCTRL_REQUIRE(alpha.is_dirichlet() || alpha.value > 0.0,
                    "heat transfer coefficient alpha must be > 0, got " + std::to_string(alpha.value));
}

} // namespace

void ProblemSpec::validate(const DiscreteOperators& ops, const TimeGrid& grid) const
{
    grid.validate();
    const int n = ops.num_nodes();
    PARCTRL_REQUIRE(g.matches(n, grid), "spec.g shape does not match mesh/grid");
    PARCTRL_REQUIRE(z_d.matches(n, grid), "spec.z_d shape does not match mesh/grid");
    PARCTRL_REQUIRE(b.size() == static_cast<Eigen::Index>(ops.dirichlet_nodes.size()),
                    "spec.b must hold one value per Gamma1 node");
    PARCTRL_REQUIRE(v_b.size() == n, "spec.v_b must hold one value per node");
    PARCTRL_REQUIRE(M > 0.0, "control weight M must be > 0");
    PARCTRL_REQUIRE(M1 > 0.0, "distributed weight M1 must be > 0");
    require_alpha(alpha);
    for (std::size_t i = 0; i < ops.dirichlet_nodes.size(); ++i)
        PARCTRL_REQUIRE(v_b[ops.dirichlet_nodes[i]] == b[static_cast<Eigen::Index>(i)],
                        "initial temperature v_b must equal b on Gamma1");
}

HeatStepper::HeatStepper(const DiscreteOperators& ops, const TimeGrid& grid, Alpha alpha)
    : ops_(&ops), grid_(grid), alpha_(alpha)
{
    grid.validate();
    require_alpha(alpha);
    const double dt = grid.dt();
    if (alpha.is_dirichlet()) {
        step_matrix_ = ops.mass + dt * ops.stiffness;
        coupling_ = restrict_matrix(step_matrix_, ops.free_nodes, ops.dirichlet_nodes);
        solver_ = std::make_shared<SpdSolver>(restrict_matrix(step_matrix_, ops.free_nodes, ops.free_nodes));
    } else {
        step_matrix_ = ops.mass + dt * (ops.stiffness + alpha.value * ops.boundary_gamma1);
        solver_ = std::make_shared<SpdSolver>(step_matrix_);
    }
}

Vector HeatStepper::solve_step(const Vector& rhs_full, const Vector* lift) const
{
    if (!alpha_.is_dirichlet()) return solver_->solve(rhs_full);
    const auto& ops = *ops_;
    Vector rhs = gather(rhs_full, ops.free_nodes);
    if (lift != nullptr) rhs -= coupling_ * (*lift);
    Vector out = Vector::Zero(ops.num_nodes());
    scatter(solver_->solve(rhs), ops.free_nodes, out);
    if (lift != nullptr) scatter(*lift, ops.dirichlet_nodes, out);
    return out;
}

TimeField HeatStepper::forward(const Vector& b, const Vector& v_b, const TimeField& g,
                               const BoundaryControl& q) const
{
    const auto& ops = *ops_;
    const int n = ops.num_nodes();
    PARCTRL_REQUIRE(g.matches(n, grid_), "state solve: g shape does not match mesh/grid");
    PARCTRL_REQUIRE(q.matches(ops.num_gamma2(), grid_), "state solve: q shape does not match Gamma2/grid");
    PARCTRL_REQUIRE(v_b.size() == n, "state solve: v_b has wrong length");
    PARCTRL_REQUIRE(b.size() == static_cast<Eigen::Index>(ops.dirichlet_nodes.size()),
                    "state solve: b has wrong length");

    const double dt = grid_.dt();
    // sources for every step at once: dt (M g^k - B2 E2 q^k)
    Eigen::MatrixXd source = kernels::apply_columns(ops.mass, g.values, Exec::Parallel);
    source -= kernels::apply_columns(ops.boundary_gamma2, embed_control(ops, q).values, Exec::Parallel);
    source *= dt;
    Vector robin_load;
    if (!alpha_.is_dirichlet()) robin_load = dt * alpha_.value * (ops.boundary_gamma1 * embed_gamma1(ops, b));

    TimeField u = TimeField::zeros(n, grid_);
    u.step(0) = v_b;
    for (int k = 1; k <= grid_.N; ++k) {
        Vector rhs = ops.mass * u.step(k - 1) + source.col(k);
        if (alpha_.is_dirichlet()) {
            u.step(k) = solve_step(rhs, &b);
        } else {
            rhs += robin_load;
            u.step(k) = solve_step(rhs, nullptr);
        }
    }
    return u;
}

TimeField HeatStepper::backward(const TimeField& source) const
{
    const auto& ops = *ops_;
    const int n = ops.num_nodes();
    PARCTRL_REQUIRE(source.matches(n, grid_), "adjoint solve: source shape does not match mesh/grid");
    const double dt = grid_.dt();
    const Eigen::MatrixXd load = dt * kernels::apply_columns(ops.mass, source.values, Exec::Parallel);

    TimeField p = TimeField::zeros(n, grid_);
    Vector next = Vector::Zero(n); // p^{N+1}
    for (int k = grid_.N; k >= 1; --k) {
        const Vector rhs = ops.mass * next + load.col(k);
        next = solve_step(rhs, nullptr);
        p.step(k) = next;
    }
    p.step(0) = solve_step(ops.mass * next, nullptr);
    return p;
}

EllipticSolver::EllipticSolver(const DiscreteOperators& ops, Alpha alpha) : ops_(&ops), alpha_(alpha)
{
    require_alpha(alpha);
    if (alpha.is_dirichlet()) {
        matrix_ = ops.stiffness;
        coupling_ = restrict_matrix(matrix_, ops.free_nodes, ops.dirichlet_nodes);
        solver_ = std::make_shared<SpdSolver>(restrict_matrix(matrix_, ops.free_nodes, ops.free_nodes));
    } else {
        matrix_ = ops.stiffness + alpha.value * ops.boundary_gamma1;
        solver_ = std::make_shared<SpdSolver>(matrix_);
    }
}

Vector EllipticSolver::solve(const Vector& g, const Vector& q, const Vector& b) const
{
    const auto& ops = *ops_;
    const int n = ops.num_nodes();
    PARCTRL_REQUIRE(g.size() == n, "elliptic solve: g has wrong length");
    PARCTRL_REQUIRE(q.size() == ops.num_gamma2(), "elliptic solve: q has wrong length");
    PARCTRL_REQUIRE(b.size() == static_cast<Eigen::Index>(ops.dirichlet_nodes.size()),
                    "elliptic solve: b has wrong length");
    Vector rhs = ops.mass * g - ops.boundary_gamma2 * embed_gamma2(ops, q);
    if (!alpha_.is_dirichlet()) {
        rhs += alpha_.value * (ops.boundary_gamma1 * embed_gamma1(ops, b));
        return solver_->solve(rhs);
    }
    Vector rhs_f = gather(rhs, ops.free_nodes) - coupling_ * b;
    Vector out = Vector::Zero(n);
    scatter(solver_->solve(rhs_f), ops.free_nodes, out);
    scatter(b, ops.dirichlet_nodes, out);
    return out;
}

TimeField solve_parabolic_dirichlet(const DiscreteOperators& ops, const ProblemSpec& spec, const BoundaryControl& q,
                                    const TimeGrid& grid)
{
    spec.validate(ops, grid);
    return HeatStepper(ops, grid, Alpha::dirichlet()).forward(spec.b, spec.v_b, spec.g, q);
}

TimeField solve_parabolic_robin(const DiscreteOperators& ops, const ProblemSpec& spec, const BoundaryControl& q,
                                const TimeGrid& grid)
{
    PARCTRL_REQUIRE(!spec.alpha.is_dirichlet(), "solve_parabolic_robin: alpha must be finite");
    spec.validate(ops, grid);
    return HeatStepper(ops, grid, spec.alpha).forward(spec.b, spec.v_b, spec.g, q);
}

TimeField solve_parabolic(const DiscreteOperators& ops, const ProblemSpec& spec, const BoundaryControl& q,
                          const TimeGrid& grid)
{
    return spec.alpha.is_dirichlet() ? solve_parabolic_dirichlet(ops, spec, q, grid)
                                     : solve_parabolic_robin(ops, spec, q, grid);
}

Vector solve_elliptic_dirichlet(const DiscreteOperators& ops, const Vector& g, const Vector& q, const Vector& b)
{
    return EllipticSolver(ops, Alpha::dirichlet()).solve(g, q, b);
}

Vector solve_elliptic_robin(const DiscreteOperators& ops, const Vector& g, const Vector& q, const Vector& b,
                            double alpha)
{
    PARCTRL_REQUIRE(alpha > 0.0 && std::isfinite(alpha), "solve_elliptic_robin: alpha must be finite and > 0");
    return EllipticSolver(ops, Alpha::robin(alpha)).solve(g, q, b);
}

} // namespace parctrl
