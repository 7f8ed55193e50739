#include "parctrl/control.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "parctrl/error.hpp"
#include "parctrl/norms.hpp"

namespace parctrl {

namespace {

/// Element of H x Q for the joint problem.
struct ControlPair {
    TimeField g;
    BoundaryControl q;

    ControlPair& operator+=(const ControlPair& o) { g += o.g; q += o.q; return *this; }
    ControlPair& operator-=(const ControlPair& o) { g -= o.g; q -= o.q; return *this; }
    ControlPair& operator*=(double s) { g *= s; q *= s; return *this; }
    friend ControlPair operator+(ControlPair a, const ControlPair& b) { return a += b; }
    friend ControlPair operator-(ControlPair a, const ControlPair& b) { return a -= b; }
    friend ControlPair operator*(double s, ControlPair a) { return a *= s; }
};

/// Pieces of a linear-quadratic reduced problem f(x) = f(0) + <g0, x> + 1/2 <x, H x>.
template <class Vec>
struct Quadratic {
    std::function<Vec(const Vec&)> hessian;
    std::function<Vec(const Vec&)> gradient;  // true gradient through full solves
    std::function<double(const Vec&, const Vec&)> inner;
    std::function<double(const Vec&)> residual; // optimality residual measure of a gradient
};

template <class Vec>
struct CgOutcome {
    Vec x;
    Vec grad;
    double residual = 0.0;
    double initial_residual = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> history;
};

template <class Vec>
CgOutcome<Vec> minimize_quadratic(const Quadratic<Vec>& prob, const Vec& zero, double f0, const OptimOptions& opt)
{
    PARCTRL_REQUIRE(opt.tol > 0.0, "optimizer tolerance must be > 0");
    PARCTRL_REQUIRE(opt.max_iter > 0, "optimizer iteration cap must be > 0");

    CgOutcome<Vec> out;
    const Vec g0 = prob.gradient(zero);
    out.initial_residual = prob.residual(g0);
    const double threshold = opt.tol * std::max(1.0, out.initial_residual);

    Vec x = zero;
    Vec hx = zero;
    Vec grad = g0;
    auto cost_at = [&](const Vec& xv, const Vec& hxv) { return f0 + prob.inner(g0, xv) + 0.5 * prob.inner(xv, hxv); };
    out.history.push_back(f0);

    int iters = 0;
    double res = out.initial_residual;
    // restarts refresh the recurrence residual from a true gradient evaluation
    for (int restart = 0; restart < 8 && res > threshold && iters < opt.max_iter; ++restart) {
        Vec r = -1.0 * grad;
        Vec d = r;
        double rr = prob.inner(r, r);
        while (iters < opt.max_iter) {
            const Vec hd = prob.hessian(d);
            const double dhd = prob.inner(d, hd);
            if (!(dhd > 0.0)) break; // exact solution reached or loss of positivity
            const double step = rr / dhd;
            x += step * d;
            hx += step * hd;
            r -= step * hd;
            ++iters;
            out.history.push_back(cost_at(x, hx));
            const double rr_new = prob.inner(r, r);
            if (prob.residual(-1.0 * r) <= 0.5 * threshold) break;
            d = r + (rr_new / rr) * d;
            rr = rr_new;
        }
        grad = prob.gradient(x);
        res = prob.residual(grad);
        hx = grad - g0; // H x = grad(x) - grad(0)
    }
    out.x = std::move(x);
    out.grad = std::move(grad);
    out.residual = res;
    out.iterations = iters;
    out.converged = res <= threshold;
    return out;
}

double scaled(double abs, double initial) { return abs / std::max(1.0, initial); }

} // namespace

TrackingModel::TrackingModel(const DiscreteOperators& ops, const ProblemSpec& spec, const TimeGrid& grid, Alpha alpha)
    : ops_(&ops), spec_(&spec), stepper_(ops, grid, alpha)
{
    spec.validate(ops, grid);
}

TimeField TrackingModel::zero_field() const { return TimeField::zeros(ops_->num_nodes(), grid()); }
BoundaryControl TrackingModel::zero_control() const { return BoundaryControl::zeros(ops_->num_gamma2(), grid()); }

TimeField TrackingModel::state(const TimeField& g, const BoundaryControl& q) const
{
    return stepper_.forward(spec_->b, spec_->v_b, g, q);
}

TimeField TrackingModel::adjoint(const TimeField& u) const { return stepper_.backward(u - spec_->z_d); }

TimeField TrackingModel::linear_state(const TimeField& g, const BoundaryControl& q) const
{
    return stepper_.forward(Vector::Zero(spec_->b.size()), Vector::Zero(ops_->num_nodes()), g, q);
}

TimeField TrackingModel::linear_adjoint(const TimeField& du) const { return stepper_.backward(du); }

double TrackingModel::tracking(const TimeField& u) const
{
    const TimeField e = u - spec_->z_d;
    return 0.5 * inner_scriptH(grid(), *ops_, e, e);
}

double TrackingModel::cost_plus(const TimeField& g, const BoundaryControl& q) const
{
    return tracking(state(g, q)) + 0.5 * spec_->M1 * inner_scriptH(grid(), *ops_, g, g) +
           0.5 * spec_->M * inner_scriptQ(grid(), *ops_, q, q);
}

namespace {

BoundaryControl boundary_gradient(const TrackingModel& model, const TimeField& p, const BoundaryControl& q)
{
    BoundaryControl grad = model.spec().M * q - trace_gamma2(model.ops(), p);
    grad.step(0) = model.spec().M * q.step(0);
    return grad;
}

TimeField distributed_gradient(const TrackingModel& model, const TimeField& p, const TimeField& g)
{
    TimeField grad = model.spec().M1 * g + p;
    grad.step(0) = model.spec().M1 * g.step(0);
    return grad;
}

double cost_J_impl(const DiscreteOperators& ops, const ProblemSpec& spec, const BoundaryControl& q,
                   const TimeGrid& grid, Alpha alpha)
{
    const TrackingModel model(ops, spec, grid, alpha);
    PARCTRL_REQUIRE(q.matches(ops.num_gamma2(), grid), "cost_J: control shape mismatch");
    return model.tracking(model.state(spec.g, q)) + 0.5 * spec.M * inner_scriptQ(grid, ops, q, q);
}

BoundaryControl gradient_J_impl(const DiscreteOperators& ops, const ProblemSpec& spec, const BoundaryControl& q,
                                const TimeGrid& grid, Alpha alpha)
{
    const TrackingModel model(ops, spec, grid, alpha);
    PARCTRL_REQUIRE(q.matches(ops.num_gamma2(), grid), "gradient_J: control shape mismatch");
    return boundary_gradient(model, model.adjoint(model.state(spec.g, q)), q);
}

} // namespace

double cost_J(const DiscreteOperators& ops, const ProblemSpec& spec, const BoundaryControl& q, const TimeGrid& grid)
{
    return cost_J_impl(ops, spec, q, grid, Alpha::dirichlet());
}

double cost_J_alpha(const DiscreteOperators& ops, const ProblemSpec& spec, const BoundaryControl& q, double alpha,
                    const TimeGrid& grid)
{
    PARCTRL_REQUIRE(alpha > 0.0 && std::isfinite(alpha), "cost_J_alpha: alpha must be finite and > 0");
    return cost_J_impl(ops, spec, q, grid, Alpha::robin(alpha));
}

BoundaryControl gradient_J(const DiscreteOperators& ops, const ProblemSpec& spec, const BoundaryControl& q,
                           const TimeGrid& grid)
{
    return gradient_J_impl(ops, spec, q, grid, Alpha::dirichlet());
}

BoundaryControl gradient_J_alpha(const DiscreteOperators& ops, const ProblemSpec& spec, const BoundaryControl& q,
                                 double alpha, const TimeGrid& grid)
{
    PARCTRL_REQUIRE(alpha > 0.0 && std::isfinite(alpha), "gradient_J_alpha: alpha must be finite and > 0");
    return gradient_J_impl(ops, spec, q, grid, Alpha::robin(alpha));
}

OptimResult optimize_boundary(const DiscreteOperators& ops, const ProblemSpec& spec, const TimeGrid& grid,
                              const OptimOptions& options, Alpha variant)
{
    const TrackingModel model(ops, spec, grid, variant);
    const TimeField zero_g = model.zero_field();

    Quadratic<BoundaryControl> prob;
    prob.inner = [&](const BoundaryControl& a, const BoundaryControl& b) { return inner_scriptQ(grid, ops, a, b); };
    prob.residual = [&](const BoundaryControl& g) { return norm_scriptQ(grid, ops, g); };
    prob.gradient = [&](const BoundaryControl& q) {
        return boundary_gradient(model, model.adjoint(model.state(spec.g, q)), q);
    };
    prob.hessian = [&](const BoundaryControl& eta) {
        return boundary_gradient(model, model.linear_adjoint(model.linear_state(zero_g, eta)), eta);
    };

    const BoundaryControl zero = model.zero_control();
    const double f0 = model.tracking(model.state(spec.g, zero));
    auto cg = minimize_quadratic(prob, zero, f0, options);

    OptimResult res;
    res.u_opt = model.state(spec.g, cg.x);
    res.p_opt = model.adjoint(res.u_opt);
    res.cost = model.tracking(res.u_opt) + 0.5 * spec.M * inner_scriptQ(grid, ops, cg.x, cg.x);
    res.q_opt = std::move(cg.x);
    res.residual_abs = cg.residual;
    res.initial_residual = cg.initial_residual;
    res.optimality_residual = scaled(cg.residual, cg.initial_residual);
    res.iterations = cg.iterations;
    res.converged = cg.converged;
    res.cost_history = std::move(cg.history);
    return res;
}

OptimResult optimize_distributed(const DiscreteOperators& ops, const ProblemSpec& spec, const TimeGrid& grid,
                                 const BoundaryControl& q_fixed, const OptimOptions& options, Alpha variant)
{
    const TrackingModel model(ops, spec, grid, variant);
    PARCTRL_REQUIRE(q_fixed.matches(ops.num_gamma2(), grid), "optimize_distributed: fixed flux shape mismatch");
    const BoundaryControl zero_q = model.zero_control();

    Quadratic<TimeField> prob;
    prob.inner = [&](const TimeField& a, const TimeField& b) { return inner_scriptH(grid, ops, a, b); };
    prob.residual = [&](const TimeField& g) { return norm_scriptH(grid, ops, g); };
    prob.gradient = [&](const TimeField& g) {
        return distributed_gradient(model, model.adjoint(model.state(g, q_fixed)), g);
    };
    prob.hessian = [&](const TimeField& h) {
        return distributed_gradient(model, model.linear_adjoint(model.linear_state(h, zero_q)), h);
    };

    const TimeField zero = model.zero_field();
    const double q_term = 0.5 * spec.M * inner_scriptQ(grid, ops, q_fixed, q_fixed);
    const double f0 = model.tracking(model.state(zero, q_fixed)) + q_term;
    auto cg = minimize_quadratic(prob, zero, f0, options);

    OptimResult res;
    res.u_opt = model.state(cg.x, q_fixed);
    res.p_opt = model.adjoint(res.u_opt);
    res.cost = model.tracking(res.u_opt) + 0.5 * spec.M1 * inner_scriptH(grid, ops, cg.x, cg.x) + q_term;
    res.g_opt = std::move(cg.x);
    res.q_opt = q_fixed;
    res.residual_abs = cg.residual;
    res.initial_residual = cg.initial_residual;
    res.optimality_residual = scaled(cg.residual, cg.initial_residual);
    res.iterations = cg.iterations;
    res.converged = cg.converged;
    res.cost_history = std::move(cg.history);
    return res;
}

OptimResult optimize_simultaneous(const DiscreteOperators& ops, const ProblemSpec& spec, const TimeGrid& grid,
                                  const OptimOptions& options, Alpha variant)
{
    const TrackingModel model(ops, spec, grid, variant);

    auto block_gradient = [&](const TimeField& p, const ControlPair& x) {
        return ControlPair{distributed_gradient(model, p, x.g), boundary_gradient(model, p, x.q)};
    };

    Quadratic<ControlPair> prob;
    prob.inner = [&](const ControlPair& a, const ControlPair& b) {
        return inner_scriptH(grid, ops, a.g, b.g) + inner_scriptQ(grid, ops, a.q, b.q);
    };
    prob.residual = [&](const ControlPair& r) { return norm_scriptH(grid, ops, r.g) + norm_scriptQ(grid, ops, r.q); };
    prob.gradient = [&](const ControlPair& x) { return block_gradient(model.adjoint(model.state(x.g, x.q)), x); };
    prob.hessian = [&](const ControlPair& d) {
        return block_gradient(model.linear_adjoint(model.linear_state(d.g, d.q)), d);
    };

    const ControlPair zero{model.zero_field(), model.zero_control()};
    const double f0 = model.tracking(model.state(zero.g, zero.q));
    auto cg = minimize_quadratic(prob, zero, f0, options);

    OptimResult res;
    res.u_opt = model.state(cg.x.g, cg.x.q);
    res.p_opt = model.adjoint(res.u_opt);
    res.cost = model.tracking(res.u_opt) + 0.5 * spec.M1 * inner_scriptH(grid, ops, cg.x.g, cg.x.g) +
               0.5 * spec.M * inner_scriptQ(grid, ops, cg.x.q, cg.x.q);
    res.g_opt = std::move(cg.x.g);
    res.q_opt = std::move(cg.x.q);
    res.residual_abs = cg.residual;
    res.initial_residual = cg.initial_residual;
    res.optimality_residual = scaled(cg.residual, cg.initial_residual);
    res.iterations = cg.iterations;
    res.converged = cg.converged;
    res.cost_history = std::move(cg.history);
    return res;
}

ControlGapEstimate estimate_control_gap(const DiscreteOperators& ops, const ProblemSpec& spec, const TimeGrid& grid,
                                        const TimeField& g_fixed, const OptimResult& simultaneous,
                                        const OptimOptions& options, Alpha variant)
{
    if (!simultaneous.converged || !simultaneous.g_opt || !simultaneous.q_opt)
        throw SolverError("control gap estimate: simultaneous optimum is not converged");
    PARCTRL_REQUIRE(g_fixed.matches(ops.num_nodes(), grid), "control gap estimate: g shape mismatch");

    ProblemSpec fixed = spec;
    fixed.g = g_fixed;
    ControlGapEstimate est;
    est.boundary = optimize_boundary(ops, fixed, grid, options, variant);
    if (!est.boundary.converged) throw SolverError("control gap estimate: boundary optimum is not converged");

    est.coercivity = variant.is_dirichlet() ? ops.lambda0 : ops.lambda_alpha(variant.value);
    est.lhs = norm_scriptQ(grid, ops, *est.boundary.q_opt - *simultaneous.q_opt);
    est.rhs = ops.trace_norm / (est.coercivity * spec.M) *
              norm_scriptH(grid, ops, simultaneous.u_opt - est.boundary.u_opt);
    est.holds = est.lhs <= est.rhs * (1.0 + 1e-9);
    return est;
}

ControlGapEstimate estimate_control_gap(const DiscreteOperators& ops, const ProblemSpec& spec, const TimeGrid& grid,
                                        const TimeField& g_fixed, const OptimOptions& options, Alpha variant)
{
    const OptimResult sim = optimize_simultaneous(ops, spec, grid, options, variant);
    return estimate_control_gap(ops, spec, grid, g_fixed, sim, options, variant);
}

} // namespace parctrl
