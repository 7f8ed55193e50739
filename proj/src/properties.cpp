#include "parctrl/properties.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "parctrl/norms.hpp"

namespace parctrl {

double relative_gap(double a, double b)
{
    const double scale = std::max({std::abs(a), std::abs(b), std::numeric_limits<double>::min()});
    return std::abs(a - b) / scale;
}

BoundaryControl random_control(int rows, const TimeGrid& grid, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    BoundaryControl q = BoundaryControl::zeros(rows, grid);
    for (Eigen::Index k = 0; k < q.values.cols(); ++k)
        for (Eigen::Index i = 0; i < q.values.rows(); ++i) q.values(i, k) = u(rng);
    return q;
}

TimeField random_field(int rows, const TimeGrid& grid, std::mt19937_64& rng)
{
    return TimeField(random_control(rows, grid, rng).values);
}

namespace {

PropertyResult finish(std::string name, double worst, double threshold, std::string detail = {})
{
    return {std::move(name), worst, threshold, worst <= threshold, std::move(detail)};
}

double J(const DiscreteOperators& ops, const ProblemSpec& spec, const TimeGrid& grid, Alpha alpha,
         const BoundaryControl& q)
{
    return alpha.is_dirichlet() ? cost_J(ops, spec, q, grid) : cost_J_alpha(ops, spec, q, alpha.value, grid);
}

} // namespace

PropertyResult check_adjoint_duality(const DiscreteOperators& ops, const ProblemSpec& spec, const TimeGrid& grid,
                                     Alpha alpha, int pairs, std::mt19937_64& rng, double tol)
{
    const TrackingModel model(ops, spec, grid, alpha);
    const TimeField zero_g = model.zero_field();
    double worst = 0.0;
    for (int i = 0; i < pairs; ++i) {
        const BoundaryControl q = random_control(ops.num_gamma2(), grid, rng);
        const BoundaryControl eta = random_control(ops.num_gamma2(), grid, rng);
        const TimeField u = model.state(spec.g, q);
        const TimeField p = model.adjoint(u);
        const double lhs = inner_scriptH(grid, ops, model.linear_state(zero_g, eta), u - spec.z_d);
        const double rhs = -inner_scriptQ(grid, ops, eta, trace_gamma2(ops, p));
        worst = std::max(worst, relative_gap(lhs, rhs));
    }
    const std::string tag = alpha.is_dirichlet() ? "dirichlet" : "robin(" + std::to_string(alpha.value) + ")";
    return finish("adjoint_duality_" + tag, worst, tol);
}

PropertyResult check_gradient(const DiscreteOperators& ops, const ProblemSpec& spec, const TimeGrid& grid,
                              Alpha alpha, int directions, const std::vector<double>& eps, std::mt19937_64& rng,
                              double tol)
{
    // The gap is measured against max(|(J'(q), eta)|, ||J'(q)|| ||eta||): random directions can make the
    // directional derivative itself nearly vanish, leaving only the u |J| / eps cancellation floor.
    double worst = 0.0;
    double worst_plain = 0.0;
    for (int i = 0; i < directions; ++i) {
        const BoundaryControl q = random_control(ops.num_gamma2(), grid, rng);
        const BoundaryControl eta = random_control(ops.num_gamma2(), grid, rng);
        const BoundaryControl grad = alpha.is_dirichlet() ? gradient_J(ops, spec, q, grid)
                                                          : gradient_J_alpha(ops, spec, q, alpha.value, grid);
        const double exact = inner_scriptQ(grid, ops, grad, eta);
        const double scale = std::max({std::abs(exact), norm_scriptQ(grid, ops, grad) * norm_scriptQ(grid, ops, eta),
                                       std::numeric_limits<double>::min()});
        for (double e : eps) {
            const double fd = (J(ops, spec, grid, alpha, q + e * eta) - J(ops, spec, grid, alpha, q - e * eta)) / (2 * e);
            worst = std::max(worst, std::abs(fd - exact) / scale);
            worst_plain = std::max(worst_plain, relative_gap(fd, exact));
        }
    }
    char detail[96];
    std::snprintf(detail, sizeof detail, "gap relative to |(J'(q), eta)| alone: %.3g", worst_plain);
    const std::string tag = alpha.is_dirichlet() ? "dirichlet" : "robin";
    return finish("gradient_fd_" + tag, worst, tol, detail);
}

PropertyResult check_convexity_identity(const DiscreteOperators& ops, const ProblemSpec& spec, const TimeGrid& grid,
                                        int triples, std::mt19937_64& rng, double tol)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < triples; ++i) {
        const BoundaryControl q1 = random_control(ops.num_gamma2(), grid, rng);
        const BoundaryControl q2 = random_control(ops.num_gamma2(), grid, rng);
        const double t = unit(rng);
        const TimeField u1 = solve_parabolic_dirichlet(ops, spec, q1, grid);
        const TimeField u2 = solve_parabolic_dirichlet(ops, spec, q2, grid);
        const double du = norm_scriptH(grid, ops, u1 - u2);
        const double dq = norm_scriptQ(grid, ops, q1 - q2);
        const double lhs = cost_J(ops, spec, t * q1 + (1.0 - t) * q2, grid);
        const double rhs = t * cost_J(ops, spec, q1, grid) + (1.0 - t) * cost_J(ops, spec, q2, grid) -
                           0.5 * t * (1.0 - t) * (du * du + spec.M * dq * dq);
        worst = std::max(worst, relative_gap(lhs, rhs));
    }
    return finish("convexity_identity", worst, tol);
}

OptimalityCheck check_optimality(const DiscreteOperators& ops, const ProblemSpec& spec, const TimeGrid& grid,
                                 const OptimOptions& options, int max_iterations, int probes, std::mt19937_64& rng)
{
    OptimalityCheck out;
    out.result = optimize_boundary(ops, spec, grid, options, Alpha::dirichlet());
    const OptimResult& r = out.result;
    const bool ok = r.converged && r.iterations <= max_iterations;
    out.residual = finish("optimality_residual", r.residual_abs, options.tol,
                          "iterations=" + std::to_string(r.iterations) + (r.converged ? "" : " (not converged)"));
    if (!ok) out.residual.pass = false;

    const double j_opt = r.cost;
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < probes; ++i) {
        const double scale = std::pow(10.0, -static_cast<double>(i % 4));
        const BoundaryControl probe = *r.q_opt + scale * random_control(ops.num_gamma2(), grid, rng);
        // J(q_bar) - J(probe), must not be positive beyond roundoff
        worst = std::max(worst, (j_opt - cost_J(ops, spec, probe, grid)) / std::max(1.0, std::abs(j_opt)));
    }
    out.probes = finish("optimality_probes", std::max(worst, 0.0), 1e-12);
    return out;
}

std::vector<PropertyResult> check_lambda_bar(const DiscreteOperators& ops, const ProblemSpec& spec,
                                             const BoundaryControl& q0, const TimeGrid& grid, ScalarVariant variant,
                                             double tol)
{
    const QuadraticCoefficients c = lambda_bar(ops, spec, q0, grid, variant);
    const double hp = restricted_cost(ops, spec, q0, grid, variant, 1.0);
    const double hm = restricted_cost(ops, spec, q0, grid, variant, -1.0);
    const double h0 = restricted_cost(ops, spec, q0, grid, variant, 0.0);
    const double a = 0.5 * (hp + hm) - h0;
    const double b = 0.5 * (hp - hm);
    const double vertex = -b / (2.0 * a);

    std::vector<PropertyResult> out;
    const std::string tag = variant.name();
    out.push_back(finish("lambda_fit_" + tag, relative_gap(vertex, c.lambda_opt), tol,
                         "lambda_opt=" + std::to_string(c.lambda_opt)));
    const double h_opt = restricted_cost(ops, spec, q0, grid, variant, c.lambda_opt);
    const double h_nb = std::min(restricted_cost(ops, spec, q0, grid, variant, c.lambda_opt + 0.1),
                                 restricted_cost(ops, spec, q0, grid, variant, c.lambda_opt - 0.1));
    out.push_back(finish("lambda_min_" + tag, std::max(0.0, h_opt - h_nb), 0.0));
    // the discriminant of a positive quadratic must be negative
    out.push_back(finish("lambda_discriminant_" + tag, c.discriminant(), 0.0));
    if (out.back().value == 0.0) out.back().pass = false;
    return out;
}

PropertyResult check_decay_bound(const DecayStudy& study, const std::string& name, double slack)
{
    double worst = 0.0;
    for (const DecayRow& row : study.rows) worst = std::max(worst, row.ratio());
    return finish(name, worst, slack);
}

} // namespace parctrl
