#include "parctrl/asymptotics.hpp"

#include <cmath>
#include <limits>

#include "parctrl/adjoint.hpp"
#include "parctrl/error.hpp"
#include "parctrl/kernels.hpp"
#include "parctrl/mesh.hpp"
#include "parctrl/norms.hpp"

namespace parctrl {

namespace {

TimeField gamma1_datum(const DiscreteOperators& ops, const Vector& b, const TimeGrid& grid)
{
    TimeField out = TimeField::zeros(ops.num_nodes(), grid);
    out.values.colwise() = embed_gamma1(ops, b);
    return out;
}

/// Columns 1..N identical (column 0 never enters the scheme).
template <class Space>
bool constant_in_time(const Sampled<Space>& f)
{
    const auto n = f.values.cols();
    for (Eigen::Index k = 1; k < n; ++k)
        if (f.values.col(k) != f.values.col(n - 1)) return false;
    return true;
}


std::vector<double> h_errors(const DiscreteOperators& ops, const TimeField& u, const Vector& u_inf)
{
    std::vector<double> out(static_cast<std::size_t>(u.values.cols()));
    const Eigen::MatrixXd diff = u.values.colwise() - u_inf;
    kernels::column_bilinear(ops.mass, diff, diff, out, Exec::Parallel);
    for (double& v : out) v = std::sqrt(std::max(0.0, v));
    return out;
}

double fit_rate(const std::vector<DecayRow>& rows)
{
    // least squares of log err_H against t over the first half
    const std::size_t half = rows.size() / 2 + 1;
    double st = 0, sy = 0, stt = 0, sty = 0;
    int count = 0;
    for (std::size_t k = 0; k < half && k < rows.size(); ++k) {
        if (!(rows[k].err_H > 0.0)) continue;
        const double y = std::log(rows[k].err_H);
        st += rows[k].t;
        sy += y;
        stt += rows[k].t * rows[k].t;
        sty += rows[k].t * y;
        ++count;
    }
    if (count < 2) return std::numeric_limits<double>::infinity();
    const double denom = count * stt - st * st;
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    return -(count * sty - st * sy) / denom;
}

void require_dirichlet_problem(const DiscreteOperators& ops, const ProblemSpec& spec, const BoundaryControl& q,
                               const TimeGrid& grid)
{
    spec.validate(ops, grid);
    PARCTRL_REQUIRE(q.matches(ops.num_gamma2(), grid), "q shape does not match Gamma2/grid");
    PARCTRL_REQUIRE(ops.lambda0 * grid.T <= kMaxDecayExponent, "decay horizon too long: lambda0 * t_max must be <= 500");
}

} // namespace

std::vector<SweepRow> alpha_sweep(const DiscreteOperators& ops, const ProblemSpec& spec, const TimeGrid& grid,
                                  const std::optional<BoundaryControl>& q, const std::vector<double>& alphas,
                                  const OptimOptions& options, Exec exec)
{
    spec.validate(ops, grid);
    PARCTRL_REQUIRE(!alphas.empty(), "alpha_sweep: empty alpha list");
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        PARCTRL_REQUIRE(std::isfinite(alphas[i]) && alphas[i] > 1.0, "alpha_sweep: every alpha must be finite and > 1");
        if (i > 0) PARCTRL_REQUIRE(alphas[i] > alphas[i - 1], "alpha_sweep: alphas must be strictly increasing");
    }
    if (q) PARCTRL_REQUIRE(q->matches(ops.num_gamma2(), grid), "alpha_sweep: q shape does not match Gamma2/grid");

    // Dirichlet reference
    TimeField u_ref, p_ref;
    std::optional<BoundaryControl> q_ref;
    bool ref_converged = true;
    if (q) {
        u_ref = solve_parabolic_dirichlet(ops, spec, *q, grid);
        p_ref = solve_adjoint_dirichlet(ops, u_ref, spec.z_d, grid);
    } else {
        OptimResult r = optimize_boundary(ops, spec, grid, options, Alpha::dirichlet());
        u_ref = std::move(r.u_opt);
        p_ref = std::move(r.p_opt);
        q_ref = std::move(r.q_opt);
        ref_converged = r.converged;
    }
    const TimeField b_field = gamma1_datum(ops, spec.b, grid);

    std::vector<SweepRow> rows(alphas.size());
    kernels::for_each_index(
        static_cast<int>(alphas.size()),
        [&](int i) {
            const double a = alphas[static_cast<std::size_t>(i)];
            SweepRow row;
            row.alpha = a;
            TimeField u, p;
            if (q) {
                const HeatStepper stepper(ops, grid, Alpha::robin(a));
                u = stepper.forward(spec.b, spec.v_b, spec.g, *q);
                p = stepper.backward(u - spec.z_d);
                row.converged = true;
            } else {
                OptimResult r = optimize_boundary(ops, spec, grid, options, Alpha::robin(a));
                u = std::move(r.u_opt);
                p = std::move(r.p_opt);
                row.err_control = norm_scriptQ(grid, ops, *r.q_opt - *q_ref);
                row.converged = r.converged && ref_converged;
            }
            row.err_state = norm_L2V(grid, ops, u - u_ref);
            row.err_adjoint = norm_L2V(grid, ops, p - p_ref);
            row.boundary_mismatch = std::sqrt(a - 1.0) * norm_L2Gamma1(grid, ops, u - b_field);
            rows[static_cast<std::size_t>(i)] = std::move(row);
        },
        exec);
    return rows;
}

double DecayRow::ratio() const
{
    if (bound > 0.0) return err_H / bound;
    return err_H > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

DecayStudy decay_study(const DiscreteOperators& ops, const ProblemSpec& spec, const BoundaryControl& q,
                       const TimeGrid& grid)
{
    require_dirichlet_problem(ops, spec, q, grid);
    PARCTRL_REQUIRE(constant_in_time(spec.g), "decay_study: g must be constant in time");
    PARCTRL_REQUIRE(constant_in_time(q), "decay_study: q must be constant in time");

    DecayStudy out;
    out.lambda0 = ops.lambda0;
    out.u_inf = solve_elliptic_dirichlet(ops, spec.g.step(grid.N), q.step(grid.N), spec.b);
    const TimeField u = solve_parabolic_dirichlet(ops, spec, q, grid);
    const std::vector<double> err = h_errors(ops, u, out.u_inf);
    out.rows.resize(err.size());
    for (int k = 0; k <= grid.N; ++k) {
        const double t = grid.time(k);
        out.rows[static_cast<std::size_t>(k)] = {t, err[static_cast<std::size_t>(k)],
                                                 err[0] * std::exp(-0.5 * ops.lambda0 * t)};
    }
    out.fitted_rate = fit_rate(out.rows);
    return out;
}

DecayStudy decay_with_forcing(const DiscreteOperators& ops, const ProblemSpec& spec, const BoundaryControl& q,
                              const Vector& g_inf, const Vector& q_inf, const TimeGrid& grid)
{
    require_dirichlet_problem(ops, spec, q, grid);
    PARCTRL_REQUIRE(g_inf.size() == ops.num_nodes(), "decay_with_forcing: g_inf has wrong length");
    PARCTRL_REQUIRE(q_inf.size() == ops.num_gamma2(), "decay_with_forcing: q_inf has wrong length");

    DecayStudy out;
    out.lambda0 = ops.lambda0;
    out.u_inf = solve_elliptic_dirichlet(ops, g_inf, q_inf, spec.b);
    const TimeField u = solve_parabolic_dirichlet(ops, spec, q, grid);
    const std::vector<double> err = h_errors(ops, u, out.u_inf);

    const double lam = ops.lambda0;
    const double dt = grid.dt();
    const double gamma_sq = ops.trace_norm * ops.trace_norm;
    std::vector<double> forcing(static_cast<std::size_t>(grid.N + 1), 0.0);
    for (int k = 1; k <= grid.N; ++k) {
        const Vector dg = spec.g.step(k) - g_inf;
        const Vector dq = q.step(k) - q_inf;
        forcing[static_cast<std::size_t>(k)] = inner_H(ops, dg, dg) + gamma_sq * inner_Q(ops, dq, dq);
    }

    // running sum S_k = sum_{j<=k} dt e^{lam (t_j - t_k)} F_j, so S_k = e^{-lam dt} S_{k-1} + dt F_k
    const double shrink = std::exp(-lam * dt);
    double running = 0.0;
    out.rows.resize(err.size());
    out.rows[0] = {0.0, err[0], err[0]};
    for (int k = 1; k <= grid.N; ++k) {
        running = shrink * running + dt * forcing[static_cast<std::size_t>(k)];
        const double t = grid.time(k);
        const double bound_sq = err[0] * err[0] * std::exp(-lam * t) + (2.0 / lam) * running;
        out.rows[static_cast<std::size_t>(k)] = {t, err[static_cast<std::size_t>(k)], std::sqrt(bound_sq)};
    }
    out.fitted_rate = fit_rate(out.rows);
    return out;
}

double forcing_integral_g(const DiscreteOperators& ops, const TimeField& g, const Vector& g_inf, const TimeGrid& grid)
{
    PARCTRL_REQUIRE(g.matches(ops.num_nodes(), grid), "forcing_integral_g: g shape mismatch");
    PARCTRL_REQUIRE(ops.lambda0 * grid.T <= kMaxDecayExponent, "forcing_integral_g: lambda0 * t_max must be <= 500");
    double total = 0.0;
    for (int k = 1; k <= grid.N; ++k) {
        const Vector d = g.step(k) - g_inf;
        const double f = inner_H(ops, d, d);
        if (f > 0.0) total += grid.dt() * std::exp(ops.lambda0 * grid.time(k) + std::log(f));
    }
    return total;
}

QuadratureRecord counterexample_quadrature(double t_max, double dt)
{
    PARCTRL_REQUIRE(std::isfinite(t_max) && t_max >= 10.0, "counterexample_quadrature: t_max must be >= 10");
    PARCTRL_REQUIRE(std::isfinite(dt) && dt > 0.0 && dt <= t_max, "counterexample_quadrature: dt must be in (0, t_max]");
    const double steps = t_max / dt;
    const int n = static_cast<int>(std::llround(steps));
    PARCTRL_REQUIRE(std::abs(steps - n) <= 1e-9 * steps, "counterexample_quadrature: t_max must be a multiple of dt");

    const Mesh mesh = build_interval_mesh(64, 0.0, 1.0, Side::Left);
    const DiscreteOperators ops = assemble(mesh);
    const Vector ones = Vector::Ones(ops.num_nodes());
    const double unit = inner_H(ops, ones, ones); // |Omega|

    const TimeGrid grid{t_max, n};
    QuadratureRecord rec;
    for (int k = 1; k <= n; ++k) rec.cumulative_integral += grid.dt() * std::exp(-2.0 * grid.time(k)) * unit;
    rec.pointwise_value = std::exp(-2.0 * t_max) * unit;
    rec.exact_cumulative = 0.5 * (1.0 - std::exp(-2.0 * t_max));
    return rec;
}

} // namespace parctrl
