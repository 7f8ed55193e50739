#include "parctrl/scalar.hpp"

#include <algorithm>
#include <cmath>

#include "parctrl/control.hpp"
#include "parctrl/error.hpp"
#include "parctrl/kernels.hpp"
#include "parctrl/norms.hpp"

namespace parctrl {

std::string ScalarVariant::name() const
{
    switch (kind) {
    case Kind::ParabolicDirichlet: return "parabolic";
    case Kind::ParabolicRobin: return "parabolic-robin";
    case Kind::Elliptic: return "elliptic";
    case Kind::EllipticRobin: return "elliptic-robin";
    }
    return "?";
}

ScalarVariant parse_scalar_variant(const std::string& name, double alpha)
{
    if (name == "parabolic") return ScalarVariant::parabolic();
    if (name == "elliptic") return ScalarVariant::elliptic();
    PARCTRL_REQUIRE(name == "parabolic-robin" || name == "elliptic-robin",
                    "unknown variant '" + name + "' (parabolic, parabolic-robin, elliptic, elliptic-robin)");
    PARCTRL_REQUIRE(alpha > 0.0 && std::isfinite(alpha), "variant '" + name + "' needs a finite alpha > 0");
    return name == "parabolic-robin" ? ScalarVariant::parabolic_robin(alpha) : ScalarVariant::elliptic_robin(alpha);
}

StationaryData stationary_data(const ProblemSpec& spec, const BoundaryControl& q0)
{
    const int last = static_cast<int>(spec.g.values.cols()) - 1;
    return {spec.g.step(last), spec.b, spec.z_d.step(last), q0.step(static_cast<int>(q0.values.cols()) - 1), spec.M};
}

namespace {

void require_nonzero(const BoundaryControl& q0, bool parabolic)
{
    const double mag = parabolic ? q0.values.rightCols(q0.values.cols() - 1).cwiseAbs().maxCoeff()
                                 : q0.values.col(q0.values.cols() - 1).cwiseAbs().maxCoeff();
    PARCTRL_REQUIRE(mag > 0.0, "q0 must be nonzero");
}

/// Weights of the quadrature over the sample columns.
Eigen::VectorXd column_weights(const BuildingBlocks& bb, const TimeGrid& grid, bool parabolic)
{
    if (!parabolic) return Eigen::VectorXd::Ones(1);
    Eigen::VectorXd w = Eigen::VectorXd::Constant(bb.u_b.cols(), grid.dt());
    w[0] = 0.0;
    return w;
}

/// Per-column contributions to A, B and C before time weighting.
struct ColumnTerms {
    std::vector<double> a, b, c;
};

ColumnTerms column_terms(const DiscreteOperators& ops, const ProblemSpec& spec, const BoundaryControl& q0,
                         const BuildingBlocks& bb, bool parabolic)
{
    Eigen::MatrixXd q_cols, z_cols;
    if (parabolic) {
        q_cols = q0.values;
        z_cols = spec.z_d.values;
    } else {
        const StationaryData data = stationary_data(spec, q0);
        q_cols = data.q0;
        z_cols = data.z_d;
    }
    const Eigen::MatrixXd offset = bb.u_b + bb.u_g - z_cols;
    const std::size_t n = static_cast<std::size_t>(bb.u_b.cols());
    std::vector<double> qq(n), uu(n);
    ColumnTerms t{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    kernels::column_bilinear(ops.gamma2_block, q_cols, q_cols, qq, Exec::Parallel);
    kernels::column_bilinear(ops.mass, bb.u_q0, bb.u_q0, uu, Exec::Parallel);
    kernels::column_bilinear(ops.mass, bb.u_q0, offset, t.b, Exec::Parallel);
    kernels::column_bilinear(ops.mass, offset, offset, t.c, Exec::Parallel);
    for (std::size_t k = 0; k < n; ++k) {
        t.a[k] = 0.5 * spec.M * qq[k] + 0.5 * uu[k];
        t.c[k] *= 0.5;
    }
    return t;
}

QuadraticCoefficients finish_coefficients(double A, double B, double C)
{
    if (!(A > 0.0)) throw SolverError("lambda_bar: quadratic coefficient A is not positive");
    return {A, B, C, -B / (2.0 * A)};
}

} // namespace

BuildingBlocks building_blocks(const DiscreteOperators& ops, const ProblemSpec& spec, const BoundaryControl& q0,
                               const TimeGrid& grid, ScalarVariant variant)
{
    spec.validate(ops, grid);
    PARCTRL_REQUIRE(q0.matches(ops.num_gamma2(), grid), "q0 shape does not match Gamma2/grid");
    require_nonzero(q0, variant.is_parabolic());
    const Alpha alpha = variant.as_alpha();
    const int n = ops.num_nodes();
    const Vector zero_b = Vector::Zero(spec.b.size());

    BuildingBlocks bb;
    if (variant.is_parabolic()) {
        const HeatStepper stepper(ops, grid, alpha);
        const TimeField zero_g = TimeField::zeros(n, grid);
        const BoundaryControl zero_q = BoundaryControl::zeros(ops.num_gamma2(), grid);
        kernels::for_each_index(
            3,
            [&](int which) {
                switch (which) {
                case 0: bb.u_b = stepper.forward(spec.b, spec.v_b, zero_g, zero_q).values; break;
                case 1: bb.u_q0 = stepper.forward(zero_b, Vector::Zero(n), zero_g, q0).values; break;
                default: bb.u_g = stepper.forward(zero_b, Vector::Zero(n), spec.g, zero_q).values; break;
                }
            },
            Exec::Parallel);
        return bb;
    }
    const StationaryData data = stationary_data(spec, q0);
    const EllipticSolver solver(ops, alpha);
    const Vector zero_n = Vector::Zero(n);
    const Vector zero_q = Vector::Zero(ops.num_gamma2());
    bb.u_b = solver.solve(zero_n, zero_q, data.b);
    bb.u_q0 = solver.solve(zero_n, data.q0, zero_b);
    bb.u_g = solver.solve(data.g, zero_q, zero_b);
    return bb;
}

QuadraticCoefficients lambda_bar(const DiscreteOperators& ops, const ProblemSpec& spec, const BoundaryControl& q0,
                                 const TimeGrid& grid, ScalarVariant variant)
{
    const BuildingBlocks bb = building_blocks(ops, spec, q0, grid, variant);
    const bool parabolic = variant.is_parabolic();
    const Eigen::VectorXd w = column_weights(bb, grid, parabolic);
    const ColumnTerms t = column_terms(ops, spec, q0, bb, parabolic);
    double A = 0.0, B = 0.0, C = 0.0;
    for (std::size_t k = 0; k < t.a.size(); ++k) {
        const double wk = w[static_cast<Eigen::Index>(k)];
        A += wk * t.a[k];
        B += wk * t.b[k];
        C += wk * t.c[k];
    }
    return finish_coefficients(A, B, C);
}

std::vector<HorizonCoefficients> lambda_bar_trajectory(const DiscreteOperators& ops, const ProblemSpec& spec,
                                                       const BoundaryControl& q0, const TimeGrid& grid,
                                                       ScalarVariant variant, const std::vector<int>& steps)
{
    PARCTRL_REQUIRE(variant.is_parabolic(), "lambda trajectory needs a parabolic variant");
    const BuildingBlocks bb = building_blocks(ops, spec, q0, grid, variant);
    const ColumnTerms t = column_terms(ops, spec, q0, bb, true);
    std::vector<HorizonCoefficients> out;
    double A = 0.0, B = 0.0, C = 0.0;
    int done = 0;
    for (int k : steps) {
        PARCTRL_REQUIRE(k > done && k <= grid.N, "trajectory steps must increase within 1..N");
        for (; done < k; ++done) {
            const std::size_t j = static_cast<std::size_t>(done + 1);
            A += grid.dt() * t.a[j];
            B += grid.dt() * t.b[j];
            C += grid.dt() * t.c[j];
        }
        out.push_back({grid.time(k), finish_coefficients(A, B, C)});
    }
    return out;
}

double elliptic_cost(const DiscreteOperators& ops, const StationaryData& data, const Vector& q, Alpha alpha)
{
    const Vector u = EllipticSolver(ops, alpha).solve(data.g, q, data.b);
    const Vector e = u - data.z_d;
    return 0.5 * inner_H(ops, e, e) + 0.5 * data.M * inner_Q(ops, q, q);
}

double restricted_cost(const DiscreteOperators& ops, const ProblemSpec& spec, const BoundaryControl& q0,
                       const TimeGrid& grid, ScalarVariant variant, double lambda)
{
    if (variant.is_parabolic()) {
        const BoundaryControl q = lambda * q0;
        return variant.is_robin() ? cost_J_alpha(ops, spec, q, variant.alpha, grid) : cost_J(ops, spec, q, grid);
    }
    const StationaryData data = stationary_data(spec, q0);
    return elliptic_cost(ops, data, lambda * data.q0, variant.as_alpha());
}

MonotonicityReport monotonicity_check(const DiscreteOperators& ops, const TimeGrid& grid, const ComparisonCase& first,
                                      const ComparisonCase& second, const BoundaryControl& q0, ScalarVariant variant)
{
    PARCTRL_REQUIRE(ops.mass_kind == MassKind::Lumped,
                    "monotonicity check requires lumped mass (discrete maximum principle)");
    grid.validate();
    const int n = ops.num_nodes();
    const auto nb = static_cast<Eigen::Index>(ops.dirichlet_nodes.size());
    for (const ComparisonCase* c : {&first, &second}) {
        PARCTRL_REQUIRE(c->g.matches(n, grid), "comparison case: g shape mismatch");
        PARCTRL_REQUIRE(c->b.size() == nb, "comparison case: b has wrong length");
        PARCTRL_REQUIRE(c->v_b.size() == n, "comparison case: v_b has wrong length");
        for (Eigen::Index i = 0; i < nb; ++i)
            PARCTRL_REQUIRE(c->v_b[ops.dirichlet_nodes[i]] == c->b[i], "comparison case: v_b must equal b on Gamma1");
    }
    PARCTRL_REQUIRE(q0.matches(ops.num_gamma2(), grid), "q0 shape mismatch");

    // samples that enter the scheme
    const int first_col = variant.is_parabolic() ? 1 : grid.N;
    const Eigen::MatrixXd q_used = q0.values.rightCols(grid.N + 1 - first_col);
    const bool positive = q_used.minCoeff() > 0.0;
    const bool negative = q_used.maxCoeff() < 0.0;
    PARCTRL_REQUIRE(positive || negative, "hypothesis violated: q0 must be strictly one-signed on Gamma2");
    if (positive)
        PARCTRL_REQUIRE(second.lambda <= first.lambda, "hypothesis violated: lambda2 <= lambda1 (q0 > 0)");
    else
        PARCTRL_REQUIRE(first.lambda <= second.lambda, "hypothesis violated: lambda1 <= lambda2 (q0 < 0)");
    const Eigen::MatrixXd dg = second.g.values.rightCols(grid.N + 1 - first_col) -
                               first.g.values.rightCols(grid.N + 1 - first_col);
    PARCTRL_REQUIRE(dg.minCoeff() >= 0.0, "hypothesis violated: g1 <= g2");
    PARCTRL_REQUIRE(((second.b - first.b).array() >= 0.0).all(), "hypothesis violated: b1 <= b2 on Gamma1");
    if (variant.is_parabolic())
        PARCTRL_REQUIRE(((second.v_b - first.v_b).array() >= 0.0).all(), "hypothesis violated: v_b1 <= v_b2");

    Eigen::MatrixXd u1, u2;
    if (variant.is_parabolic()) {
        const HeatStepper stepper(ops, grid, variant.as_alpha());
        u1 = stepper.forward(first.b, first.v_b, first.g, first.lambda * q0).values;
        u2 = stepper.forward(second.b, second.v_b, second.g, second.lambda * q0).values;
    } else {
        const EllipticSolver solver(ops, variant.as_alpha());
        const Vector q_last = q0.step(grid.N);
        u1 = solver.solve(first.g.step(grid.N), first.lambda * q_last, first.b);
        u2 = solver.solve(second.g.step(grid.N), second.lambda * q_last, second.b);
    }
    MonotonicityReport rep;
    rep.max_violation = (u1 - u2).maxCoeff();
    rep.holds = rep.max_violation <= kMonotonicityTol;
    return rep;
}

} // namespace parctrl
