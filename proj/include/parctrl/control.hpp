#pragma once

#include <optional>
#include <vector>

#include "parctrl/fields.hpp"
#include "parctrl/operators.hpp"
#include "parctrl/state.hpp"

namespace parctrl {

struct OptimOptions {
    double tol = 1e-10;
    int max_iter = 500;
};

/// Outcome of a reduced-space CG solve.
///
/// `optimality_residual` is the first-order residual (||M q - p||_Q, ||M1 g + p||_H,
/// or their sum for the simultaneous problem) divided by max(1, residual at the
/// zero control), i.e. the quantity the stopping rule compares against tol.
/// `residual_abs` is the same residual without the scaling.
struct OptimResult {
    std::optional<BoundaryControl> q_opt;
    std::optional<TimeField> g_opt;
    TimeField u_opt;
    TimeField p_opt;
    double cost = 0.0;
    double optimality_residual = 0.0;
    double residual_abs = 0.0;
    double initial_residual = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> cost_history; // cost after each CG step, starting at the zero control
};

/// State/adjoint/cost evaluation for one (ops, spec, grid, alpha) binding.
/// The boundary data b, v_b and target z_d come from `spec`; g and q are passed per call.
class TrackingModel {
public:
    TrackingModel(const DiscreteOperators& ops, const ProblemSpec& spec, const TimeGrid& grid, Alpha alpha);

    TimeField state(const TimeField& g, const BoundaryControl& q) const;
    /// Adjoint driven by u - z_d.
    TimeField adjoint(const TimeField& u) const;
    /// Linearized state (b = 0, v_b = 0) and its adjoint with zero target.
    TimeField linear_state(const TimeField& g, const BoundaryControl& q) const;
    TimeField linear_adjoint(const TimeField& du) const;

    /// 1/2 ||u - z_d||^2_scriptH
    double tracking(const TimeField& u) const;
    /// J+(g, q) = 1/2 ||u_gq - z_d||^2 + M1/2 ||g||^2 + M/2 ||q||^2
    double cost_plus(const TimeField& g, const BoundaryControl& q) const;

    const DiscreteOperators& ops() const { return *ops_; }
    const ProblemSpec& spec() const { return *spec_; }
    const TimeGrid& grid() const { return stepper_.grid(); }
    Alpha alpha() const { return stepper_.alpha(); }
    TimeField zero_field() const;
    BoundaryControl zero_control() const;

private:
    const DiscreteOperators* ops_;
    const ProblemSpec* spec_;
    HeatStepper stepper_;
};

/// J(q) = 1/2 ||u_q - z_d||^2_scriptH + M/2 ||q||^2_scriptQ, Dirichlet state, g = spec.g.
double cost_J(const DiscreteOperators& ops, const ProblemSpec& spec, const BoundaryControl& q, const TimeGrid& grid);
double cost_J_alpha(const DiscreteOperators& ops, const ProblemSpec& spec, const BoundaryControl& q, double alpha,
                    const TimeGrid& grid);

/// Q-Riesz representative M q - p_q|Gamma2 (column 0 carries M q^0, which no pairing sees).
BoundaryControl gradient_J(const DiscreteOperators& ops, const ProblemSpec& spec, const BoundaryControl& q,
                           const TimeGrid& grid);
BoundaryControl gradient_J_alpha(const DiscreteOperators& ops, const ProblemSpec& spec, const BoundaryControl& q,
                                 double alpha, const TimeGrid& grid);

/// Boundary control for fixed spec.g. `variant` selects the Dirichlet (infinite) or Robin state.
OptimResult optimize_boundary(const DiscreteOperators& ops, const ProblemSpec& spec, const TimeGrid& grid,
                              const OptimOptions& options, Alpha variant);

/// Distributed control g for a fixed flux; gradient M1 g + p. Cost reported is J2 (includes M/2 ||q||^2).
OptimResult optimize_distributed(const DiscreteOperators& ops, const ProblemSpec& spec, const TimeGrid& grid,
                                 const BoundaryControl& q_fixed, const OptimOptions& options, Alpha variant);

/// Joint (g, q) minimization of J+ with block gradient (M1 g + p, M q - p|Gamma2).
OptimResult optimize_simultaneous(const DiscreteOperators& ops, const ProblemSpec& spec, const TimeGrid& grid,
                                  const OptimOptions& options, Alpha variant);

/// Compares the boundary optimum at fixed g with the flux component of the joint optimum:
///   lhs = ||q_bar - q_barbar||_Q,
///   rhs = ||gamma_0|| / (lambda M) * ||u(g_barbar, q_barbar) - u(g, q_bar)||_scriptH,
/// lambda = lambda0 (Dirichlet) or lambda1 min(1, alpha) (Robin).
struct ControlGapEstimate {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    double coercivity = 0.0;
    OptimResult boundary;
};

ControlGapEstimate estimate_control_gap(const DiscreteOperators& ops, const ProblemSpec& spec, const TimeGrid& grid,
                                        const TimeField& g_fixed, const OptimResult& simultaneous,
                                        const OptimOptions& options, Alpha variant);

ControlGapEstimate estimate_control_gap(const DiscreteOperators& ops, const ProblemSpec& spec, const TimeGrid& grid,
                                        const TimeField& g_fixed, const OptimOptions& options, Alpha variant);

} // namespace parctrl
