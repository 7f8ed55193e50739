#pragma once

#include <optional>
#include <vector>

#include "parctrl/control.hpp"
#include "parctrl/fields.hpp"
#include "parctrl/kernels.hpp"
#include "parctrl/operators.hpp"
#include "parctrl/state.hpp"

namespace parctrl {

/// One alpha of the Robin -> Dirichlet study. err_control is empty for a fixed flux.
struct SweepRow {
    double alpha = 0.0;
    double err_state = 0.0;         // ||u_alpha - u||_{L2(V)}
    double err_adjoint = 0.0;       // ||p_alpha - p||_{L2(V)}
    std::optional<double> err_control; // ||q_alpha - q||_scriptQ
    double boundary_mismatch = 0.0; // sqrt(alpha - 1) ||u_alpha - b||_{L2(L2(Gamma1))}
    bool converged = true;
};

/// Fixed flux `q`, or std::nullopt to optimize the boundary control for every alpha
/// (and once for the Dirichlet problem). Rows are computed independently and
/// returned in alpha order; an unconverged optimizer flags its row only.
std::vector<SweepRow> alpha_sweep(const DiscreteOperators& ops, const ProblemSpec& spec, const TimeGrid& grid,
                                  const std::optional<BoundaryControl>& q, const std::vector<double>& alphas,
                                  const OptimOptions& options = {}, Exec exec = Exec::Parallel);

struct DecayRow {
    double t = 0.0;
    double err_H = 0.0;
    double bound = 0.0;

    /// err_H / bound, 0 when both vanish.
    double ratio() const;
};

struct DecayStudy {
    std::vector<DecayRow> rows;
    double fitted_rate = 0.0; // -slope of log err_H over the first half of the horizon
    double lambda0 = 0.0;
    Vector u_inf;
};

/// Dirichlet problem with time-constant g and q, run to grid.T.
/// bound(t) = err_H(0) exp(-lambda0 t / 2).
DecayStudy decay_study(const DiscreteOperators& ops, const ProblemSpec& spec, const BoundaryControl& q,
                       const TimeGrid& grid);

/// Time-varying g, q tending to g_inf, q_inf (q_inf on the Gamma2 nodes).
/// bound(t_k)^2 = err_H(0)^2 e^{-lambda0 t_k}
///              + (2 / lambda0) sum_{j<=k} dt e^{lambda0 (t_j - t_k)} F(t_j),
/// F = ||g - g_inf||_H^2 + ||gamma_0||^2 ||q - q_inf||_Q^2.
DecayStudy decay_with_forcing(const DiscreteOperators& ops, const ProblemSpec& spec, const BoundaryControl& q,
                              const Vector& g_inf, const Vector& q_inf, const TimeGrid& grid);

/// Running L1 integral of e^{lambda0 t} ||g - g_inf||_H^2 (the F1 term) up to grid.T,
/// evaluated in log space.
double forcing_integral_g(const DiscreteOperators& ops, const TimeField& g, const Vector& g_inf,
                          const TimeGrid& grid);

inline constexpr double kMaxDecayExponent = 500.0;

struct QuadratureRecord {
    double pointwise_value = 0.0;     // int_0^1 (g - g_inf)^2 dx at t_max
    double cumulative_integral = 0.0; // rectangle rule of the same over (0, t_max)
    double exact_cumulative = 0.0;    // (1 - e^{-2 t_max}) / 2
};

/// g(t) = g_inf + e^{-t} on the unit interval.
QuadratureRecord counterexample_quadrature(double t_max, double dt);

} // namespace parctrl
