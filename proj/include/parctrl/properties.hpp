#pragma once

#include <random>
#include <string>
#include <vector>

#include "parctrl/asymptotics.hpp"
#include "parctrl/control.hpp"
#include "parctrl/scalar.hpp"

namespace parctrl {

/// Outcome of one numerical property check. `value` is the worst observed
/// quantity and passes when value <= threshold.
struct PropertyResult {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::string detail;
};

double relative_gap(double a, double b);

/// Entries uniform in [-1, 1].
BoundaryControl random_control(int rows, const TimeGrid& grid, std::mt19937_64& rng);
TimeField random_field(int rows, const TimeGrid& grid, std::mt19937_64& rng);

/// (C(eta), u_q - z_d)_scriptH = -(eta, p_q)_scriptQ over random (q, eta).
PropertyResult check_adjoint_duality(const DiscreteOperators& ops, const ProblemSpec& spec, const TimeGrid& grid,
                                     Alpha alpha, int pairs, std::mt19937_64& rng, double tol = 1e-10);

/// Central differences of J against (J'(q), eta)_scriptQ, relative to
/// max(|(J'(q), eta)|, ||J'(q)||_Q ||eta||_Q).
PropertyResult check_gradient(const DiscreteOperators& ops, const ProblemSpec& spec, const TimeGrid& grid,
                              Alpha alpha, int directions, const std::vector<double>& eps, std::mt19937_64& rng,
                              double tol = 1e-9);

/// J(t q1 + (1-t) q2) = t J(q1) + (1-t) J(q2) - t(1-t)/2 (||u_q1 - u_q2||^2 + M ||q1 - q2||^2).
PropertyResult check_convexity_identity(const DiscreteOperators& ops, const ProblemSpec& spec, const TimeGrid& grid,
                                        int triples, std::mt19937_64& rng, double tol = 1e-10);

/// Boundary optimum: residual, iteration budget and random probes J(q_bar) <= J(q_bar + eta).
struct OptimalityCheck {
    PropertyResult residual;
    PropertyResult probes;
    OptimResult result;
};
OptimalityCheck check_optimality(const DiscreteOperators& ops, const ProblemSpec& spec, const TimeGrid& grid,
                                 const OptimOptions& options, int max_iterations, int probes, std::mt19937_64& rng);

/// Three-point fit of H against -B/(2A), local minimality at +-0.1, and B^2 - 4AC < 0.
std::vector<PropertyResult> check_lambda_bar(const DiscreteOperators& ops, const ProblemSpec& spec,
                                             const BoundaryControl& q0, const TimeGrid& grid, ScalarVariant variant,
                                             double tol = 1e-10);

/// max over steps of err_H / bound against the slack.
PropertyResult check_decay_bound(const DecayStudy& study, const std::string& name, double slack = 1.05);

} // namespace parctrl
