#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "parctrl/fields.hpp"
#include "parctrl/operators.hpp"
#include "parctrl/state.hpp"

namespace parctrl {

/// Which state system the one-parameter flux family q = lambda q0 drives.
struct ScalarVariant {
    enum class Kind { ParabolicDirichlet, ParabolicRobin, Elliptic, EllipticRobin };
    Kind kind = Kind::ParabolicDirichlet;
    double alpha = 0.0; // used by the Robin kinds only

    static ScalarVariant parabolic() { return {Kind::ParabolicDirichlet, 0.0}; }
    static ScalarVariant parabolic_robin(double a) { return {Kind::ParabolicRobin, a}; }
    static ScalarVariant elliptic() { return {Kind::Elliptic, 0.0}; }
    static ScalarVariant elliptic_robin(double a) { return {Kind::EllipticRobin, a}; }

    bool is_parabolic() const { return kind == Kind::ParabolicDirichlet || kind == Kind::ParabolicRobin; }
    bool is_robin() const { return kind == Kind::ParabolicRobin || kind == Kind::EllipticRobin; }
    Alpha as_alpha() const { return is_robin() ? Alpha::robin(alpha) : Alpha::dirichlet(); }
    std::string name() const;
};

ScalarVariant parse_scalar_variant(const std::string& name, double alpha);

/// H(lambda) = A lambda^2 + B lambda + C.
struct QuadraticCoefficients {
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;
    double lambda_opt = 0.0;

    double value(double lambda) const { return (A * lambda + B) * lambda + C; }
    double discriminant() const { return B * B - 4.0 * A * C; }
};

/// Superposition components: u = u_b + lambda u_q0 + u_g.
/// Parabolic variants hold N+1 columns; elliptic variants a single column.
struct BuildingBlocks {
    Eigen::MatrixXd u_b;
    Eigen::MatrixXd u_q0;
    Eigen::MatrixXd u_g;

    Eigen::MatrixXd combine(double lambda) const { return u_b + lambda * u_q0 + u_g; }
};

/// Stationary data for the elliptic variants: the final-time samples of the
/// parabolic data (g, z_d, q0 are expected constant in time there).
struct StationaryData {
    Vector g;
    Vector b;
    Vector z_d;
    Vector q0;
    double M = 1.0;
};

StationaryData stationary_data(const ProblemSpec& spec, const BoundaryControl& q0);

BuildingBlocks building_blocks(const DiscreteOperators& ops, const ProblemSpec& spec, const BoundaryControl& q0,
                               const TimeGrid& grid, ScalarVariant variant);

/// Closed-form minimizer lambda_opt = -B / (2A) of the restricted cost.
QuadraticCoefficients lambda_bar(const DiscreteOperators& ops, const ProblemSpec& spec, const BoundaryControl& q0,
                                 const TimeGrid& grid, ScalarVariant variant);

/// Coefficients of the parabolic restricted problem on the horizon [0, T].
struct HorizonCoefficients {
    double T = 0.0;
    QuadraticCoefficients coefficients;
};

/// lambda_bar on the prefix horizons t_k, k in `steps` (increasing, within 1..N),
/// from a single set of building blocks on `grid`.
std::vector<HorizonCoefficients> lambda_bar_trajectory(const DiscreteOperators& ops, const ProblemSpec& spec,
                                                       const BoundaryControl& q0, const TimeGrid& grid,
                                                       ScalarVariant variant, const std::vector<int>& steps);

/// Restricted cost H(lambda) = J(lambda q0) evaluated by a direct state solve.
double restricted_cost(const DiscreteOperators& ops, const ProblemSpec& spec, const BoundaryControl& q0,
                       const TimeGrid& grid, ScalarVariant variant, double lambda);

/// J*(q) = 1/2 ||u_q - z_d||_H^2 + M/2 ||q||_Q^2 for the stationary problem.
double elliptic_cost(const DiscreteOperators& ops, const StationaryData& data, const Vector& q, Alpha alpha);

/// One side of a comparison: flux multiplier and data.
struct ComparisonCase {
    double lambda = 0.0;
    TimeField g;
    Vector b;
    Vector v_b;
};

struct MonotonicityReport {
    double max_violation = 0.0; // max over steps and nodes of u_first - u_second
    bool holds = false;
};

inline constexpr double kMonotonicityTol = 1e-12;

/// Solves both problems and checks u_first <= u_second everywhere. Requires lumped
/// operators and the ordering hypotheses: (lambda_first - lambda_second) q0 >= 0 with
/// q0 one-signed, g_first <= g_second, b_first <= b_second, v_b_first <= v_b_second.
/// A violated hypothesis is rejected with its name in the message.
MonotonicityReport monotonicity_check(const DiscreteOperators& ops, const TimeGrid& grid, const ComparisonCase& first,
                                      const ComparisonCase& second, const BoundaryControl& q0, ScalarVariant variant);

} // namespace parctrl
