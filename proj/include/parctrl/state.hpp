#pragma once

#include <cmath>
#include <limits>
#include <memory>

#include "parctrl/fields.hpp"
#include "parctrl/linalg.hpp"
#include "parctrl/operators.hpp"

namespace parctrl {

/// Heat transfer coefficient on Gamma1. Infinity selects the Dirichlet problem.
struct Alpha {
    double value = std::numeric_limits<double>::infinity();

    static Alpha dirichlet() { return {}; }
    static Alpha robin(double a) { return {a}; }
    bool is_dirichlet() const { return std::isinf(value); }
};

/// Data of the state systems. `b` is indexed like ops.dirichlet_nodes.
struct ProblemSpec {
    TimeField g;   // internal energy
    Vector b;      // temperature datum on Gamma1
    Vector v_b;    // initial temperature, equal to b on Gamma1
    TimeField z_d; // tracking target
    double M = 1.0;
    double M1 = 1.0;
    Alpha alpha;

    void validate(const DiscreteOperators& ops, const TimeGrid& grid) const;
};

/// Backward Euler integrator for one (mesh, grid, alpha) triple.
///
/// Step matrix M + dt K on the free nodes (Dirichlet lifting) or
/// M + dt (K + alpha B1) on all nodes (Robin); factored once.
/// Keeps a pointer to `ops`, which must outlive the stepper.
class HeatStepper {
public:
    HeatStepper(const DiscreteOperators& ops, const TimeGrid& grid, Alpha alpha);

    TimeField forward(const Vector& b, const Vector& v_b, const TimeField& g, const BoundaryControl& q) const;

    /// Discrete adjoint: p^{N+1} = 0, A p^k = M p^{k+1} + dt M source^k for k = N..1,
    /// zero on Gamma1 in the Dirichlet case. Column 0 holds one more homogeneous
    /// step (diagnostic only).
    TimeField backward(const TimeField& source) const;

    const DiscreteOperators& ops() const { return *ops_; }
    const TimeGrid& grid() const { return grid_; }
    Alpha alpha() const { return alpha_; }

private:
    Vector solve_step(const Vector& rhs_full, const Vector* lift) const;

    const DiscreteOperators* ops_;
    TimeGrid grid_;
    Alpha alpha_;
    SparseMatrix step_matrix_; // full n x n
    SparseMatrix coupling_;    // free x dirichlet block (Dirichlet only)
    std::shared_ptr<const SpdSolver> solver_;
};

/// Stationary counterpart: K u = M g - B2 q on free nodes, or (K + alpha B1) u = ... + alpha B1 b.
class EllipticSolver {
public:
    EllipticSolver(const DiscreteOperators& ops, Alpha alpha);
    Vector solve(const Vector& g, const Vector& q, const Vector& b) const;

private:
    const DiscreteOperators* ops_;
    Alpha alpha_;
    SparseMatrix matrix_;
    SparseMatrix coupling_;
    std::shared_ptr<const SpdSolver> solver_;
};

TimeField solve_parabolic_dirichlet(const DiscreteOperators& ops, const ProblemSpec& spec, const BoundaryControl& q,
                                    const TimeGrid& grid);
TimeField solve_parabolic_robin(const DiscreteOperators& ops, const ProblemSpec& spec, const BoundaryControl& q,
                                const TimeGrid& grid);
/// Routes on spec.alpha.
TimeField solve_parabolic(const DiscreteOperators& ops, const ProblemSpec& spec, const BoundaryControl& q,
                          const TimeGrid& grid);

Vector solve_elliptic_dirichlet(const DiscreteOperators& ops, const Vector& g, const Vector& q, const Vector& b);
Vector solve_elliptic_robin(const DiscreteOperators& ops, const Vector& g, const Vector& q, const Vector& b,
                            double alpha);

} // namespace parctrl
