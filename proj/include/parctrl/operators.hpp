#pragma once

#include <vector>

#include "parctrl/linalg.hpp"
#include "parctrl/mesh.hpp"

namespace parctrl {

enum class MassKind { Consistent, Lumped };

enum class CoercivitySpace { V0, VRobin };

/// P1 matrices for one mesh, plus the discrete coercivity and trace constants.
///
/// `mass`, `boundary_gamma1` and `boundary_gamma2` are the active variants for
/// `mass_kind`: with MassKind::Lumped all three are row-sum lumped so that the
/// backward Euler step matrices are M-matrices on non-obtuse meshes.
/// Immutable after assemble(); safe to share between threads.
struct DiscreteOperators {
    MassKind mass_kind = MassKind::Consistent;
    SparseMatrix stiffness;       // a(u, v)
    SparseMatrix mass;            // (u, v)_H, active variant
    SparseMatrix mass_consistent;
    SparseMatrix mass_lumped;
    SparseMatrix boundary_gamma1; // integral over Gamma1 of u v
    SparseMatrix boundary_gamma2; // (u, v)_Q
    SparseMatrix gamma2_block;    // boundary_gamma2 restricted to gamma2_nodes
    SparseMatrix h1_gram;         // stiffness + mass, the V inner product

    std::vector<int> dirichlet_nodes; // Gamma1 nodes, sorted
    std::vector<int> free_nodes;      // complement of dirichlet_nodes
    std::vector<int> gamma2_nodes;    // sorted

    double lambda0 = 0.0;    // coercivity of a on V0
    double lambda1 = 0.0;    // coercivity of a + int_Gamma1 u v on V
    double trace_norm = 0.0; // discrete ||gamma_0|| : V -> L2(Gamma2)
    double domain_measure = 0.0;

    int num_nodes() const { return static_cast<int>(stiffness.rows()); }
    int num_gamma2() const { return static_cast<int>(gamma2_nodes.size()); }

    /// lambda_alpha = lambda1 * min(1, alpha)
    double lambda_alpha(double alpha) const;
};

DiscreteOperators assemble(const Mesh& mesh, MassKind mass_kind = MassKind::Consistent);

/// Smallest generalized eigenvalue of the form on `space` against the H1 Gram matrix.
double coercivity_constant(const DiscreteOperators& ops, CoercivitySpace space);

/// sqrt of the largest eigenvalue of boundary_gamma2 x = mu h1_gram x.
double trace_norm(const DiscreteOperators& ops);

/// Embed Gamma2 nodal values into a full-length nodal vector (zeros elsewhere).
Vector embed_gamma2(const DiscreteOperators& ops, const Vector& q);
Vector restrict_gamma2(const DiscreteOperators& ops, const Vector& full);

/// Extend Gamma1 values by zero off Gamma1.
Vector embed_gamma1(const DiscreteOperators& ops, const Vector& b);

double inner_H(const DiscreteOperators& ops, const Vector& u, const Vector& v);
double inner_Q(const DiscreteOperators& ops, const Vector& q, const Vector& r);
double inner_V(const DiscreteOperators& ops, const Vector& u, const Vector& v);

} // namespace parctrl
