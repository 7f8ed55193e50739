#include "parctrl/operators.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "parctrl/error.hpp"

namespace parctrl {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void add_interval(const Mesh& mesh, const std::vector<int>& e, Triplets& k, Triplets& m)
{
    const double h = mesh.nodes[e[1]][0] - mesh.nodes[e[0]][0];
    if (!(std::abs(h) > 0.0)) throw ValidationError("assemble: zero-length element");
    const double len = std::abs(h);
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            k.emplace_back(e[a], e[b], (a == b ? 1.0 : -1.0) / len);
            m.emplace_back(e[a], e[b], (a == b ? 2.0 : 1.0) * len / 6.0);
        }
    }
}

void add_triangle(const Mesh& mesh, const std::vector<int>& e, Triplets& k, Triplets& m)
{
    const auto& p0 = mesh.nodes[e[0]];
    const auto& p1 = mesh.nodes[e[1]];
    const auto& p2 = mesh.nodes[e[2]];
    const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
    const double area = 0.5 * std::abs(det);
    if (!(area > 0.0)) throw ValidationError("assemble: zero-area element");

    // gradients of barycentric coordinates: grad phi_i = (y_j - y_k, x_k - x_j) / det
    const std::array<double, 3> gx{p1[1] - p2[1], p2[1] - p0[1], p0[1] - p1[1]};
    const std::array<double, 3> gy{p2[0] - p1[0], p0[0] - p2[0], p1[0] - p0[0]};
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            k.emplace_back(e[a], e[b], (gx[a] * gx[b] + gy[a] * gy[b]) / (4.0 * area));
            m.emplace_back(e[a], e[b], (a == b ? 2.0 : 1.0) * area / 12.0);
        }
    }
}

void add_facet(const Mesh& mesh, const Facet& f, Triplets& out)
{
    if (mesh.dim == 1) {
        out.emplace_back(f.nodes[0], f.nodes[0], 1.0);
        return;
    }
    const auto& a = mesh.nodes[f.nodes[0]];
    const auto& b = mesh.nodes[f.nodes[1]];
    const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out.emplace_back(f.nodes[i], f.nodes[j], (i == j ? 2.0 : 1.0) * len / 6.0);
}

SparseMatrix from_triplets(int n, const Triplets& t)
{
    SparseMatrix out(n, n);
    out.setFromTriplets(t.begin(), t.end());
    out.makeCompressed();
    return out;
}

SparseMatrix lump(const SparseMatrix& a)
{
    const Vector row_sums = a * Vector::Ones(a.cols());
    Triplets t;
    for (Eigen::Index i = 0; i < row_sums.size(); ++i)
        if (row_sums[i] != 0.0) t.emplace_back(static_cast<int>(i), static_cast<int>(i), row_sums[i]);
    return from_triplets(static_cast<int>(a.rows()), t);
}

} // namespace

double DiscreteOperators::lambda_alpha(double alpha) const
{
    return lambda1 * std::min(1.0, alpha);
}

DiscreteOperators assemble(const Mesh& mesh, MassKind mass_kind)
{
    mesh.validate();
    const int n = mesh.num_nodes();

    Triplets k, m, b1, b2;
    for (const auto& e : mesh.elements) {
        if (mesh.dim == 1)
            add_interval(mesh, e, k, m);
        else
            add_triangle(mesh, e, k, m);
    }
    for (const auto& f : mesh.facets) add_facet(mesh, f, f.tag == BoundaryTag::Gamma1 ? b1 : b2);

    DiscreteOperators ops;
    ops.mass_kind = mass_kind;
    ops.stiffness = from_triplets(n, k);
    ops.mass_consistent = from_triplets(n, m);
    ops.mass_lumped = lump(ops.mass_consistent);
    const SparseMatrix b1c = from_triplets(n, b1);
    const SparseMatrix b2c = from_triplets(n, b2);
    if (mass_kind == MassKind::Lumped) {
        ops.mass = ops.mass_lumped;
        ops.boundary_gamma1 = lump(b1c);
        ops.boundary_gamma2 = lump(b2c);
    } else {
        ops.mass = ops.mass_consistent;
        ops.boundary_gamma1 = b1c;
        ops.boundary_gamma2 = b2c;
    }
    ops.h1_gram = ops.stiffness + ops.mass;

    ops.dirichlet_nodes = mesh.tagged_nodes(BoundaryTag::Gamma1);
    ops.gamma2_nodes = mesh.tagged_nodes(BoundaryTag::Gamma2);
    std::vector<bool> is_dirichlet(n, false);
    for (int i : ops.dirichlet_nodes) is_dirichlet[i] = true;
    for (int i = 0; i < n; ++i)
        if (!is_dirichlet[i]) ops.free_nodes.push_back(i);
    ops.domain_measure = mesh.domain_measure();
    ops.gamma2_block = restrict_matrix(ops.boundary_gamma2, ops.gamma2_nodes, ops.gamma2_nodes);

    ops.lambda0 = coercivity_constant(ops, CoercivitySpace::V0);
    ops.lambda1 = coercivity_constant(ops, CoercivitySpace::VRobin);
    ops.trace_norm = trace_norm(ops);
    return ops;
}

double coercivity_constant(const DiscreteOperators& ops, CoercivitySpace space)
{
    if (space == CoercivitySpace::V0) {
        const auto& f = ops.free_nodes;
        const SparseMatrix kf = restrict_matrix(ops.stiffness, f, f);
        const SparseMatrix gf = restrict_matrix(ops.h1_gram, f, f);
        return smallest_generalized_eigen(kf, gf).value;
    }
    const SparseMatrix a1 = ops.stiffness + ops.boundary_gamma1;
    return smallest_generalized_eigen(a1, ops.h1_gram).value;
}

double trace_norm(const DiscreteOperators& ops)
{
    return std::sqrt(largest_generalized_eigen(ops.boundary_gamma2, ops.h1_gram).value);
}

Vector embed_gamma2(const DiscreteOperators& ops, const Vector& q)
{
    PARCTRL_REQUIRE(q.size() == ops.num_gamma2(), "Gamma2 vector has wrong length");
    Vector full = Vector::Zero(ops.num_nodes());
    scatter(q, ops.gamma2_nodes, full);
    return full;
}

Vector restrict_gamma2(const DiscreteOperators& ops, const Vector& full)
{
    return gather(full, ops.gamma2_nodes);
}

Vector embed_gamma1(const DiscreteOperators& ops, const Vector& b)
{
    PARCTRL_REQUIRE(b.size() == static_cast<Eigen::Index>(ops.dirichlet_nodes.size()),
                    "Gamma1 vector has wrong length");
    Vector full = Vector::Zero(ops.num_nodes());
    scatter(b, ops.dirichlet_nodes, full);
    return full;
}

double inner_H(const DiscreteOperators& ops, const Vector& u, const Vector& v)
{
    PARCTRL_REQUIRE(u.size() == ops.num_nodes() && v.size() == ops.num_nodes(), "inner_H: shape mismatch");
    return u.dot(ops.mass * v);
}

double inner_Q(const DiscreteOperators& ops, const Vector& q, const Vector& r)
{
    PARCTRL_REQUIRE(q.size() == ops.num_gamma2() && r.size() == ops.num_gamma2(), "inner_Q: shape mismatch");
    return q.dot(ops.gamma2_block * r);
}

double inner_V(const DiscreteOperators& ops, const Vector& u, const Vector& v)
{
    PARCTRL_REQUIRE(u.size() == ops.num_nodes() && v.size() == ops.num_nodes(), "inner_V: shape mismatch");
    return u.dot(ops.h1_gram * v);
}

} // namespace parctrl
