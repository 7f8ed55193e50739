#pragma once

#include <cmath>
#include <numbers>

#include "parctrl/mesh.hpp"
#include "parctrl/operators.hpp"
#include "parctrl/state.hpp"

namespace parctrl::testing {

inline DiscreteOperators ops_1d(int cells, MassKind mass = MassKind::Consistent)
{
    return assemble(build_interval_mesh(cells, 0.0, 1.0, Side::Left), mass);
}

inline DiscreteOperators ops_2d(int n, MassKind mass = MassKind::Consistent)
{
    return assemble(build_rect_mesh(n, n, {Side::Left}), mass);
}

/// Node coordinates x (first component) as a vector.
inline Vector coord_x(const Mesh& mesh)
{
    Vector x(mesh.num_nodes());
    for (int i = 0; i < mesh.num_nodes(); ++i) x[i] = mesh.nodes[static_cast<std::size_t>(i)][0];
    return x;
}

/// Benchmark-style data: g = 1 + bump, b = 0.2, v_b = b, z_d = 0.5 sin-bump, M = 1.
inline ProblemSpec benchmark_spec(const Mesh& mesh, const DiscreteOperators& ops, const TimeGrid& grid)
{
    const int n = ops.num_nodes();
    ProblemSpec s;
    s.g = TimeField::zeros(n, grid);
    s.z_d = TimeField::zeros(n, grid);
    for (int i = 0; i < n; ++i) {
        const auto& p = mesh.nodes[static_cast<std::size_t>(i)];
        double bump = std::sin(std::numbers::pi * p[0]);
        if (mesh.dim == 2) bump *= std::sin(std::numbers::pi * p[1]);
        for (int k = 0; k <= grid.N; ++k) {
            s.g.values(i, k) = 1.0 + bump;
            s.z_d.values(i, k) = 0.5 * bump;
        }
    }
    s.b = Vector::Constant(static_cast<Eigen::Index>(ops.dirichlet_nodes.size()), 0.2);
    s.v_b = Vector::Constant(n, 0.2);
    return s;
}

} // namespace parctrl::testing
