#include <algorithm>
#include <cmath>

#include "parctrl/norms.hpp"

namespace parctrl {

double inner_scriptH(const TimeGrid& grid, const DiscreteOperators& ops, const TimeField& u, const TimeField& v,
                     Exec exec)
{
    PARCTRL_REQUIRE(u.matches(ops.num_nodes(), grid) && v.matches(ops.num_nodes(), grid),
                    "inner_scriptH: field shape does not match mesh/grid");
    return kernels::time_bilinear(ops.mass, u.values, v.values, grid.dt(), exec);
}

double inner_scriptQ(const TimeGrid& grid, const DiscreteOperators& ops, const BoundaryControl& q,
                     const BoundaryControl& r, Exec exec)
{
    PARCTRL_REQUIRE(q.matches(ops.num_gamma2(), grid) && r.matches(ops.num_gamma2(), grid),
                    "inner_scriptQ: control shape does not match Gamma2/grid");
    return kernels::time_bilinear(ops.gamma2_block, q.values, r.values, grid.dt(), exec);
}

double norm_scriptH(const TimeGrid& grid, const DiscreteOperators& ops, const TimeField& u)
{
    return std::sqrt(std::max(0.0, inner_scriptH(grid, ops, u, u)));
}

double norm_scriptQ(const TimeGrid& grid, const DiscreteOperators& ops, const BoundaryControl& q)
{
    return std::sqrt(std::max(0.0, inner_scriptQ(grid, ops, q, q)));
}

double norm_L2V(const TimeGrid& grid, const DiscreteOperators& ops, const TimeField& u)
{
    PARCTRL_REQUIRE(u.matches(ops.num_nodes(), grid), "norm_L2V: shape mismatch");
    return std::sqrt(std::max(0.0, kernels::time_bilinear(ops.h1_gram, u.values, u.values, grid.dt(), Exec::Parallel)));
}

double norm_L2Gamma1(const TimeGrid& grid, const DiscreteOperators& ops, const TimeField& u)
{
    PARCTRL_REQUIRE(u.matches(ops.num_nodes(), grid), "norm_L2Gamma1: shape mismatch");
    return std::sqrt(
        std::max(0.0, kernels::time_bilinear(ops.boundary_gamma1, u.values, u.values, grid.dt(), Exec::Parallel)));
}

BoundaryControl trace_gamma2(const DiscreteOperators& ops, const TimeField& u)
{
    BoundaryControl out(Eigen::MatrixXd(ops.num_gamma2(), u.values.cols()));
    for (int i = 0; i < ops.num_gamma2(); ++i) out.values.row(i) = u.values.row(ops.gamma2_nodes[i]);
    return out;
}

TimeField embed_control(const DiscreteOperators& ops, const BoundaryControl& q)
{
    PARCTRL_REQUIRE(q.rows() == ops.num_gamma2(), "embed_control: control has wrong number of rows");
    TimeField out(Eigen::MatrixXd::Zero(ops.num_nodes(), q.values.cols()));
    for (int i = 0; i < ops.num_gamma2(); ++i) out.values.row(ops.gamma2_nodes[i]) = q.values.row(i);
    return out;
}

} // namespace parctrl
