#include "parctrl/adjoint.hpp"

#include "parctrl/error.hpp"

namespace parctrl {

TimeField solve_adjoint_dirichlet(const DiscreteOperators& ops, const TimeField& u, const TimeField& z_d,
                                  const TimeGrid& grid)
{
    PARCTRL_REQUIRE(u.matches(ops.num_nodes(), grid), "solve_adjoint_dirichlet: state does not match grid");
    PARCTRL_REQUIRE(z_d.matches(ops.num_nodes(), grid), "solve_adjoint_dirichlet: target does not match grid");
    return HeatStepper(ops, grid, Alpha::dirichlet()).backward(u - z_d);
}

TimeField solve_adjoint_robin(const DiscreteOperators& ops, const TimeField& u_alpha, const TimeField& z_d,
                              double alpha, const TimeGrid& grid)
{
    PARCTRL_REQUIRE(alpha > 0.0 && std::isfinite(alpha), "solve_adjoint_robin: alpha must be finite and > 0");
    PARCTRL_REQUIRE(u_alpha.matches(ops.num_nodes(), grid), "solve_adjoint_robin: state does not match grid");
    PARCTRL_REQUIRE(z_d.matches(ops.num_nodes(), grid), "solve_adjoint_robin: target does not match grid");
    return HeatStepper(ops, grid, Alpha::robin(alpha)).backward(u_alpha - z_d);
}

TimeField solve_adjoint(const DiscreteOperators& ops, const TimeField& u, const TimeField& z_d, Alpha alpha,
                        const TimeGrid& grid)
{
    return alpha.is_dirichlet() ? solve_adjoint_dirichlet(ops, u, z_d, grid)
                                : solve_adjoint_robin(ops, u, z_d, alpha.value, grid);
}

} // namespace parctrl
