#pragma once

#include "parctrl/fields.hpp"
#include "parctrl/operators.hpp"
#include "parctrl/state.hpp"

namespace parctrl {

// The adjoint recursion is the algebraic transpose of the backward Euler state
// map under the rectangle-rule pairing, so for every q, eta
//   (u_eta - u_0, u_q - z_d)_scriptH = -(eta, p_q|Gamma2)_scriptQ
// holds to solver precision. Source at step k is u^k - z_d^k, k = 1..N.

TimeField solve_adjoint_dirichlet(const DiscreteOperators& ops, const TimeField& u, const TimeField& z_d,
                                  const TimeGrid& grid);

TimeField solve_adjoint_robin(const DiscreteOperators& ops, const TimeField& u_alpha, const TimeField& z_d,
                              double alpha, const TimeGrid& grid);

TimeField solve_adjoint(const DiscreteOperators& ops, const TimeField& u, const TimeField& z_d, Alpha alpha,
                        const TimeGrid& grid);

} // namespace parctrl
