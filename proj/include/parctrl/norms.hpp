#pragma once

#include "parctrl/fields.hpp"
#include "parctrl/kernels.hpp"
#include "parctrl/operators.hpp"

namespace parctrl {

// Time integrals use the right-endpoint rectangle rule sum_{k=1..N} dt (.,.);
// the k = 0 sample never enters.

double inner_scriptH(const TimeGrid& grid, const DiscreteOperators& ops, const TimeField& u, const TimeField& v,
                     Exec exec = Exec::Parallel);
double inner_scriptQ(const TimeGrid& grid, const DiscreteOperators& ops, const BoundaryControl& q,
                     const BoundaryControl& r, Exec exec = Exec::Parallel);

double norm_scriptH(const TimeGrid& grid, const DiscreteOperators& ops, const TimeField& u);
double norm_scriptQ(const TimeGrid& grid, const DiscreteOperators& ops, const BoundaryControl& q);
/// L2(0,T;V) with the H1 Gram matrix stiffness + mass.
double norm_L2V(const TimeGrid& grid, const DiscreteOperators& ops, const TimeField& u);
/// L2(0,T;L2(Gamma1)).
double norm_L2Gamma1(const TimeGrid& grid, const DiscreteOperators& ops, const TimeField& u);

BoundaryControl trace_gamma2(const DiscreteOperators& ops, const TimeField& u);
TimeField embed_control(const DiscreteOperators& ops, const BoundaryControl& q);

} // namespace parctrl
