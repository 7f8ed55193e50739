#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "parctrl/linalg.hpp"

namespace parctrl {

/// Execution policy for the data-parallel kernels. Serial is the reference path;
/// Parallel distributes independent columns/tasks over OpenMP threads and then
/// reduces in the serial order, so both produce bit-identical results.
enum class Exec { Serial, Parallel };

namespace kernels {

/// out[k] = U.col(k)^T A V.col(k) for every column.
void column_bilinear(const SparseMatrix& a, const Eigen::MatrixXd& u, const Eigen::MatrixXd& v,
                     std::span<double> out, Exec exec);

/// Right-endpoint rectangle rule: sum_{k=1..N} dt * U_k^T A V_k.
double time_bilinear(const SparseMatrix& a, const Eigen::MatrixXd& u, const Eigen::MatrixXd& v, double dt,
                     Exec exec);

/// A applied to every column.
Eigen::MatrixXd apply_columns(const SparseMatrix& a, const Eigen::MatrixXd& u, Exec exec);

/// Run fn(i) for i in [0, count). Tasks must write disjoint outputs.
void for_each_index(int count, const std::function<void(int)>& fn, Exec exec);

/// Caps OpenMP threads; <= 0 leaves the runtime default.
void set_thread_cap(int threads);
int thread_cap();

/// Reads PARCTRL_THREADS and applies it.
void apply_thread_env();

} // namespace kernels
} // namespace parctrl
