#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace parctrl {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

inline constexpr double kDefaultSolveTol = 1e-12;
inline constexpr int kDirectSolveLimit = 20000;

/// Factor-once, solve-many wrapper for SPD systems.
///
/// Uses sparse Cholesky up to kDirectSolveLimit unknowns and Jacobi-preconditioned
/// CG beyond. Direct solves are checked against the normwise backward error
/// ||A x - b|| / (||A|| ||x|| + ||b||) <= tol in the infinity norm, with up to three
/// steps of iterative refinement; CG solves against ||A x - b||_2 <= tol ||b||_2.
class SpdSolver {
public:
    explicit SpdSolver(const SparseMatrix& matrix, double tol = kDefaultSolveTol);
    ~SpdSolver();
    SpdSolver(SpdSolver&&) noexcept;
    SpdSolver& operator=(SpdSolver&&) noexcept;

    Vector solve(const Vector& rhs) const;
    int size() const { return static_cast<int>(matrix_.rows()); }
    const SparseMatrix& matrix() const { return matrix_; }

private:
    struct Impl;
    SparseMatrix matrix_;
    double tol_;
    double norm_inf_ = 0.0; // max absolute row sum
    std::unique_ptr<Impl> impl_;
};

Vector solve_spd(const SparseMatrix& matrix, const Vector& rhs, double tol = kDefaultSolveTol);

/// Submatrix A(rows, cols) for sorted index lists.
SparseMatrix restrict_matrix(const SparseMatrix& a, std::span<const int> rows, std::span<const int> cols);

Vector gather(const Vector& full, std::span<const int> idx);
void scatter(const Vector& part, std::span<const int> idx, Vector& full);

struct EigenPair {
    double value = 0.0;
    Vector vector;
    int iterations = 0;
};

inline constexpr double kEigenTol = 1e-10;
inline constexpr int kEigenMaxIter = 100000;

/// Smallest lambda of A x = lambda B x (A, B SPD) by inverse iteration.
EigenPair smallest_generalized_eigen(const SparseMatrix& a, const SparseMatrix& b, double tol = kEigenTol,
                                     int max_iter = kEigenMaxIter);

/// Largest mu of C x = mu B x (C symmetric PSD, B SPD) by power iteration.
EigenPair largest_generalized_eigen(const SparseMatrix& c, const SparseMatrix& b, double tol = kEigenTol,
                                    int max_iter = kEigenMaxIter);

} // namespace parctrl
