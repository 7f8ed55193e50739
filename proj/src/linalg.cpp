#include "parctrl/linalg.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "parctrl/error.hpp"

namespace parctrl {

struct SpdSolver::Impl {
    Eigen::SimplicialLLT<SparseMatrix> llt;
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
    bool direct = true;
};

SpdSolver::SpdSolver(const SparseMatrix& matrix, double tol)
    : matrix_(matrix), tol_(tol), impl_(std::make_unique<Impl>())
{
    PARCTRL_REQUIRE(matrix_.rows() == matrix_.cols(), "SpdSolver: matrix is not square");
    matrix_.makeCompressed();
    Vector row_sums = Vector::Zero(matrix_.rows());
    for (int k = 0; k < matrix_.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it) row_sums[it.row()] += std::abs(it.value());
    norm_inf_ = matrix_.rows() > 0 ? row_sums.maxCoeff() : 0.0;
    impl_->direct = matrix_.rows() <= kDirectSolveLimit;
    if (impl_->direct) {
        impl_->llt.compute(matrix_);
        if (impl_->llt.info() != Eigen::Success)
            throw SolverError("SpdSolver: Cholesky failed, matrix is not positive definite");
    } else {
        impl_->cg.setTolerance(tol_);
        impl_->cg.setMaxIterations(static_cast<int>(10 * matrix_.rows()));
        impl_->cg.compute(matrix_);
    }
}

SpdSolver::~SpdSolver() = default;
SpdSolver::SpdSolver(SpdSolver&&) noexcept = default;
SpdSolver& SpdSolver::operator=(SpdSolver&&) noexcept = default;

Vector SpdSolver::solve(const Vector& rhs) const
{
    PARCTRL_REQUIRE(rhs.size() == matrix_.rows(), "SpdSolver: rhs size mismatch");
    const double rhs_norm = rhs.lpNorm<Eigen::Infinity>();
    if (rhs_norm == 0.0) return Vector::Zero(rhs.size());
    // normwise backward error of x
    auto backward_error = [&](const Vector& x, const Vector& r) {
        return r.lpNorm<Eigen::Infinity>() / (norm_inf_ * x.lpNorm<Eigen::Infinity>() + rhs_norm);
    };

    Vector x;
    if (impl_->direct) {
        x = impl_->llt.solve(rhs);
        for (int pass = 0; pass < 3; ++pass) {
            const Vector r = rhs - matrix_ * x;
            if (backward_error(x, r) <= tol_) return x;
            x += impl_->llt.solve(r);
        }
    } else {
        x = impl_->cg.solve(rhs);
        if (impl_->cg.info() != Eigen::Success)
            throw SolverError("SpdSolver: CG did not converge in " + std::to_string(impl_->cg.iterations()) +
                              " iterations");
        // CG controls the relative 2-norm residual; allow for the recomputed residual's roundoff
        const double rel = (rhs - matrix_ * x).norm() / rhs.norm();
        if (!(rel <= 10.0 * tol_)) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.3e", rel);
            throw SolverError(std::string("SpdSolver: CG residual ") + buf + " exceeds tolerance");
        }
        return x;
    }
    const double err = backward_error(x, rhs - matrix_ * x);
    if (!(err <= tol_)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3e", err);
        throw SolverError(std::string("SpdSolver: backward error ") + buf + " exceeds tolerance");
    }
    return x;
}

Vector solve_spd(const SparseMatrix& matrix, const Vector& rhs, double tol)
{
    return SpdSolver(matrix, tol).solve(rhs);
}

SparseMatrix restrict_matrix(const SparseMatrix& a, std::span<const int> rows, std::span<const int> cols)
{
    std::vector<int> row_pos(a.rows(), -1), col_pos(a.cols(), -1);
    for (std::size_t i = 0; i < rows.size(); ++i) row_pos[rows[i]] = static_cast<int>(i);
    for (std::size_t j = 0; j < cols.size(); ++j) col_pos[cols[j]] = static_cast<int>(j);

    std::vector<Eigen::Triplet<double>> trips;
    for (int k = 0; k < a.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
            const int r = row_pos[it.row()], c = col_pos[it.col()];
            if (r >= 0 && c >= 0) trips.emplace_back(r, c, it.value());
        }
    }
    SparseMatrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

Vector gather(const Vector& full, std::span<const int> idx)
{
    Vector out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = full[idx[i]];
    return out;
}

void scatter(const Vector& part, std::span<const int> idx, Vector& full)
{
    for (std::size_t i = 0; i < idx.size(); ++i) full[idx[i]] = part[i];
}

namespace {

Vector start_vector(Eigen::Index n)
{
    // deterministic, not orthogonal to any smooth mode
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = 1.0 + 0.1 * std::sin(1.0 + 3.7 * static_cast<double>(i));
    return x;
}

} // namespace

EigenPair smallest_generalized_eigen(const SparseMatrix& a, const SparseMatrix& b, double tol, int max_iter)
{
    PARCTRL_REQUIRE(a.rows() == b.rows() && a.rows() > 0, "eigen: size mismatch");
    const SpdSolver solver(a);
    Vector x = start_vector(a.rows());
    double prev = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        Vector y = solver.solve(b * x);
        y /= std::sqrt(y.dot(b * y));
        const double value = y.dot(a * y); // B-normalized Rayleigh quotient
        x = std::move(y);
        if (it > 1 && std::abs(value - prev) <= tol * std::abs(value)) return {value, x, it};
        prev = value;
    }
    throw SolverError("inverse iteration did not converge in " + std::to_string(max_iter) + " iterations");
}

EigenPair largest_generalized_eigen(const SparseMatrix& c, const SparseMatrix& b, double tol, int max_iter)
{
    PARCTRL_REQUIRE(c.rows() == b.rows() && c.rows() > 0, "eigen: size mismatch");
    const SpdSolver solver(b);
    Vector x = start_vector(c.rows());
    double prev = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        Vector y = solver.solve(c * x);
        const double bn = std::sqrt(y.dot(b * y));
        if (bn == 0.0) return {0.0, x, it};
        y /= bn;
        const double value = y.dot(c * y);
        x = std::move(y);
        if (it > 1 && std::abs(value - prev) <= tol * std::abs(value)) return {value, x, it};
        prev = value;
    }
    throw SolverError("power iteration did not converge in " + std::to_string(max_iter) + " iterations");
}

} // namespace parctrl
