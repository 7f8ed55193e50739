#include "parctrl/kernels.hpp"

#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>

#include <omp.h>

#include "parctrl/error.hpp"

namespace parctrl::kernels {

void column_bilinear(const SparseMatrix& a, const Eigen::MatrixXd& u, const Eigen::MatrixXd& v,
                     std::span<double> out, Exec exec)
{
    PARCTRL_REQUIRE(u.rows() == a.rows() && v.rows() == a.cols() && u.cols() == v.cols(),
                    "column_bilinear: shape mismatch");
    PARCTRL_REQUIRE(out.size() == static_cast<std::size_t>(u.cols()), "column_bilinear: output size mismatch");
    const int cols = static_cast<int>(u.cols());
    if (exec == Exec::Serial) {
        for (int k = 0; k < cols; ++k) out[k] = u.col(k).dot(a * v.col(k));
        return;
    }
#pragma omp parallel for schedule(static)
    for (int k = 0; k < cols; ++k) out[k] = u.col(k).dot(a * v.col(k));
}

double time_bilinear(const SparseMatrix& a, const Eigen::MatrixXd& u, const Eigen::MatrixXd& v, double dt,
                     Exec exec)
{
    std::vector<double> per_step(static_cast<std::size_t>(u.cols()));
    column_bilinear(a, u, v, per_step, exec);
    double total = 0.0;
    for (std::size_t k = 1; k < per_step.size(); ++k) total += dt * per_step[k];
    return total;
}

Eigen::MatrixXd apply_columns(const SparseMatrix& a, const Eigen::MatrixXd& u, Exec exec)
{
    PARCTRL_REQUIRE(u.rows() == a.cols(), "apply_columns: shape mismatch");
    Eigen::MatrixXd out(a.rows(), u.cols());
    const int cols = static_cast<int>(u.cols());
    if (exec == Exec::Serial) {
        for (int k = 0; k < cols; ++k) out.col(k) = a * u.col(k);
        return out;
    }
#pragma omp parallel for schedule(static)
    for (int k = 0; k < cols; ++k) out.col(k) = a * u.col(k);
    return out;
}

void for_each_index(int count, const std::function<void(int)>& fn, Exec exec)
{
    if (exec == Exec::Serial) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    // exceptions must not escape an OpenMP region; keep the first one
    std::exception_ptr first;
    std::mutex guard;
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < count; ++i) {
        try {
            fn(i);
        } catch (...) {
            const std::lock_guard<std::mutex> lock(guard);
            if (!first) first = std::current_exception();
        }
    }
    if (first) std::rethrow_exception(first);
}

namespace {
int g_thread_cap = 0;
}

void set_thread_cap(int threads)
{
    g_thread_cap = threads > 0 ? threads : 0;
    if (g_thread_cap > 0) omp_set_num_threads(g_thread_cap);
}

int thread_cap()
{
    return g_thread_cap > 0 ? g_thread_cap : omp_get_max_threads();
}

void apply_thread_env()
{
    const char* env = std::getenv("PARCTRL_THREADS");
    if (env == nullptr || *env == '\0') return;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    PARCTRL_REQUIRE(end != env && *end == '\0' && n > 0,
                    std::string("PARCTRL_THREADS must be a positive integer, got '") + env + "'");
    set_thread_cap(static_cast<int>(n));
}

} // namespace parctrl::kernels
