#pragma once

#include <Eigen/Dense>

#include "parctrl/error.hpp"

namespace parctrl {

/// Uniform grid t_k = k dt on [0, T], k = 0..N.
struct TimeGrid {
    double T = 1.0;
    int N = 1;

    double dt() const { return T / N; }
    double time(int k) const { return k == N ? T : k * dt(); }
    void validate() const
    {
        PARCTRL_REQUIRE(N >= 1, "time grid needs N >= 1");
        PARCTRL_REQUIRE(T > 0.0, "time grid needs T > 0");
    }
    bool operator==(const TimeGrid&) const = default;
};

/// Space-time samples: column k holds the spatial coefficients at t_k.
template <class Space>
struct Sampled {
    Eigen::MatrixXd values;

    Sampled() = default;
    explicit Sampled(Eigen::MatrixXd v) : values(std::move(v)) {}
    static Sampled zeros(int rows, const TimeGrid& grid) { return Sampled(Eigen::MatrixXd::Zero(rows, grid.N + 1)); }

    int rows() const { return static_cast<int>(values.rows()); }
    int steps() const { return static_cast<int>(values.cols()) - 1; }
    auto step(int k) { return values.col(k); }
    auto step(int k) const { return values.col(k); }

    bool matches(int expected_rows, const TimeGrid& grid) const
    {
        return values.rows() == expected_rows && values.cols() == grid.N + 1;
    }

    Sampled& operator+=(const Sampled& o) { values += o.values; return *this; }
    Sampled& operator-=(const Sampled& o) { values -= o.values; return *this; }
    Sampled& operator*=(double s) { values *= s; return *this; }
    friend Sampled operator+(Sampled a, const Sampled& b) { return a += b; }
    friend Sampled operator-(Sampled a, const Sampled& b) { return a -= b; }
    friend Sampled operator*(double s, Sampled a) { return a *= s; }
};

struct NodalSpace {};
struct Gamma2Space {};

/// Nodal field per time step: u, p, g, z_d.
using TimeField = Sampled<NodalSpace>;
/// Gamma2 flux values per time step: the boundary control q.
using BoundaryControl = Sampled<Gamma2Space>;

} // namespace parctrl
