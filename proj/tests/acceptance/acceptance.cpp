// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "parctrl/asymptotics.hpp"
#include "parctrl/cli.hpp"
#include "parctrl/config.hpp"
#include "parctrl/control.hpp"
#include "parctrl/io.hpp"
#include "parctrl/kernels.hpp"
#include "parctrl/norms.hpp"
#include "parctrl/properties.hpp"
#include "parctrl/scalar.hpp"
#include "support.hpp"

using namespace parctrl;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = std::string(PARCTRL_SOURCE_DIR) + "/configs/";

struct Bench {
    std::string name;
    Mesh mesh;
    DiscreteOperators ops;
    TimeGrid grid{1.0, 200};
    ProblemSpec spec;
};

Bench make_bench(int dim)
{
    Bench b;
    b.name = dim == 1 ? "1D n=256" : "2D 32x32";
    b.mesh = dim == 1 ? build_interval_mesh(256, 0.0, 1.0, Side::Left) : build_rect_mesh(32, 32, {Side::Left});
    b.ops = assemble(b.mesh);
    b.spec = parctrl::testing::benchmark_spec(b.mesh, b.ops, b.grid);
    return b;
}

const std::vector<Bench>& benches()
{
    static const std::vector<Bench> all = {make_bench(1), make_bench(2)};
    return all;
}

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

/// Accumulates sub-checks; the criterion passes when every one does.
struct Verdict {
    bool pass = true;
    std::vector<std::string> notes;

    void check(bool ok, const std::string& note)
    {
        pass = pass && ok;
        notes.push_back((ok ? "" : "!") + note);
    }
    void add(const PropertyResult& r, const std::string& where)
    {
        check(r.pass, where + " " + r.name + "=" + sci(r.value));
    }
};

// 1 ------------------------------------------------------------------------
Verdict adjoint_duality()
{
    Verdict v;
    std::mt19937_64 rng(101);
    for (const Bench& b : benches())
        for (Alpha a : {Alpha::dirichlet(), Alpha::robin(5.0)})
            v.add(check_adjoint_duality(b.ops, b.spec, b.grid, a, 20, rng, 1e-10), b.name);
    return v;
}

// 2 ------------------------------------------------------------------------
Verdict gradient_exactness()
{
    Verdict v;
    std::mt19937_64 rng(202);
    for (const Bench& b : benches())
        for (Alpha a : {Alpha::dirichlet(), Alpha::robin(5.0)})
        {
            const PropertyResult r = check_gradient(b.ops, b.spec, b.grid, a, 10, {1e-2, 1e-4}, rng, 1e-9);
            v.add(r, b.name);
            v.notes.back() += " (" + r.detail + ")";
        }
    return v;
}

// 3 ------------------------------------------------------------------------
Verdict optimality()
{
    Verdict v;
    std::mt19937_64 rng(303);
    for (const Bench& b : benches()) {
        const OptimalityCheck oc = check_optimality(b.ops, b.spec, b.grid, {1e-10, 200}, 200, 100, rng);
        v.check(oc.result.converged && oc.result.residual_abs <= 1e-10 && oc.result.iterations <= 200,
                b.name + " residual=" + sci(oc.result.residual_abs) + " iters=" + std::to_string(oc.result.iterations));
        v.add(oc.residual, b.name);
        v.add(oc.probes, b.name);
    }
    return v;
}

// 4 ------------------------------------------------------------------------
Verdict convexity_identity()
{
    Verdict v;
    std::mt19937_64 rng(404);
    for (const Bench& b : benches()) v.add(check_convexity_identity(b.ops, b.spec, b.grid, 20, rng, 1e-10), b.name);
    return v;
}

// 5 ------------------------------------------------------------------------
Verdict robin_limit()
{
    Verdict v;
    const std::vector<double> alphas = {10.0, 100.0, 1000.0, 10000.0};
    for (const Bench& b : benches()) {
        const auto rows = alpha_sweep(b.ops, b.spec, b.grid, std::nullopt, alphas, {1e-10, 500});
        bool decreasing = true, converged = true, uniform = true;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            converged = converged && rows[i].converged;
            uniform = uniform && rows[i].boundary_mismatch <= 2.0 * rows[0].boundary_mismatch;
            if (i == 0) continue;
            decreasing = decreasing && rows[i].err_state < rows[i - 1].err_state &&
                         rows[i].err_adjoint < rows[i - 1].err_adjoint &&
                         *rows[i].err_control < *rows[i - 1].err_control;
        }
        const auto& f = rows.front();
        const auto& l = rows.back();
        const double worst_ratio = std::max({l.err_state / f.err_state, l.err_adjoint / f.err_adjoint,
                                             *l.err_control / *f.err_control});
        v.check(converged, b.name + " converged");
        v.check(decreasing, b.name + " strictly decreasing");
        v.check(worst_ratio <= 0.1, b.name + " ratio(1e4/10)=" + sci(worst_ratio));
        v.check(uniform, b.name + " mismatch within 2x");
    }
    return v;
}

// 6 ------------------------------------------------------------------------
Verdict control_gap()
{
    Verdict v;
    std::mt19937_64 rng(606);
    for (const Bench& b : benches()) {
        const OptimOptions opts{1e-10, 500};
        const OptimResult joint = optimize_simultaneous(b.ops, b.spec, b.grid, opts, Alpha::dirichlet());
        v.check(joint.converged, b.name + " joint converged");
        double worst = 0.0;
        for (int i = 0; i < 5; ++i) {
            const TimeField g = random_field(b.ops.num_nodes(), b.grid, rng);
            const ControlGapEstimate e = estimate_control_gap(b.ops, b.spec, b.grid, g, joint, opts, Alpha::dirichlet());
            worst = std::max(worst, e.lhs / e.rhs);
            v.check(e.holds, b.name + " lhs/rhs=" + sci(e.lhs / e.rhs));
        }
        const ControlGapEstimate fp = estimate_control_gap(b.ops, b.spec, b.grid, *joint.g_opt, joint, opts, Alpha::dirichlet());
        v.check(fp.lhs <= 1e-8, b.name + " fixed point gap=" + sci(fp.lhs));
    }
    return v;
}

// 7 ------------------------------------------------------------------------
Verdict closed_form_lambda()
{
    Verdict v;
    const ScalarVariant variants[] = {ScalarVariant::parabolic(), ScalarVariant::parabolic_robin(5.0),
                                      ScalarVariant::elliptic(), ScalarVariant::elliptic_robin(5.0)};
    for (const Bench& b : benches()) {
        const BoundaryControl q0(Eigen::MatrixXd::Ones(b.ops.num_gamma2(), b.grid.N + 1));
        for (ScalarVariant var : variants)
            for (const PropertyResult& r : check_lambda_bar(b.ops, b.spec, q0, b.grid, var, 1e-10)) v.add(r, b.name);
    }
    return v;
}

// 8 ------------------------------------------------------------------------
Verdict monotonicity()
{
    Verdict v;
    for (const char* name : {"monotone_1d.cfg", "monotone_2d.cfg", "monotone_reversed_2d.cfg"}) {
        const RunConfig cfg = load_run_config(kConfigs + name);
        const Mesh mesh = build_mesh(cfg.mesh);
        const DiscreteOperators ops = assemble(mesh, cfg.mesh.mass);
        const ProblemData d = build_problem(cfg, mesh, ops);
        double worst = -std::numeric_limits<double>::infinity();
        for (const ScalarVariant& var : cfg.variants) {
            const MonotonicityReport rep = monotonicity_check(ops, cfg.grid, *d.first, *d.second, d.q0, var);
            worst = std::max(worst, rep.max_violation);
        }
        v.check(worst <= kMonotonicityTol, std::string(name) + " max_violation=" + sci(worst));
    }
    return v;
}

// 9 ------------------------------------------------------------------------
Verdict decay()
{
    Verdict v;
    for (int dim : {1, 2}) {
        Bench b = make_bench(dim);
        b.grid = TimeGrid{4.0, 200};
        b.spec = parctrl::testing::benchmark_spec(b.mesh, b.ops, b.grid);
        const BoundaryControl q(Eigen::MatrixXd::Constant(b.ops.num_gamma2(), b.grid.N + 1, 0.5));
        const Vector u_inf = solve_elliptic_dirichlet(b.ops, b.spec.g.step(b.grid.N), q.step(b.grid.N), b.spec.b);
        Vector bump(b.ops.num_nodes());
        for (int i = 0; i < b.ops.num_nodes(); ++i) {
            const auto& p = b.mesh.nodes[static_cast<std::size_t>(i)];
            bump[i] = std::sin(std::numbers::pi * p[0]) * (dim == 2 ? std::sin(std::numbers::pi * p[1]) : 1.0);
        }
        b.spec.v_b = u_inf + bump;
        v.check(b.grid.dt() * b.ops.lambda0 <= 0.1, b.name + " dt*lambda0=" + sci(b.grid.dt() * b.ops.lambda0));
        const DecayStudy d = decay_study(b.ops, b.spec, q, b.grid);
        v.add(check_decay_bound(d, "max_ratio", 1.05), b.name);
        v.check(d.fitted_rate >= 0.5 * d.lambda0, b.name + " rate=" + sci(d.fitted_rate) + " >= " + sci(0.5 * d.lambda0));

        // g(t) = g_inf + e^{-t}
        ProblemSpec forced = b.spec;
        const Vector g_inf = b.spec.g.step(b.grid.N);
        for (int k = 0; k <= b.grid.N; ++k) forced.g.values.col(k).array() += std::exp(-b.grid.time(k));
        const DecayStudy f = decay_with_forcing(b.ops, forced, q, g_inf, q.step(b.grid.N), b.grid);
        v.add(check_decay_bound(f, "forced_max_ratio", 1.05), b.name);
    }
    for (const char* name : {"decay_1d.cfg", "decay_2d.cfg", "decay_forcing_1d.cfg"}) {
        const RunConfig cfg = load_run_config(kConfigs + name);
        const Mesh mesh = build_mesh(cfg.mesh);
        const DiscreteOperators ops = assemble(mesh, cfg.mesh.mass);
        const ProblemData d = build_problem(cfg, mesh, ops);
        const DecayStudy s = cfg.decay_forcing ? decay_with_forcing(ops, d.spec, d.q, d.g_inf, d.q_inf, cfg.grid)
                                               : decay_study(ops, d.spec, d.q, cfg.grid);
        v.add(check_decay_bound(s, "max_ratio", 1.05), name);
        if (!cfg.decay_forcing) v.check(s.fitted_rate >= 0.5 * s.lambda0, std::string(name) + " rate=" + sci(s.fitted_rate));
    }
    return v;
}

// 10 -----------------------------------------------------------------------
Verdict counterexample()
{
    Verdict v;
    const double dt = 1e-3;
    const QuadratureRecord r = counterexample_quadrature(10.0, dt);
    v.check(r.pointwise_value <= 1e-8, "pointwise=" + sci(r.pointwise_value));
    const double gap = std::abs(r.cumulative_integral - r.exact_cumulative);
    v.check(r.cumulative_integral >= 0.49 && gap <= 2 * dt, "cumulative=" + sci(r.cumulative_integral) + " err=" + sci(gap));
    return v;
}

// 11 -----------------------------------------------------------------------
Verdict spectral_constants()
{
    Verdict v;
    // oracles: (pi^2/4) / (1 + pi^2/4) and coth(1)
    const double mu = std::numbers::pi * std::numbers::pi / 4.0;
    const double lambda0_exact = mu / (1.0 + mu);
    const double trace_sq_exact = 1.0 / std::tanh(1.0);
    const DiscreteOperators& ops = benches()[0].ops;
    const double e0 = std::abs(ops.lambda0 - lambda0_exact);
    const double e1 = std::abs(ops.trace_norm * ops.trace_norm - trace_sq_exact);
    v.check(e0 <= 1e-3, "lambda0=" + sci(ops.lambda0) + " err=" + sci(e0));
    v.check(e1 <= 1e-3, "trace_norm^2=" + sci(ops.trace_norm * ops.trace_norm) + " err=" + sci(e1));
    return v;
}

// 12 -----------------------------------------------------------------------
std::vector<std::string> csv_files(const fs::path& dir)
{
    std::vector<std::string> out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".csv") out.push_back(e.path().filename().string());
    std::sort(out.begin(), out.end());
    return out;
}

Verdict determinism()
{
    Verdict v;
    const fs::path root = fs::temp_directory_path() / "parctrl_acceptance_determinism";
    fs::remove_all(root);
    const std::vector<std::pair<std::string, std::string>> runs = {
        {"solve", "bench_1d.cfg"},       {"optimize", "bench_1d.cfg"},      {"lambda", "bench_1d.cfg"},
        {"sweep-alpha", "bench_1d.cfg"}, {"decay", "decay_1d.cfg"},         {"verify", "bench_1d.cfg"},
        {"optimize", "bench_2d.cfg"},    {"lambda", "monotone_2d.cfg"},     {"decay", "decay_forcing_1d.cfg"},
    };
    std::ostringstream sink;
    int n = 0;
    for (const auto& [cmd, cfg] : runs) {
        const std::string tag = cmd + "_" + std::to_string(n++);
        const fs::path first = root / tag / "first", second = root / tag / "second", serial = root / tag / "one_thread";
        const int c1 = run_command(cmd, kConfigs + cfg, first.string(), sink, sink);
        const int c2 = run_command(cmd, (first / "manifest.json").string(), second.string(), sink, sink);
        ::setenv("PARCTRL_THREADS", "1", 1);
        const int c3 = run_command(cmd, (first / "manifest.json").string(), serial.string(), sink, sink);
        ::unsetenv("PARCTRL_THREADS");
        kernels::set_thread_cap(0);
        bool same = c1 == kExitOk && c2 == kExitOk && c3 == kExitOk;
        const auto files = csv_files(first);
        same = same && !files.empty() && files == csv_files(second) && files == csv_files(serial);
        for (const std::string& f : files) {
            const std::string a = read_text((first / f).string());
            same = same && a == read_text((second / f).string()) && a == read_text((serial / f).string());
        }
        v.check(same, cmd + "(" + cfg + ")x" + std::to_string(files.size()));
    }
    fs::remove_all(root);
    return v;
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"adjoint duality", adjoint_duality},
        {"gradient exactness", gradient_exactness},
        {"optimality", optimality},
        {"convexity identity", convexity_identity},
        {"Robin to Dirichlet limit", robin_limit},
        {"control gap estimate", control_gap},
        {"closed-form scalar control", closed_form_lambda},
        {"monotonicity", monotonicity},
        {"exponential decay", decay},
        {"quadrature counterexample", counterexample},
        {"spectral constants", spectral_constants},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v.check(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::string notes;
        for (const std::string& n : v.notes) notes += (notes.empty() ? "" : "; ") + n;
        std::printf("%s  %2zu %-28s (%.1fs)  %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                    notes.c_str());
        std::fflush(stdout);
        failed += v.pass ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
