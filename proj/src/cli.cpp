#include "parctrl/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <random>

#include "parctrl/adjoint.hpp"
#include "parctrl/asymptotics.hpp"
#include "parctrl/config.hpp"
#include "parctrl/control.hpp"
#include "parctrl/error.hpp"
#include "parctrl/io.hpp"
#include "parctrl/kernels.hpp"
#include "parctrl/norms.hpp"
#include "parctrl/properties.hpp"
#include "parctrl/scalar.hpp"
#include "parctrl/state.hpp"

namespace parctrl {

namespace {

using nlohmann::json;

struct Context {
    RunConfig config;
    Mesh mesh;
    DiscreteOperators ops;
    ProblemData data;
    std::string out_dir;
    std::vector<std::string> outputs;
    json results = json::object();
    std::ostream* log = nullptr;

    void write(const std::string& name, const std::string& text)
    {
        write_text((std::filesystem::path(out_dir) / name).string(), text);
        outputs.push_back(name);
    }
};

std::vector<int> all_nodes(int n)
{
    std::vector<int> ids(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;
    return ids;
}

std::string opt_double(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

json optim_summary(const OptimResult& r)
{
    return {{"cost", r.cost},
            {"optimality_residual", r.optimality_residual},
            {"residual_abs", r.residual_abs},
            {"iterations", r.iterations},
            {"converged", r.converged}};
}

int cmd_solve(Context& cx)
{
    const auto& d = cx.data;
    const TimeGrid& grid = cx.config.grid;
    const TimeField u = solve_parabolic(cx.ops, d.spec, d.q, grid);
    const TimeField p = solve_adjoint(cx.ops, u, d.spec.z_d, d.spec.alpha, grid);
    const auto ids = all_nodes(cx.ops.num_nodes());
    cx.write("state.csv", time_field_table(grid, u.values, ids).str());
    cx.write("adjoint.csv", time_field_table(grid, p.values, ids).str());
    cx.results["tracking"] = 0.5 * std::pow(norm_scriptH(grid, cx.ops, u - d.spec.z_d), 2);
    cx.results["cost"] = d.spec.alpha.is_dirichlet() ? cost_J(cx.ops, d.spec, d.q, grid)
                                                     : cost_J_alpha(cx.ops, d.spec, d.q, d.spec.alpha.value, grid);
    return kExitOk;
}

int cmd_optimize(Context& cx)
{
    const TimeGrid& grid = cx.config.grid;
    const OptimResult r = optimize_boundary(cx.ops, cx.data.spec, grid, cx.config.solver, cx.data.spec.alpha);
    cx.write("control.csv", time_field_table(grid, r.q_opt->values, cx.ops.gamma2_nodes).str());
    const auto ids = all_nodes(cx.ops.num_nodes());
    cx.write("state.csv", time_field_table(grid, r.u_opt.values, ids).str());
    cx.write("adjoint.csv", time_field_table(grid, r.p_opt.values, ids).str());
    CsvTable hist;
    hist.header = {"iteration", "cost"};
    for (std::size_t i = 0; i < r.cost_history.size(); ++i)
        hist.add({std::to_string(i), format_double(r.cost_history[i])});
    cx.write("history.csv", hist.str());
    cx.results["optimize"] = optim_summary(r);
    if (!r.converged) {
        *cx.log << "optimizer did not converge: residual " << r.optimality_residual << " after " << r.iterations
                << " iterations\n";
        return kExitNotConverged;
    }
    return kExitOk;
}

int cmd_lambda(Context& cx)
{
    const auto& d = cx.data;
    PARCTRL_REQUIRE(d.has_q0, "lambda needs a q0 profile in [data]");
    const TimeGrid& grid = cx.config.grid;
    CsvTable t;
    t.header = {"variant", "A", "B", "C", "lambda_opt", "H_lambda_opt"};
    for (const ScalarVariant& v : cx.config.variants) {
        const QuadraticCoefficients c = lambda_bar(cx.ops, d.spec, d.q0, grid, v);
        const double h = restricted_cost(cx.ops, d.spec, d.q0, grid, v, c.lambda_opt);
        t.add({v.name(), format_double(c.A), format_double(c.B), format_double(c.C), format_double(c.lambda_opt),
               format_double(h)});
    }
    cx.write("lambda.csv", t.str());

    // Horizon trajectory of the parabolic minimizer, scaled against the stationary coefficients. Logged only.
    std::vector<int> steps;
    for (int j = 4; j >= 0; --j)
        if (const int k = grid.N >> j; k >= 1 && (steps.empty() || k > steps.back())) steps.push_back(k);
    CsvTable tr;
    tr.header = {"variant", "T", "A_over_T", "B_over_T", "C_over_T", "lambda_opt", "stationary_lambda_opt"};
    for (const ScalarVariant& v : cx.config.variants) {
        if (!v.is_parabolic()) continue;
        const ScalarVariant stationary = v.is_robin() ? ScalarVariant::elliptic_robin(v.alpha) : ScalarVariant::elliptic();
        const double lambda_inf = lambda_bar(cx.ops, d.spec, d.q0, grid, stationary).lambda_opt;
        for (const HorizonCoefficients& h : lambda_bar_trajectory(cx.ops, d.spec, d.q0, grid, v, steps)) {
            const QuadraticCoefficients& c = h.coefficients;
            tr.add({v.name(), format_double(h.T), format_double(c.A / h.T), format_double(c.B / h.T),
                    format_double(c.C / h.T), format_double(c.lambda_opt), format_double(lambda_inf)});
        }
    }
    if (!tr.rows.empty()) cx.write("lambda_trajectory.csv", tr.str());
    if (d.first && d.second) {
        CsvTable m;
        m.header = {"variant", "lambda1", "lambda2", "max_violation", "holds"};
        bool all = true;
        for (const ScalarVariant& v : cx.config.variants) {
            const MonotonicityReport rep = monotonicity_check(cx.ops, grid, *d.first, *d.second, d.q0, v);
            all = all && rep.holds;
            m.add({v.name(), format_double(d.first->lambda), format_double(d.second->lambda),
                   format_double(rep.max_violation), rep.holds ? "true" : "false"});
        }
        cx.write("monotonicity.csv", m.str());
        cx.results["monotonicity_holds"] = all;
    }
    return kExitOk;
}

int cmd_sweep(Context& cx)
{
    const TimeGrid& grid = cx.config.grid;
    std::optional<BoundaryControl> q;
    if (!cx.config.sweep_optimize) q = cx.data.q;
    const auto rows = alpha_sweep(cx.ops, cx.data.spec, grid, q, cx.config.alphas, cx.config.solver);
    CsvTable t;
    t.header = {"alpha", "err_state", "err_adjoint", "err_control", "boundary_mismatch", "converged"};
    std::vector<double> x;
    PlotSeries s1{"err_state", {}}, s2{"err_adjoint", {}}, s3{"err_control", {}}, s4{"boundary_mismatch", {}};
    bool converged = true;
    for (const SweepRow& r : rows) {
        t.add({format_double(r.alpha), format_double(r.err_state), format_double(r.err_adjoint),
               opt_double(r.err_control), format_double(r.boundary_mismatch), r.converged ? "true" : "false"});
        x.push_back(r.alpha);
        s1.y.push_back(r.err_state);
        s2.y.push_back(r.err_adjoint);
        s3.y.push_back(r.err_control.value_or(std::nan("")));
        s4.y.push_back(r.boundary_mismatch);
        converged = converged && r.converged;
    }
    cx.write("sweep.csv", t.str());
    if (cx.config.plots) {
        std::vector<PlotSeries> series = {s1, s2};
        if (cx.config.sweep_optimize) series.push_back(s3);
        series.push_back(s4);
        cx.write("sweep.svg", svg_line_plot("Robin to Dirichlet", "alpha", x, series, true, true));
    }
    return converged ? kExitOk : kExitNotConverged;
}

DecayStudy run_decay(const Context& cx)
{
    const auto& d = cx.data;
    if (cx.config.decay_forcing) return decay_with_forcing(cx.ops, d.spec, d.q, d.g_inf, d.q_inf, cx.config.grid);
    return decay_study(cx.ops, d.spec, d.q, cx.config.grid);
}

int cmd_decay(Context& cx)
{
    const DecayStudy study = run_decay(cx);
    CsvTable t;
    t.header = {"t", "err_H", "bound", "ratio"};
    std::vector<double> x;
    PlotSeries e{"err_H", {}}, b{"bound", {}};
    for (const DecayRow& r : study.rows) {
        t.add({format_double(r.t), format_double(r.err_H), format_double(r.bound), format_double(r.ratio())});
        x.push_back(r.t);
        e.y.push_back(r.err_H);
        b.y.push_back(r.bound);
    }
    cx.write("decay.csv", t.str());
    if (cx.config.plots) cx.write("decay.svg", svg_line_plot("Decay to steady state", "t", x, {e, b}, false, true));
    cx.results["decay"] = {{"lambda0", study.lambda0},
                           {"fitted_rate", study.fitted_rate},
                           {"max_ratio", check_decay_bound(study, "decay").value}};
    return kExitOk;
}

int cmd_verify(Context& cx)
{
    const auto& d = cx.data;
    const TimeGrid& grid = cx.config.grid;
    std::mt19937_64 rng(cx.config.seed);
    const int n = cx.config.probes;
    const Alpha robin = cx.config.alpha.is_dirichlet() ? Alpha::robin(5.0) : cx.config.alpha;

    std::vector<PropertyResult> res;
    res.push_back(check_adjoint_duality(cx.ops, d.spec, grid, Alpha::dirichlet(), n, rng));
    res.push_back(check_adjoint_duality(cx.ops, d.spec, grid, robin, n, rng));
    res.push_back(check_gradient(cx.ops, d.spec, grid, Alpha::dirichlet(), n, {1e-2, 1e-4}, rng));
    res.push_back(check_convexity_identity(cx.ops, d.spec, grid, n, rng));
    {
        OptimalityCheck oc = check_optimality(cx.ops, d.spec, grid, cx.config.solver, cx.config.solver.max_iter, n, rng);
        res.push_back(oc.residual);
        res.push_back(oc.probes);
    }
    if (d.has_q0)
        for (const ScalarVariant& v : cx.config.variants)
            for (PropertyResult& r : check_lambda_bar(cx.ops, d.spec, d.q0, grid, v)) res.push_back(std::move(r));
    if (d.first && d.second && cx.ops.mass_kind == MassKind::Lumped)
        for (const ScalarVariant& v : cx.config.variants) {
            const MonotonicityReport rep = monotonicity_check(cx.ops, grid, *d.first, *d.second, d.q0, v);
            res.push_back({"monotonicity_" + v.name(), rep.max_violation, kMonotonicityTol, rep.holds, ""});
        }
    const bool data_constant = [&] {
        for (int k = 1; k <= grid.N; ++k)
            if (d.spec.g.values.col(k) != d.spec.g.values.col(grid.N) || d.q.values.col(k) != d.q.values.col(grid.N))
                return false;
        return true;
    }();
    if (cx.config.decay_forcing || data_constant) {
        const DecayStudy study = run_decay(cx);
        res.push_back(check_decay_bound(study, cx.config.decay_forcing ? "decay_forcing_bound" : "decay_bound"));
        if (!cx.config.decay_forcing) {
            const double need = 0.5 * study.lambda0;
            res.push_back({"decay_fitted_rate", need - study.fitted_rate, 0.0, study.fitted_rate >= need,
                           "fitted=" + format_double(study.fitted_rate)});
        }
    }

    CsvTable t;
    t.header = {"property", "value", "threshold", "pass"};
    json listing = json::array();
    bool all = true;
    for (const PropertyResult& r : res) {
        t.add({r.name, format_double(r.value), format_double(r.threshold), r.pass ? "true" : "false"});
        listing.push_back({{"property", r.name}, {"value", r.value}, {"threshold", r.threshold}, {"pass", r.pass}});
        *cx.log << (r.pass ? "PASS " : "FAIL ") << r.name << "  value=" << r.value << " threshold=" << r.threshold
                << (r.detail.empty() ? "" : "  " + r.detail) << "\n";
        all = all && r.pass;
    }
    cx.write("verify.csv", t.str());
    cx.results["verify"] = listing;
    cx.results["verify_passed"] = all;
    return all ? kExitOk : kExitVerifyFailed;
}

} // namespace

std::vector<std::string> cli_commands() { return {"solve", "optimize", "lambda", "sweep-alpha", "decay", "verify"}; }

int run_command(const std::string& command, const std::string& config_path, const std::string& out_dir,
                std::ostream& log, std::ostream& err)
{
    const auto started = std::chrono::steady_clock::now();
    const auto cmds = cli_commands();
    if (std::find(cmds.begin(), cmds.end(), command) == cmds.end()) {
        err << "unknown command '" << command << "'\n";
        return kExitInvalid;
    }
    Context cx;
    cx.out_dir = out_dir;
    cx.log = &log;
    int code = kExitOk;
    try {
        kernels::apply_thread_env();
        cx.config = load_run_config(config_path);
        cx.mesh = build_mesh(cx.config.mesh);
        cx.ops = assemble(cx.mesh, cx.config.mesh.mass);
        cx.data = build_problem(cx.config, cx.mesh, cx.ops);
        std::filesystem::create_directories(out_dir);

        if (command == "solve") code = cmd_solve(cx);
        else if (command == "optimize") code = cmd_optimize(cx);
        else if (command == "lambda") code = cmd_lambda(cx);
        else if (command == "sweep-alpha") code = cmd_sweep(cx);
        else if (command == "decay") code = cmd_decay(cx);
        else code = cmd_verify(cx);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const SolverError& e) {
        err << "solver error: " << e.what() << "\n";
        return kExitNotConverged;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    Manifest m;
    m.command = command;
    m.config_text = cx.config.text;
    m.config_path = config_path;
    m.config_dir = cx.config.base_dir;
    m.body["mesh_hash"] = mesh_hash(cx.mesh);
    m.body["grid_hash"] = grid_hash(cx.config.grid);
    m.body["mesh"] = {{"dim", cx.mesh.dim}, {"nodes", cx.mesh.num_nodes()}, {"elements", cx.mesh.num_elements()}};
    m.body["grid"] = {{"T", cx.config.grid.T}, {"N", cx.config.grid.N}};
    m.body["spectral"] = {{"lambda0", cx.ops.lambda0}, {"lambda1", cx.ops.lambda1}, {"trace_norm", cx.ops.trace_norm}};
    m.body["results"] = cx.results;
    m.body["outputs"] = cx.outputs;
    m.body["exit_code"] = code;
    m.body["threads"] = kernels::thread_cap();
    m.body["wall_time_s"] = wall;
    write_manifest((std::filesystem::path(out_dir) / "manifest.json").string(), m);
    log << command << ": wrote " << cx.outputs.size() << " file(s) to " << out_dir << " (exit " << code << ")\n";
    return code;
}

} // namespace parctrl
