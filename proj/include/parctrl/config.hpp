#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "parctrl/control.hpp"
#include "parctrl/fields.hpp"
#include "parctrl/mesh.hpp"
#include "parctrl/operators.hpp"
#include "parctrl/scalar.hpp"
#include "parctrl/state.hpp"

namespace parctrl {

/// Flat `[section]` / `key = value` text. '#' and ';' start comments.
/// Every value remembers its line for diagnostics.
class IniDocument {
public:
    struct Entry {
        std::string value;
        int line = 0;
    };

    static IniDocument parse(const std::string& text, const std::string& origin);

    bool has(const std::string& section, const std::string& key) const;
    const Entry* find(const std::string& section, const std::string& key) const;
    /// Throws ValidationError naming the absent key.
    const Entry& require(const std::string& section, const std::string& key) const;
    bool has_section(const std::string& section) const { return sections_.count(section) != 0; }
    int section_line(const std::string& section) const;
    const std::string& origin() const { return origin_; }
    std::vector<std::string> keys(const std::string& section) const;

    /// "origin:line: message"
    std::string where(int line) const;

private:
    std::string origin_;
    std::map<std::string, std::map<std::string, Entry>> sections_;
    std::map<std::string, int> section_lines_;
};

/// Analytic data profile: a sum of registry terms, or a CSV reference.
///   constant(c)       c
///   sine-bump(a)      a prod_i sin(pi x_i)
///   exp-decay(a, r)   a exp(-r t)
///   ramp(a, s)        a + s x
///   csv:<path>        tabulated values (see io.hpp)
class Profile {
public:
    struct Term {
        enum class Kind { Constant, SineBump, ExpDecay, Ramp };
        Kind kind;
        std::vector<double> args;
    };

    static Profile parse(const std::string& text, const std::string& base_dir);

    bool is_csv() const { return !csv_path_.empty(); }
    const std::string& csv_path() const { return csv_path_; }
    const std::string& text() const { return text_; }
    double eval(const std::array<double, 2>& x, int dim, double t) const;

private:
    std::string text_;
    std::string csv_path_;
    std::vector<Term> terms_;
};

std::vector<std::string> profile_registry();

struct MeshConfig {
    int dim = 1;
    int cells = 0;
    int nx = 0;
    int ny = 0;
    std::vector<Side> gamma1;
    MassKind mass = MassKind::Consistent;
};

/// Second problem of a comparison; the first uses [data] and lambda1.
struct CompareConfig {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    std::string g2;
    std::string b2;
    std::string v_b2;
    std::map<std::string, int> lines;
};

struct RunConfig {
    std::string text;       // verbatim config, echoed into the manifest
    std::string origin;     // path used in diagnostics
    std::string base_dir;   // CSV references resolve against this

    MeshConfig mesh;
    TimeGrid grid;
    std::map<std::string, std::string> data; // profile texts by data name
    std::map<std::string, int> data_lines;
    double M = 1.0;
    double M1 = 1.0;
    Alpha alpha;
    std::vector<double> alphas;
    std::vector<ScalarVariant> variants;
    bool sweep_optimize = false;
    bool decay_forcing = false;
    OptimOptions solver;
    unsigned long long seed = 20240607ULL;
    int probes = 10;
    std::optional<CompareConfig> compare;
    bool plots = true;
};

/// Parses and validates; throws ValidationError with "origin:line:" anchors.
RunConfig parse_run_config(const std::string& text, const std::string& origin, const std::string& base_dir);
RunConfig load_run_config(const std::string& path);

Mesh build_mesh(const MeshConfig& config);

/// Data evaluated on a mesh: spec plus the control-side fields.
struct ProblemData {
    ProblemSpec spec;
    BoundaryControl q;  // [data] q, default zero
    BoundaryControl q0; // [data] q0, empty when absent
    bool has_q0 = false;
    Vector g_inf;       // present when decay forcing is configured
    Vector q_inf;
    std::optional<ComparisonCase> first;
    std::optional<ComparisonCase> second;
};

ProblemData build_problem(const RunConfig& config, const Mesh& mesh, const DiscreteOperators& ops);

} // namespace parctrl
