#include "parctrl/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "parctrl/error.hpp"
#include "parctrl/io.hpp"

namespace parctrl {

namespace {

std::string trim(const std::string& s)
{
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string lower(std::string s)
{
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::optional<double> to_double(const std::string& raw)
{
    const std::string s = trim(raw);
    if (s.empty()) return std::nullopt;
    const std::string l = lower(s);
    if (l == "inf" || l == "infinity") return std::numeric_limits<double>::infinity();
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (errno != 0 || end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::vector<std::string> split_top_level(const std::string& s, char sep)
{
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : s) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == sep && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

const std::map<std::string, std::vector<std::string>>& schema()
{
    static const std::map<std::string, std::vector<std::string>> s = {
        {"mesh", {"dim", "cells", "nx", "ny", "gamma1", "mass"}},
        {"time", {"T", "N"}},
        {"data", {"g", "b", "v_b", "z_d", "q", "q0", "g_inf", "q_inf"}},
        {"weights", {"M", "M1"}},
        {"model", {"alpha", "alphas", "variants", "sweep_control", "decay"}},
        {"compare", {"lambda1", "lambda2", "g2", "b2", "v_b2"}},
        {"solver", {"tol", "max_iter", "seed", "probes"}},
        {"output", {"plots"}},
    };
    return s;
}

class Reader {
public:
    explicit Reader(const IniDocument& doc) : doc_(doc) {}

    double real(const std::string& sec, const std::string& key, std::optional<double> fallback) const
    {
        const auto* e = doc_.find(sec, key);
        if (e == nullptr) {
            if (fallback) return *fallback;
            doc_.require(sec, key);
        }
        const auto v = to_double(e->value);
        if (!v) fail(e->line, "[" + sec + "] " + key + ": expected a number, got '" + e->value + "'");
        return *v;
    }

    long long integer(const std::string& sec, const std::string& key, std::optional<long long> fallback) const
    {
        const auto* e = doc_.find(sec, key);
        if (e == nullptr) {
            if (fallback) return *fallback;
            doc_.require(sec, key);
        }
        const std::string s = trim(e->value);
        errno = 0;
        char* end = nullptr;
        const long long v = std::strtoll(s.c_str(), &end, 10);
        if (s.empty() || errno != 0 || end != s.c_str() + s.size())
            fail(e->line, "[" + sec + "] " + key + ": expected an integer, got '" + e->value + "'");
        return v;
    }

    std::string text(const std::string& sec, const std::string& key, const std::string& fallback) const
    {
        const auto* e = doc_.find(sec, key);
        return e == nullptr ? fallback : trim(e->value);
    }

    bool flag(const std::string& sec, const std::string& key, bool fallback) const
    {
        const auto* e = doc_.find(sec, key);
        if (e == nullptr) return fallback;
        const std::string v = lower(trim(e->value));
        if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
        if (v == "false" || v == "no" || v == "0" || v == "off") return false;
        fail(e->line, "[" + sec + "] " + key + ": expected true or false, got '" + e->value + "'");
    }

    int line(const std::string& sec, const std::string& key) const
    {
        const auto* e = doc_.find(sec, key);
        return e == nullptr ? doc_.section_line(sec) : e->line;
    }

    [[noreturn]] void fail(int line, const std::string& msg) const { throw ValidationError(doc_.where(line) + msg); }

private:
    const IniDocument& doc_;
};

std::string join_dir(const std::string& base, const std::string& rel)
{
    const std::filesystem::path p(rel);
    if (p.is_absolute() || base.empty()) return p.string();
    return (std::filesystem::path(base) / p).string();
}

} // namespace

IniDocument IniDocument::parse(const std::string& text, const std::string& origin)
{
    IniDocument doc;
    doc.origin_ = origin;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        const auto hash = s.find_first_of("#;");
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ValidationError(doc.where(line) + "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            const auto& known = schema();
            if (known.find(section) == known.end()) throw ValidationError(doc.where(line) + "unknown section [" + section + "]");
            if (doc.section_lines_.count(section) != 0)
                throw ValidationError(doc.where(line) + "duplicate section [" + section + "]");
            doc.section_lines_[section] = line;
            doc.sections_[section];
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ValidationError(doc.where(line) + "expected 'key = value'");
        if (section.empty()) throw ValidationError(doc.where(line) + "key outside of any section");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        const auto& keys = schema().at(section);
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw ValidationError(doc.where(line) + "unknown key '" + key + "' in [" + section + "]");
        auto& sec = doc.sections_[section];
        if (sec.count(key) != 0) throw ValidationError(doc.where(line) + "duplicate key '" + key + "'");
        sec[key] = {value, line};
    }
    return doc;
}

bool IniDocument::has(const std::string& section, const std::string& key) const { return find(section, key) != nullptr; }

const IniDocument::Entry* IniDocument::find(const std::string& section, const std::string& key) const
{
    const auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
}

const IniDocument::Entry& IniDocument::require(const std::string& section, const std::string& key) const
{
    const Entry* e = find(section, key);
    if (e == nullptr) {
        const int line = section_line(section);
        const std::string anchor = line > 0 ? where(line) : origin_ + ": ";
        throw ValidationError(anchor + "missing required key '" + key + "' in [" + section + "]");
    }
    return *e;
}

int IniDocument::section_line(const std::string& section) const
{
    const auto it = section_lines_.find(section);
    return it == section_lines_.end() ? 0 : it->second;
}

std::vector<std::string> IniDocument::keys(const std::string& section) const
{
    std::vector<std::string> out;
    const auto s = sections_.find(section);
    if (s != sections_.end())
        for (const auto& [k, v] : s->second) out.push_back(k);
    return out;
}

std::string IniDocument::where(int line) const { return origin_ + ":" + std::to_string(line) + ": "; }

// ---------------------------------------------------------------------------

std::vector<std::string> profile_registry() { return {"constant", "sine-bump", "exp-decay", "ramp", "csv:<path>"}; }

Profile Profile::parse(const std::string& text, const std::string& base_dir)
{
    Profile p;
    p.text_ = trim(text);
    PARCTRL_REQUIRE(!p.text_.empty(), "empty profile");
    if (p.text_.rfind("csv:", 0) == 0) {
        const std::string rel = trim(p.text_.substr(4));
        PARCTRL_REQUIRE(!rel.empty(), "csv profile needs a path");
        p.csv_path_ = join_dir(base_dir, rel);
        PARCTRL_REQUIRE(std::filesystem::is_regular_file(p.csv_path_), "referenced file does not exist: " + p.csv_path_);
        return p;
    }
    static const std::map<std::string, std::pair<Term::Kind, std::size_t>> registry = {
        {"constant", {Term::Kind::Constant, 1}},
        {"sine-bump", {Term::Kind::SineBump, 1}},
        {"exp-decay", {Term::Kind::ExpDecay, 2}},
        {"ramp", {Term::Kind::Ramp, 2}},
    };
    for (const std::string& term : split_top_level(p.text_, '+')) {
        const auto open = term.find('(');
        PARCTRL_REQUIRE(open != std::string::npos && term.back() == ')', "malformed profile term '" + term + "'");
        const std::string name = trim(term.substr(0, open));
        const auto it = registry.find(name);
        PARCTRL_REQUIRE(it != registry.end(), "unknown profile '" + name +
                                                  "' (constant, sine-bump, exp-decay, ramp, csv:<path>)");
        Term t{it->second.first, {}};
        for (const std::string& arg : split_top_level(term.substr(open + 1, term.size() - open - 2), ',')) {
            const auto v = to_double(arg);
            PARCTRL_REQUIRE(v && std::isfinite(*v), "profile '" + name + "': bad argument '" + arg + "'");
            t.args.push_back(*v);
        }
        PARCTRL_REQUIRE(t.args.size() == it->second.second,
                        "profile '" + name + "' takes " + std::to_string(it->second.second) + " argument(s)");
        p.terms_.push_back(std::move(t));
    }
    return p;
}

double Profile::eval(const std::array<double, 2>& x, int dim, double t) const
{
    PARCTRL_REQUIRE(!is_csv(), "csv profiles are tabulated, not evaluated");
    double s = 0.0;
    for (const Term& term : terms_) {
        switch (term.kind) {
        case Term::Kind::Constant: s += term.args[0]; break;
        case Term::Kind::SineBump: {
            double v = term.args[0];
            for (int i = 0; i < dim; ++i) v *= std::sin(std::numbers::pi * x[static_cast<std::size_t>(i)]);
            s += v;
            break;
        }
        case Term::Kind::ExpDecay: s += term.args[0] * std::exp(-term.args[1] * t); break;
        case Term::Kind::Ramp: s += term.args[0] + term.args[1] * x[0]; break;
        }
    }
    return s;
}

// ---------------------------------------------------------------------------

RunConfig parse_run_config(const std::string& text, const std::string& origin, const std::string& base_dir)
{
    const IniDocument doc = IniDocument::parse(text, origin);
    const Reader rd(doc);
    RunConfig c;
    c.text = text;
    c.origin = origin;
    c.base_dir = base_dir;

    // [mesh]
    doc.require("mesh", "dim");
    c.mesh.dim = static_cast<int>(rd.integer("mesh", "dim", std::nullopt));
    if (c.mesh.dim != 1 && c.mesh.dim != 2) rd.fail(rd.line("mesh", "dim"), "[mesh] dim must be 1 or 2");
    if (c.mesh.dim == 1) {
        c.mesh.cells = static_cast<int>(rd.integer("mesh", "cells", std::nullopt));
        if (c.mesh.cells < 2) rd.fail(rd.line("mesh", "cells"), "[mesh] cells must be >= 2");
    } else {
        c.mesh.nx = static_cast<int>(rd.integer("mesh", "nx", std::nullopt));
        c.mesh.ny = static_cast<int>(rd.integer("mesh", "ny", std::nullopt));
        if (c.mesh.nx < 2 || c.mesh.ny < 2) rd.fail(rd.line("mesh", "nx"), "[mesh] nx and ny must be >= 2");
    }
    const std::string g1 = rd.text("mesh", "gamma1", "left");
    for (const std::string& side : split_top_level(g1, ',')) {
        try {
            c.mesh.gamma1.push_back(parse_side(lower(side)));
        } catch (const ValidationError& e) {
            rd.fail(rd.line("mesh", "gamma1"), e.what());
        }
    }
    if (c.mesh.dim == 1 && (c.mesh.gamma1.size() != 1 || (c.mesh.gamma1[0] != Side::Left && c.mesh.gamma1[0] != Side::Right)))
        rd.fail(rd.line("mesh", "gamma1"), "[mesh] gamma1 must be 'left' or 'right' in 1D");
    const std::string mass = lower(rd.text("mesh", "mass", "consistent"));
    if (mass == "consistent") c.mesh.mass = MassKind::Consistent;
    else if (mass == "lumped") c.mesh.mass = MassKind::Lumped;
    else rd.fail(rd.line("mesh", "mass"), "[mesh] mass must be 'consistent' or 'lumped'");

    // [time]
    c.grid.T = rd.real("time", "T", std::nullopt);
    c.grid.N = static_cast<int>(rd.integer("time", "N", std::nullopt));
    if (!(c.grid.T > 0.0) || !std::isfinite(c.grid.T)) rd.fail(rd.line("time", "T"), "[time] T must be finite and > 0");
    if (c.grid.N < 1) rd.fail(rd.line("time", "N"), "[time] N must be >= 1");

    // [data]
    const std::map<std::string, std::string> defaults = {
        {"g", "constant(0)"}, {"z_d", "constant(0)"}, {"q", "constant(0)"}, {"b", "constant(0)"}};
    for (const std::string& key : schema().at("data")) {
        const auto* e = doc.find("data", key);
        std::string value;
        int line = doc.section_line("data");
        if (e != nullptr) {
            value = e->value;
            line = e->line;
        } else if (defaults.count(key) != 0) {
            value = defaults.at(key);
        } else if (key == "v_b") {
            value = c.data.at("b");
            line = c.data_lines.at("b");
        } else {
            continue;
        }
        try {
            (void)Profile::parse(value, base_dir);
        } catch (const ValidationError& err) {
            rd.fail(line, "[data] " + key + ": " + err.what());
        }
        c.data[key] = value;
        c.data_lines[key] = line;
    }

    // [weights]
    c.M = rd.real("weights", "M", 1.0);
    c.M1 = rd.real("weights", "M1", 1.0);
    if (!(c.M > 0.0) || !std::isfinite(c.M)) rd.fail(rd.line("weights", "M"), "[weights] M must be finite and > 0");
    if (!(c.M1 > 0.0) || !std::isfinite(c.M1)) rd.fail(rd.line("weights", "M1"), "[weights] M1 must be finite and > 0");

    // [model]
    const double a = rd.real("model", "alpha", std::numeric_limits<double>::infinity());
    if (!(a > 0.0)) rd.fail(rd.line("model", "alpha"), "[model] alpha must be > 0 or inf");
    c.alpha = std::isinf(a) ? Alpha::dirichlet() : Alpha::robin(a);
    if (const auto* e = doc.find("model", "alphas")) {
        for (const std::string& tok : split_top_level(e->value, ',')) {
            const auto v = to_double(tok);
            if (!v || !std::isfinite(*v)) rd.fail(e->line, "[model] alphas: bad entry '" + tok + "'");
            if (!(*v > 1.0)) rd.fail(e->line, "[model] alphas must all be > 1");
            if (!c.alphas.empty() && !(*v > c.alphas.back())) rd.fail(e->line, "[model] alphas must be strictly increasing");
            c.alphas.push_back(*v);
        }
    } else {
        c.alphas = {10.0, 100.0, 1000.0, 10000.0};
    }
    {
        const double va = std::isinf(a) ? 5.0 : a;
        const std::string def = "parabolic, parabolic-robin, elliptic, elliptic-robin";
        for (const std::string& tok : split_top_level(rd.text("model", "variants", def), ',')) {
            try {
                c.variants.push_back(parse_scalar_variant(lower(tok), va));
            } catch (const ValidationError& err) {
                rd.fail(rd.line("model", "variants"), std::string("[model] variants: ") + err.what());
            }
        }
    }
    const std::string sc = lower(rd.text("model", "sweep_control", "fixed"));
    if (sc != "fixed" && sc != "optimize") rd.fail(rd.line("model", "sweep_control"), "[model] sweep_control must be 'fixed' or 'optimize'");
    c.sweep_optimize = sc == "optimize";
    const std::string decay = lower(rd.text("model", "decay", "constant"));
    if (decay != "constant" && decay != "forcing") rd.fail(rd.line("model", "decay"), "[model] decay must be 'constant' or 'forcing'");
    c.decay_forcing = decay == "forcing";
    if (c.decay_forcing) {
        if (c.data.count("g_inf") == 0) doc.require("data", "g_inf");
        if (c.data.count("q_inf") == 0) doc.require("data", "q_inf");
    }

    // [compare]
    if (doc.has_section("compare")) {
        CompareConfig cc;
        cc.lambda1 = rd.real("compare", "lambda1", std::nullopt);
        cc.lambda2 = rd.real("compare", "lambda2", std::nullopt);
        cc.g2 = rd.text("compare", "g2", c.data.at("g"));
        cc.b2 = rd.text("compare", "b2", c.data.at("b"));
        cc.v_b2 = rd.text("compare", "v_b2", doc.has("compare", "b2") ? cc.b2 : c.data.at("v_b"));
        for (const auto& [key, value] : {std::pair{"g2", cc.g2}, std::pair{"b2", cc.b2}, std::pair{"v_b2", cc.v_b2}}) {
            try {
                (void)Profile::parse(value, base_dir);
            } catch (const ValidationError& err) {
                rd.fail(rd.line("compare", key), std::string("[compare] ") + key + ": " + err.what());
            }
        }
        for (const char* key : {"lambda1", "lambda2", "g2", "b2", "v_b2"}) cc.lines[key] = rd.line("compare", key);
        if (c.data.count("q0") == 0) doc.require("data", "q0");
        c.compare = cc;
    }

    // [solver]
    c.solver.tol = rd.real("solver", "tol", 1e-10);
    c.solver.max_iter = static_cast<int>(rd.integer("solver", "max_iter", 500));
    if (!(c.solver.tol > 0.0) || !std::isfinite(c.solver.tol)) rd.fail(rd.line("solver", "tol"), "[solver] tol must be finite and > 0");
    if (c.solver.max_iter < 1) rd.fail(rd.line("solver", "max_iter"), "[solver] max_iter must be >= 1");
    const long long seed = rd.integer("solver", "seed", 20240607LL);
    if (seed < 0) rd.fail(rd.line("solver", "seed"), "[solver] seed must be >= 0");
    c.seed = static_cast<unsigned long long>(seed);
    c.probes = static_cast<int>(rd.integer("solver", "probes", 10));
    if (c.probes < 1) rd.fail(rd.line("solver", "probes"), "[solver] probes must be >= 1");

    c.plots = rd.flag("output", "plots", true);
    return c;
}

RunConfig load_run_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    PARCTRL_REQUIRE(in.good(), "cannot read config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    std::string base = std::filesystem::path(path).parent_path().string();

    // a run manifest carries the config it was produced from
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        const Manifest m = read_manifest(path);
        return parse_run_config(m.config_text, path + "#config", m.config_dir);
    }
    return parse_run_config(text, path, base);
}

Mesh build_mesh(const MeshConfig& config)
{
    if (config.dim == 1) return build_interval_mesh(config.cells, 0.0, 1.0, config.gamma1.at(0));
    return build_rect_mesh(config.nx, config.ny, config.gamma1);
}

// ---------------------------------------------------------------------------

namespace {

class FieldBuilder {
public:
    FieldBuilder(const RunConfig& c, const Mesh& mesh, const DiscreteOperators& ops) : c_(c), mesh_(mesh), ops_(ops) {}

    /// Values at every node and time sample, (nodes x N+1).
    Eigen::MatrixXd table(const std::string& text, const std::string& label, int line) const
    {
        try {
            const Profile p = Profile::parse(text, c_.base_dir);
            if (p.is_csv()) return read_field_csv(p.csv_path(), mesh_.num_nodes(), c_.grid);
            Eigen::MatrixXd out(mesh_.num_nodes(), c_.grid.N + 1);
            for (int k = 0; k <= c_.grid.N; ++k)
                for (int i = 0; i < mesh_.num_nodes(); ++i)
                    out(i, k) = p.eval(mesh_.nodes[static_cast<std::size_t>(i)], mesh_.dim, c_.grid.time(k));
            return out;
        } catch (const ValidationError& e) {
            throw ValidationError(c_.origin + ":" + std::to_string(line) + ": " + label + ": " + e.what());
        }
    }

    Eigen::MatrixXd named(const std::string& key) const { return table(c_.data.at(key), "[data] " + key, c_.data_lines.at(key)); }

    static Vector pick(const Eigen::MatrixXd& t, const std::vector<int>& idx, int col)
    {
        Vector v(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t i = 0; i < idx.size(); ++i) v[static_cast<Eigen::Index>(i)] = t(idx[i], col);
        return v;
    }

    Eigen::MatrixXd on_gamma2(const Eigen::MatrixXd& t) const
    {
        Eigen::MatrixXd out(ops_.num_gamma2(), t.cols());
        for (int i = 0; i < ops_.num_gamma2(); ++i) out.row(i) = t.row(ops_.gamma2_nodes[static_cast<std::size_t>(i)]);
        return out;
    }

    /// v_b agrees with b on Gamma1 up to roundoff; snap it so the compatibility check is exact.
    Vector initial(const Eigen::MatrixXd& v_table, const Vector& b, int line, const std::string& label) const
    {
        Vector v = v_table.col(0);
        for (std::size_t i = 0; i < ops_.dirichlet_nodes.size(); ++i) {
            const int node = ops_.dirichlet_nodes[i];
            const double target = b[static_cast<Eigen::Index>(i)];
            if (std::abs(v[node] - target) > 1e-12 * std::max(1.0, std::abs(target)))
                throw ValidationError(c_.origin + ":" + std::to_string(line) + ": " + label +
                                      " must equal b on Gamma1 (node " + std::to_string(node) + ")");
            v[node] = target;
        }
        return v;
    }

private:
    const RunConfig& c_;
    const Mesh& mesh_;
    const DiscreteOperators& ops_;
};

} // namespace

ProblemData build_problem(const RunConfig& config, const Mesh& mesh, const DiscreteOperators& ops)
{
    const FieldBuilder fb(config, mesh, ops);
    ProblemData d;
    d.spec.g = TimeField(fb.named("g"));
    d.spec.z_d = TimeField(fb.named("z_d"));
    d.spec.b = FieldBuilder::pick(fb.named("b"), ops.dirichlet_nodes, 0);
    d.spec.v_b = fb.initial(fb.named("v_b"), d.spec.b, config.data_lines.at("v_b"), "[data] v_b");
    d.spec.M = config.M;
    d.spec.M1 = config.M1;
    d.spec.alpha = config.alpha;
    d.q = BoundaryControl(fb.on_gamma2(fb.named("q")));
    if (config.data.count("q0") != 0) {
        d.q0 = BoundaryControl(fb.on_gamma2(fb.named("q0")));
        d.has_q0 = true;
    }
    if (config.data.count("g_inf") != 0) d.g_inf = fb.named("g_inf").col(0);
    if (config.data.count("q_inf") != 0) d.q_inf = fb.on_gamma2(fb.named("q_inf")).col(0);

    if (config.compare) {
        const CompareConfig& cc = *config.compare;
        ComparisonCase first{cc.lambda1, d.spec.g, d.spec.b, d.spec.v_b};
        ComparisonCase second;
        second.lambda = cc.lambda2;
        second.g = TimeField(fb.table(cc.g2, "[compare] g2", cc.lines.at("g2")));
        second.b = FieldBuilder::pick(fb.table(cc.b2, "[compare] b2", cc.lines.at("b2")), ops.dirichlet_nodes, 0);
        second.v_b = fb.initial(fb.table(cc.v_b2, "[compare] v_b2", cc.lines.at("v_b2")), second.b, cc.lines.at("v_b2"), "[compare] v_b2");
        d.first = std::move(first);
        d.second = std::move(second);
    }
    d.spec.validate(ops, config.grid);
    return d;
}

} // namespace parctrl
