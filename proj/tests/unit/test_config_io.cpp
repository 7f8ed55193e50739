#include <gtest/gtest.h>

#include <filesystem>

#include "parctrl/config.hpp"
#include "parctrl/error.hpp"
#include "parctrl/io.hpp"

using namespace parctrl;

namespace {

const char* kSmall = R"([mesh]
dim = 1
cells = 8

[time]
T = 1
N = 4

[data]
g = constant(1)
b = constant(0.5)
q0 = constant(1)
)";

std::string error_of(const std::string& text)
{
    try {
        parse_run_config(text, "test.cfg", "");
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

std::filesystem::path scratch(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("parctrl_cfg_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST(Config, ParsesDefaults)
{
    const RunConfig c = parse_run_config(kSmall, "test.cfg", "");
    EXPECT_EQ(c.mesh.dim, 1);
    EXPECT_EQ(c.mesh.cells, 8);
    EXPECT_EQ(c.grid.N, 4);
    EXPECT_TRUE(c.alpha.is_dirichlet());
    EXPECT_EQ(c.data.at("v_b"), "constant(0.5)");
    EXPECT_EQ(c.alphas, (std::vector<double>{10, 100, 1000, 10000}));
    EXPECT_EQ(c.variants.size(), 4u);
    EXPECT_DOUBLE_EQ(c.solver.tol, 1e-10);
}

TEST(Config, MissingKeyIsNamed)
{
    const std::string err = error_of("[mesh]\ndim = 1\n[time]\nT = 1\nN = 2\n");
    EXPECT_NE(err.find("missing required key 'cells'"), std::string::npos) << err;
    EXPECT_NE(err.find("test.cfg:1:"), std::string::npos) << err;
    EXPECT_NE(error_of("[mesh]\ndim = 2\nnx = 4\n[time]\nT = 1\nN = 2\n").find("'ny'"), std::string::npos);
}

TEST(Config, DiagnosticsCiteLines)
{
    EXPECT_NE(error_of("[mesh]\ndim = 1\ncells = eight\n").find("test.cfg:3:"), std::string::npos);
    EXPECT_NE(error_of("[mesh]\ndim = 1\ncells = 4\nbogus = 1\n").find("test.cfg:4: unknown key 'bogus'"),
              std::string::npos);
    EXPECT_NE(error_of("[nonsense]\n").find("test.cfg:1: unknown section"), std::string::npos);
    EXPECT_NE(error_of("[mesh]\ndim 1\n").find("test.cfg:2: expected 'key = value'"), std::string::npos);
    const std::string bad_profile = std::string(kSmall) + "z_d = wobble(3)\n";
    const std::string err = error_of(bad_profile);
    EXPECT_NE(err.find("test.cfg:13:"), std::string::npos) << err;
    EXPECT_NE(err.find("unknown profile 'wobble'"), std::string::npos) << err;
}

TEST(Config, RejectsNonPositiveTolerances)
{
    EXPECT_NE(error_of(std::string(kSmall) + "[solver]\ntol = 0\n").find("tol"), std::string::npos);
    EXPECT_NE(error_of(std::string(kSmall) + "[model]\nalphas = 10, 5\n").find("strictly increasing"),
              std::string::npos);
}

TEST(Config, ForcingNeedsLimits)
{
    EXPECT_NE(error_of(std::string(kSmall) + "[model]\ndecay = forcing\n").find("'g_inf'"), std::string::npos);
}

TEST(Profile, Registry)
{
    const std::array<double, 2> x = {0.5, 0.25};
    EXPECT_DOUBLE_EQ(Profile::parse("constant(2)", "").eval(x, 1, 0.0), 2.0);
    EXPECT_NEAR(Profile::parse("sine-bump(3)", "").eval(x, 1, 0.0), 3.0, 1e-15);
    EXPECT_NEAR(Profile::parse("sine-bump(1)", "").eval(x, 2, 0.0), std::sin(M_PI / 4), 1e-15);
    EXPECT_NEAR(Profile::parse("exp-decay(2, 0.5)", "").eval(x, 1, 2.0), 2.0 * std::exp(-1.0), 1e-15);
    EXPECT_DOUBLE_EQ(Profile::parse("ramp(1, 2)", "").eval(x, 1, 0.0), 2.0);
    EXPECT_NEAR(Profile::parse("constant(1) + exp-decay(1e+0, 1)", "").eval(x, 1, 0.0), 2.0, 1e-15);
    EXPECT_THROW(Profile::parse("ramp(1)", ""), ValidationError);
    EXPECT_THROW(Profile::parse("constant(x)", ""), ValidationError);
    EXPECT_THROW(Profile::parse("csv:/definitely/not/here.csv", ""), ValidationError);
}

TEST(Config, CsvProfileRoundTrip)
{
    const auto dir = scratch("csv");
    const TimeGrid grid{1.0, 4};
    Eigen::MatrixXd values(9, 5);
    for (int i = 0; i < 9; ++i)
        for (int k = 0; k < 5; ++k) values(i, k) = 0.1 * i + k;
    std::vector<int> ids(9);
    for (int i = 0; i < 9; ++i) ids[static_cast<std::size_t>(i)] = i;
    write_text((dir / "z.csv").string(), time_field_table(grid, values, ids).str());

    const std::string text = std::string(kSmall) + "z_d = csv:z.csv\n";
    const RunConfig c = parse_run_config(text, "x.cfg", dir.string());
    const Mesh mesh = build_mesh(c.mesh);
    const DiscreteOperators ops = assemble(mesh);
    const ProblemData d = build_problem(c, mesh, ops);
    EXPECT_EQ(d.spec.z_d.values, values);
    EXPECT_TRUE(d.has_q0);
    EXPECT_DOUBLE_EQ(d.spec.b[0], 0.5);
    EXPECT_DOUBLE_EQ(d.spec.v_b[3], 0.5);
}

TEST(Config, IncompatibleInitialDatumIsRejected)
{
    const std::string text = std::string(kSmall) + "v_b = constant(0.7)\n";
    const RunConfig c = parse_run_config(text, "x.cfg", "");
    const Mesh mesh = build_mesh(c.mesh);
    const DiscreteOperators ops = assemble(mesh);
    try {
        build_problem(c, mesh, ops);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("x.cfg:13:"), std::string::npos) << e.what();
    }
}

TEST(Io, FormatAndCsv)
{
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(2.0), "2");
    CsvTable t;
    t.header = {"a", "b"};
    t.add({"1", "2"});
    EXPECT_EQ(t.str(), "a,b\n1,2\n");
    EXPECT_THROW(t.add({"1"}), ValidationError);
}

TEST(Io, Fnv1aKnownValues)
{
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
    EXPECT_EQ(grid_hash({1.0, 4}), grid_hash({1.0, 4}));
    EXPECT_NE(grid_hash({1.0, 4}), grid_hash({1.0, 5}));
}

TEST(Io, ManifestRoundTrip)
{
    const auto dir = scratch("manifest");
    Manifest m;
    m.command = "solve";
    m.config_text = kSmall;
    m.config_dir = "/some/dir";
    m.body["answer"] = 42;
    write_manifest((dir / "manifest.json").string(), m);
    const Manifest back = read_manifest((dir / "manifest.json").string());
    EXPECT_EQ(back.config_text, m.config_text);
    EXPECT_EQ(back.command, "solve");
    EXPECT_EQ(back.config_dir, "/some/dir");
    EXPECT_EQ(back.body["answer"], 42);
    // a manifest loads as a config
    const RunConfig c = load_run_config((dir / "manifest.json").string());
    EXPECT_EQ(c.text, m.config_text);
    EXPECT_EQ(c.base_dir, "/some/dir");
}

TEST(Io, SvgIsWellFormed)
{
    const std::string svg = svg_line_plot("t", "x", {1, 10, 100}, {{"a", {1, 0.1, 0.01}}, {"b", {0, 1, 2}}}, true, true);
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    EXPECT_NE(svg.find("polyline"), std::string::npos);
}
