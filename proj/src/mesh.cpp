#include "parctrl/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "parctrl/error.hpp"

namespace parctrl {

namespace {

double triangle_area(const Mesh& mesh, const std::vector<int>& tri)
{
    const auto& a = mesh.nodes[tri[0]];
    const auto& b = mesh.nodes[tri[1]];
    const auto& c = mesh.nodes[tri[2]];
    return 0.5 * std::abs((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

double facet_measure(const Mesh& mesh, const Facet& f)
{
    if (mesh.dim == 1) return 1.0;
    const auto& a = mesh.nodes[f.nodes[0]];
    const auto& b = mesh.nodes[f.nodes[1]];
    return std::hypot(b[0] - a[0], b[1] - a[1]);
}

} // namespace

Side parse_side(const std::string& s)
{
    if (s == "left") return Side::Left;
    if (s == "right") return Side::Right;
    if (s == "bottom") return Side::Bottom;
    if (s == "top") return Side::Top;
    throw ValidationError("unknown side '" + s + "'");
}

const char* to_string(Side side)
{
    switch (side) {
    case Side::Left: return "left";
    case Side::Right: return "right";
    case Side::Bottom: return "bottom";
    case Side::Top: return "top";
    }
    return "?";
}

const char* to_string(BoundaryTag tag)
{
    return tag == BoundaryTag::Gamma1 ? "gamma1" : "gamma2";
}

std::vector<int> Mesh::tagged_nodes(BoundaryTag tag) const
{
    std::set<int> out;
    for (const auto& f : facets)
        if (f.tag == tag) out.insert(f.nodes.begin(), f.nodes.end());
    return {out.begin(), out.end()};
}

double Mesh::boundary_measure(BoundaryTag tag) const
{
    double total = 0.0;
    for (const auto& f : facets)
        if (f.tag == tag) total += facet_measure(*this, f);
    return total;
}

double Mesh::domain_measure() const
{
    double total = 0.0;
    for (const auto& e : elements) {
        if (dim == 1)
            total += std::abs(nodes[e[1]][0] - nodes[e[0]][0]);
        else
            total += triangle_area(*this, e);
    }
    return total;
}

void Mesh::validate() const
{
    PARCTRL_REQUIRE(dim == 1 || dim == 2, "mesh dimension must be 1 or 2");
    const int n = num_nodes();
    const std::size_t per_element = dim == 1 ? 2 : 3;
    for (const auto& e : elements) {
        PARCTRL_REQUIRE(e.size() == per_element, "element has wrong number of nodes");
        for (int v : e) PARCTRL_REQUIRE(v >= 0 && v < n, "element node index out of range");
    }
    for (const auto& f : facets) {
        PARCTRL_REQUIRE(f.nodes.size() == static_cast<std::size_t>(dim), "facet has wrong number of nodes");
        for (int v : f.nodes) PARCTRL_REQUIRE(v >= 0 && v < n, "facet node index out of range");
    }
    PARCTRL_REQUIRE(boundary_measure(BoundaryTag::Gamma1) > 0.0, "|Gamma1| must be positive");
    PARCTRL_REQUIRE(boundary_measure(BoundaryTag::Gamma2) > 0.0, "|Gamma2| must be positive");
}

Mesh build_interval_mesh(int n_cells, double left, double right, Side gamma1_side)
{
    PARCTRL_REQUIRE(n_cells >= 2, "build_interval_mesh: n_cells must be >= 2, got " + std::to_string(n_cells));
    PARCTRL_REQUIRE(left < right, "build_interval_mesh: degenerate interval");
    PARCTRL_REQUIRE(gamma1_side == Side::Left || gamma1_side == Side::Right,
                    "build_interval_mesh: gamma1 side must be left or right");

    Mesh mesh;
    mesh.dim = 1;
    const double h = (right - left) / n_cells;
    for (int i = 0; i <= n_cells; ++i) {
        // exact endpoints, no accumulated drift
        const double x = i == n_cells ? right : left + i * h;
        mesh.nodes.push_back({x, 0.0});
    }
    for (int i = 0; i < n_cells; ++i) mesh.elements.push_back({i, i + 1});
    const bool g1_left = gamma1_side == Side::Left;
    mesh.facets.push_back({{0}, g1_left ? BoundaryTag::Gamma1 : BoundaryTag::Gamma2});
    mesh.facets.push_back({{n_cells}, g1_left ? BoundaryTag::Gamma2 : BoundaryTag::Gamma1});
    mesh.validate();
    return mesh;
}

Mesh build_rect_mesh(int nx, int ny, const std::vector<Side>& gamma1_edges)
{
    PARCTRL_REQUIRE(nx >= 2 && ny >= 2, "build_rect_mesh: nx and ny must be >= 2");
    const std::set<Side> g1(gamma1_edges.begin(), gamma1_edges.end());
    PARCTRL_REQUIRE(!g1.empty(), "build_rect_mesh: gamma1 edge set is empty (|Gamma1| = 0)");
    PARCTRL_REQUIRE(g1.size() < 4, "build_rect_mesh: all four edges in gamma1 (|Gamma2| = 0)");

    Mesh mesh;
    mesh.dim = 2;
    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            mesh.nodes.push_back({static_cast<double>(i) / nx, static_cast<double>(j) / ny});

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            // split along a-c; the right angles sit at b and d
            mesh.elements.push_back({a, b, c});
            mesh.elements.push_back({a, c, d});
        }
    }

    auto tag_of = [&g1](Side s) { return g1.count(s) ? BoundaryTag::Gamma1 : BoundaryTag::Gamma2; };
    for (int i = 0; i < nx; ++i) mesh.facets.push_back({{id(i, 0), id(i + 1, 0)}, tag_of(Side::Bottom)});
    for (int j = 0; j < ny; ++j) mesh.facets.push_back({{id(nx, j), id(nx, j + 1)}, tag_of(Side::Right)});
    for (int i = nx; i > 0; --i) mesh.facets.push_back({{id(i, ny), id(i - 1, ny)}, tag_of(Side::Top)});
    for (int j = ny; j > 0; --j) mesh.facets.push_back({{id(0, j), id(0, j - 1)}, tag_of(Side::Left)});
    mesh.validate();
    return mesh;
}

nlohmann::json to_json(const Mesh& mesh)
{
    nlohmann::json doc;
    doc["dim"] = mesh.dim;
    doc["nodes"] = nlohmann::json::array();
    for (const auto& p : mesh.nodes) {
        if (mesh.dim == 1)
            doc["nodes"].push_back({p[0]});
        else
            doc["nodes"].push_back({p[0], p[1]});
    }
    doc["elements"] = mesh.elements;
    doc["facets"] = nlohmann::json::array();
    for (const auto& f : mesh.facets)
        doc["facets"].push_back({{"nodes", f.nodes}, {"tag", to_string(f.tag)}});
    return doc;
}

Mesh mesh_from_json(const nlohmann::json& doc)
{
    Mesh mesh;
    try {
        mesh.dim = doc.at("dim").get<int>();
        for (const auto& p : doc.at("nodes")) {
            std::array<double, 2> x{0.0, 0.0};
            for (std::size_t i = 0; i < p.size() && i < 2; ++i) x[i] = p[i].get<double>();
            mesh.nodes.push_back(x);
        }
        mesh.elements = doc.at("elements").get<std::vector<std::vector<int>>>();
        for (const auto& f : doc.at("facets")) {
            const auto tag = f.at("tag").get<std::string>();
            PARCTRL_REQUIRE(tag == "gamma1" || tag == "gamma2", "unknown facet tag '" + tag + "'");
            mesh.facets.push_back(
                {f.at("nodes").get<std::vector<int>>(), tag == "gamma1" ? BoundaryTag::Gamma1 : BoundaryTag::Gamma2});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed mesh document: ") + e.what());
    }
    mesh.validate();
    return mesh;
}

} // namespace parctrl
