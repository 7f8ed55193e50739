#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

namespace parctrl {

enum class BoundaryTag { Gamma1, Gamma2 };

enum class Side { Left, Right, Bottom, Top };

struct Facet {
    std::vector<int> nodes; // one node in 1D, two in 2D
    BoundaryTag tag;
};

/// Simplicial mesh of an interval or the unit square with tagged boundary facets.
struct Mesh {
    int dim = 1;
    std::vector<std::array<double, 2>> nodes; // second coordinate is 0 in 1D
    std::vector<std::vector<int>> elements;   // 2 nodes (interval) or 3 (triangle)
    std::vector<Facet> facets;

    int num_nodes() const { return static_cast<int>(nodes.size()); }
    int num_elements() const { return static_cast<int>(elements.size()); }

    /// Sorted, de-duplicated node indices touched by facets carrying `tag`.
    std::vector<int> tagged_nodes(BoundaryTag tag) const;
    /// Hausdorff measure of the tagged boundary portion (point count in 1D).
    double boundary_measure(BoundaryTag tag) const;
    double domain_measure() const;

    /// Throws ValidationError when |Gamma1| or |Gamma2| vanishes or indices are out of range.
    void validate() const;
};

Mesh build_interval_mesh(int n_cells, double left, double right, Side gamma1_side);

/// Unit square, nx x ny cells, each split into two right triangles.
Mesh build_rect_mesh(int nx, int ny, const std::vector<Side>& gamma1_edges);

nlohmann::json to_json(const Mesh& mesh);
Mesh mesh_from_json(const nlohmann::json& doc);

const char* to_string(Side side);
Side parse_side(const std::string& name); // "left", "right", "bottom", "top"
const char* to_string(BoundaryTag tag);

} // namespace parctrl
