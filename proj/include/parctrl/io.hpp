#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "parctrl/fields.hpp"
#include "parctrl/mesh.hpp"

namespace parctrl {

/// %.17g: shortest form that round-trips any double.
std::string format_double(double v);

/// Header plus string cells; written with '\n' line ends.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row);
    std::string str() const;
};

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

/// `step,time,node_<id>...`, one row per sample.
CsvTable time_field_table(const TimeGrid& grid, const Eigen::MatrixXd& values, const std::vector<int>& node_ids);

/// Reads a `step,time,node_0..` table covering every mesh node; returns (nodes x N+1).
Eigen::MatrixXd read_field_csv(const std::string& path, int num_nodes, const TimeGrid& grid);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);
std::string mesh_hash(const Mesh& mesh);
std::string grid_hash(const TimeGrid& grid);

struct Manifest {
    std::string command;
    std::string config_text;
    std::string config_path;
    std::string config_dir;
    nlohmann::json body; // everything else, written as-is
};

void write_manifest(const std::string& path, const Manifest& manifest);
Manifest read_manifest(const std::string& path);

struct PlotSeries {
    std::string name;
    std::vector<double> y;
};

/// Static SVG line plot. Non-positive values are dropped on log axes.
std::string svg_line_plot(const std::string& title, const std::string& x_label, const std::vector<double>& x,
                          const std::vector<PlotSeries>& series, bool log_x, bool log_y);

} // namespace parctrl
