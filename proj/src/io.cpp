#include "parctrl/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "parctrl/error.hpp"

namespace parctrl {

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void CsvTable::add(std::vector<std::string> row)
{
    PARCTRL_REQUIRE(row.size() == header.size(), "csv row width does not match header");
    rows.push_back(std::move(row));
}

std::string CsvTable::str() const
{
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
}

void write_text(const std::string& path, const std::string& text)
{
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    PARCTRL_REQUIRE(in.good(), "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CsvTable time_field_table(const TimeGrid& grid, const Eigen::MatrixXd& values, const std::vector<int>& node_ids)
{
    PARCTRL_REQUIRE(values.cols() == grid.N + 1, "time field does not match grid");
    PARCTRL_REQUIRE(static_cast<std::size_t>(values.rows()) == node_ids.size(), "node id count mismatch");
    CsvTable t;
    t.header = {"step", "time"};
    for (int id : node_ids) t.header.push_back("node_" + std::to_string(id));
    for (int k = 0; k <= grid.N; ++k) {
        std::vector<std::string> row = {std::to_string(k), format_double(grid.time(k))};
        for (Eigen::Index i = 0; i < values.rows(); ++i) row.push_back(format_double(values(i, k)));
        t.add(std::move(row));
    }
    return t;
}

Eigen::MatrixXd read_field_csv(const std::string& path, int num_nodes, const TimeGrid& grid)
{
    std::istringstream in(read_text(path));
    std::string line;
    PARCTRL_REQUIRE(static_cast<bool>(std::getline(in, line)), path + ": empty file");
    {
        std::istringstream hs(line);
        std::string cell;
        std::vector<std::string> header;
        while (std::getline(hs, cell, ',')) header.push_back(cell);
        PARCTRL_REQUIRE(header.size() == static_cast<std::size_t>(num_nodes) + 2 && header[0] == "step" &&
                            header[1] == "time",
                        path + ": header must be step,time,node_0..node_" + std::to_string(num_nodes - 1));
    }
    Eigen::MatrixXd out(num_nodes, grid.N + 1);
    int row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        PARCTRL_REQUIRE(row <= grid.N, path + ": more rows than time samples");
        std::istringstream rs(line);
        std::string cell;
        int col = 0;
        while (std::getline(rs, cell, ',')) {
            if (col >= 2) {
                PARCTRL_REQUIRE(col - 2 < num_nodes, path + ": row " + std::to_string(row + 2) + " too wide");
                char* end = nullptr;
                const double v = std::strtod(cell.c_str(), &end);
                PARCTRL_REQUIRE(end != cell.c_str() && std::isfinite(v),
                                path + ": bad number on line " + std::to_string(row + 2));
                out(col - 2, row) = v;
            }
            ++col;
        }
        PARCTRL_REQUIRE(col == num_nodes + 2, path + ": line " + std::to_string(row + 2) + " has wrong width");
        ++row;
    }
    PARCTRL_REQUIRE(row == grid.N + 1, path + ": expected " + std::to_string(grid.N + 1) + " data rows");
    return out;
}

std::uint64_t fnv1a64(const std::string& bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v)
{
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string mesh_hash(const Mesh& mesh) { return hex64(fnv1a64(to_json(mesh).dump())); }

std::string grid_hash(const TimeGrid& grid)
{
    return hex64(fnv1a64("T=" + format_double(grid.T) + ";N=" + std::to_string(grid.N)));
}

void write_manifest(const std::string& path, const Manifest& m)
{
    nlohmann::ordered_json doc;
    doc["command"] = m.command;
    doc["config_path"] = m.config_path;
    doc["config_dir"] = m.config_dir;
    doc["config"] = m.config_text;
    for (const auto& [k, v] : m.body.items()) doc[k] = v;
    write_text(path, doc.dump(2) + "\n");
}

Manifest read_manifest(const std::string& path)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path + ": not a valid manifest: " + e.what());
    }
    PARCTRL_REQUIRE(doc.is_object() && doc.contains("config") && doc["config"].is_string(),
                    path + ": manifest has no config echo");
    Manifest m;
    m.config_text = doc["config"].get<std::string>();
    m.command = doc.value("command", "");
    m.config_path = doc.value("config_path", "");
    m.config_dir = doc.value("config_dir", "");
    for (const auto& [k, v] : doc.items())
        if (k != "config" && k != "command" && k != "config_path" && k != "config_dir") m.body[k] = v;
    return m;
}

std::string svg_line_plot(const std::string& title, const std::string& x_label, const std::vector<double>& x,
                          const std::vector<PlotSeries>& series, bool log_x, bool log_y)
{
    const double W = 640, H = 420, L = 70, R = 150, T = 40, B = 50;
    auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
    auto usable = [&](double xv, double yv) {
        return std::isfinite(xv) && std::isfinite(yv) && (!log_x || xv > 0) && (!log_y || yv > 0);
    };
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series)
        for (std::size_t i = 0; i < x.size() && i < s.y.size(); ++i) {
            if (!usable(x[i], s.y[i])) continue;
            x0 = std::min(x0, tx(x[i]));
            x1 = std::max(x1, tx(x[i]));
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    if (!(x0 <= x1)) x0 = 0, x1 = 1;
    if (!(y0 <= y1)) y0 = 0, y1 = 1;
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    auto px = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double v) { return H - B - (ty(v) - y0) / (y1 - y0) * (H - T - B); };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
      << title << "</text>\n";
    o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = x0 + (x1 - x0) * i / 4.0, fy = y0 + (y1 - y0) * i / 4.0;
        const double gx = L + (W - L - R) * i / 4.0, gy = H - B - (H - T - B) * i / 4.0;
        char bx[32], by[32];
        std::snprintf(bx, sizeof bx, "%.3g", fx);
        std::snprintf(by, sizeof by, "%.3g", fy);
        o << "<text x=\"" << gx << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          << "font-size=\"11\">" << (log_x ? "1e" + std::string(bx) : std::string(bx)) << "</text>\n";
        o << "<text x=\"" << L - 6 << "\" y=\"" << gy + 4 << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
          << "font-size=\"11\">" << (log_y ? "1e" + std::string(by) : std::string(by)) << "</text>\n";
    }
    o << "<text x=\"" << L + (W - L - R) / 2 << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = colors[s % 6];
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < x.size() && i < series[s].y.size(); ++i)
            if (usable(x[i], series[s].y[i])) o << px(x[i]) << ',' << py(series[s].y[i]) << ' ';
        o << "\"/>\n";
        const double ly = T + 16 + 18.0 * static_cast<double>(s);
        o << "<line x1=\"" << W - R + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 30 << "\" y2=\"" << ly
          << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << W - R + 36 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" font-size=\"12\">"
          << series[s].name << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

} // namespace parctrl
