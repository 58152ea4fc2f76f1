#include "harmony/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <variant>

#include "harmony/scene.hpp"

namespace harmony {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s(buf);
    if (s == "-0.000") s = "0.000";
    return s;
}

class Canvas {
public:
    Canvas(const Box& bounds, double scale) : bounds_(bounds), scale_(scale) {}

    [[nodiscard]] std::string x(double wx) const { return num((wx - bounds_.min.x) * scale_); }
    [[nodiscard]] std::string y(double wy) const { return num((bounds_.max.y - wy) * scale_); }
    [[nodiscard]] std::string len(double l) const { return num(l * scale_); }
    [[nodiscard]] std::string point(Point2 p) const { return x(p.x) + "," + y(p.y); }
    [[nodiscard]] double width() const { return (bounds_.max.x - bounds_.min.x) * scale_; }
    [[nodiscard]] double height() const { return (bounds_.max.y - bounds_.min.y) * scale_; }

    [[nodiscard]] std::string rect(double x0, double y0, double x1, double y1) const {
        return "x=\"" + x(x0) + "\" y=\"" + y(y1) + "\" width=\"" + len(x1 - x0) + "\" height=\"" + len(y1 - y0) +
               "\"";
    }

private:
    Box bounds_;
    double scale_;
};

void obstacle_element(std::string& out, const Canvas& c, const Obstacle& obstacle) {
    if (const auto* circle = std::get_if<Circle>(&obstacle)) {
        out += "<circle class=\"obstacle\" cx=\"" + c.x(circle->center.x) + "\" cy=\"" + c.y(circle->center.y) +
               "\" r=\"" + c.len(circle->radius) + "\"/>\n";
    } else if (const auto* box = std::get_if<Box>(&obstacle)) {
        out += "<rect class=\"obstacle\" " + c.rect(box->min.x, box->min.y, box->max.x, box->max.y) + "/>\n";
    } else if (const auto* poly = std::get_if<Polygon>(&obstacle)) {
        out += "<polygon class=\"obstacle\" points=\"";
        for (std::size_t i = 0; i < poly->vertices.size(); ++i) {
            if (i) out += ' ';
            out += c.point(poly->vertices[i]);
        }
        out += "\"/>\n";
    }
}

void robot_element(std::string& out, const Canvas& c, const RobotModel& model, const Configuration& q,
                   const char* cls) {
    const FkResult fk = forward_kinematics(model, q);
    out += std::string("<g class=\"") + cls + "\">\n";
    out += "<circle cx=\"" + c.x(fk.body.base.center.x) + "\" cy=\"" + c.y(fk.body.base.center.y) + "\" r=\"" +
           c.len(fk.body.base.radius) + "\"/>\n";
    if (!fk.body.links.empty()) {
        out += "<polyline points=\"" + c.point(fk.body.links.front().a);
        for (const Capsule& link : fk.body.links) out += ' ' + c.point(link.b);
        out += "\" stroke-width=\"" + c.len(2.0 * model.link_radius) + "\"/>\n";
    }
    out += "</g>\n";
}

}  // namespace

std::vector<std::int64_t> sample_heatmap(const BaseGrid& grid, const std::vector<Configuration>& samples) {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(grid.nx) * static_cast<std::size_t>(grid.ny), 0);
    for (const Configuration& q : samples) {
        const CellCoord cell = grid.coord(grid.cell_of(q.base_x, q.base_y, 0.0));
        ++counts[static_cast<std::size_t>(cell.ix) * static_cast<std::size_t>(grid.ny) + static_cast<std::size_t>(cell.iy)];
    }
    return counts;
}

std::vector<std::size_t> snapshot_indices(const std::vector<Configuration>& path, double spacing) {
    std::vector<std::size_t> out;
    if (path.empty()) return out;
    out.push_back(0);
    double since = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) {
        since += std::hypot(path[i].base_x - path[i - 1].base_x, path[i].base_y - path[i - 1].base_y);
        if (since >= spacing) {
            out.push_back(i);
            since = 0.0;
        }
    }
    if (out.back() != path.size() - 1) out.push_back(path.size() - 1);
    return out;
}

std::string render_svg(const Scene& scene, const SvgLayers& layers) {
    if (!(layers.scale > 0.0) || !(layers.snapshot_spacing > 0.0))
        throw std::invalid_argument("svg scale and snapshot spacing must be positive");
    const Box& b = scene.bounds();
    const Canvas c(b, layers.scale);
    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(c.width()) + "\" height=\"" + num(c.height()) +
           "\" viewBox=\"0 0 " + num(c.width()) + ' ' + num(c.height()) + "\">\n";
    out += "<style>.bounds{fill:#fff;stroke:#000;stroke-width:2}.obstacle{fill:#555}"
           ".rm{fill:#e67e22;fill-opacity:0.35}.heat{fill:#2980b9}.ridge{fill:none;stroke:#8e44ad;stroke-width:1}"
           ".path{fill:none;stroke:#c0392b;stroke-width:2}.snapshot circle,.start circle,.goal circle{fill:none;"
           "stroke:#27ae60}.snapshot polyline,.start polyline,.goal polyline{fill:none;stroke:#27ae60;"
           "stroke-linecap:round;stroke-opacity:0.6}.target{fill:#c0392b}</style>\n";
    out += "<rect class=\"bounds\" " + c.rect(b.min.x, b.min.y, b.max.x, b.max.y) + "/>\n";

    if (layers.samples && layers.regions) {
        const BaseGrid& grid = layers.regions->grid;
        const auto counts = sample_heatmap(grid, *layers.samples);
        const std::int64_t peak = counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
        out += "<g id=\"heatmap\">\n";
        for (int ix = 0; ix < grid.nx; ++ix) {
            for (int iy = 0; iy < grid.ny; ++iy) {
                const std::int64_t n = counts[static_cast<std::size_t>(ix) * static_cast<std::size_t>(grid.ny) +
                                              static_cast<std::size_t>(iy)];
                if (n == 0) continue;
                const double x0 = grid.origin.x + ix * grid.dx;
                const double y0 = grid.origin.y + iy * grid.dy;
                out += "<rect class=\"heat\" " + c.rect(x0, y0, x0 + grid.dx, y0 + grid.dy) + " fill-opacity=\"" +
                       num(0.1 + 0.8 * static_cast<double>(n) / static_cast<double>(peak)) + "\" data-count=\"" +
                       std::to_string(n) + "\"/>\n";
            }
        }
        out += "</g>\n";
    }

    if (layers.regions) {
        const BaseGrid& grid = layers.regions->grid;
        out += "<g id=\"regions\">\n";
        for (int ix = 0; ix < grid.nx; ++ix) {
            for (int iy = 0; iy < grid.ny; ++iy) {
                int hits = 0;
                for (int it = 0; it < grid.ntheta; ++it)
                    if (grid.labels[grid.index({ix, iy, it})] == Region::manipulation) ++hits;
                if (hits == 0) continue;
                const double x0 = grid.origin.x + ix * grid.dx;
                const double y0 = grid.origin.y + iy * grid.dy;
                out += "<rect class=\"rm\" " + c.rect(x0, y0, x0 + grid.dx, y0 + grid.dy) + " data-headings=\"" +
                       std::to_string(hits) + "\"/>\n";
            }
        }
        out += "</g>\n";

        const GvgGraph& gvg = layers.regions->gvg;
        if (!gvg.ridge.empty()) {
            out += "<path class=\"ridge\" d=\"";
            for (std::size_t idx : gvg.ridge) {
                const int ix = static_cast<int>(idx / static_cast<std::size_t>(gvg.ny));
                const int iy = static_cast<int>(idx % static_cast<std::size_t>(gvg.ny));
                const Point2 p = gvg.center(idx);
                bool linked = false;
                for (const auto& [ox, oy] : {std::pair{1, -1}, std::pair{1, 0}, std::pair{1, 1}, std::pair{0, 1}}) {
                    const int jx = ix + ox;
                    const int jy = iy + oy;
                    if (jx < 0 || jy < 0 || jx >= gvg.nx || jy >= gvg.ny) continue;
                    const std::size_t j = gvg.index(jx, jy);
                    if (!std::binary_search(gvg.ridge.begin(), gvg.ridge.end(), j)) continue;
                    out += "M" + c.point(p) + "L" + c.point(gvg.center(j));
                    linked = true;
                }
                if (!linked) out += "M" + c.point(p) + "h0";
            }
            out += "\"/>\n";
        }
    }

    out += "<g id=\"obstacles\">\n";
    for (const Obstacle& o : scene.obstacles()) obstacle_element(out, c, o);
    out += "</g>\n";

    const EndEffectorPose& goal = scene.goal_pose();
    const double arrow = 0.15;
    out += "<g id=\"goal\"><circle class=\"target\" cx=\"" + c.x(goal.x) + "\" cy=\"" + c.y(goal.y) + "\" r=\"" +
           c.len(0.03) + "\"/><line x1=\"" + c.x(goal.x) + "\" y1=\"" + c.y(goal.y) + "\" x2=\"" +
           c.x(goal.x + arrow * std::cos(goal.phi)) + "\" y2=\"" + c.y(goal.y + arrow * std::sin(goal.phi)) +
           "\" stroke=\"#c0392b\" stroke-width=\"2\"/></g>\n";
    robot_element(out, c, scene.robot(), scene.start(), "start");

    if (layers.path && !layers.path->empty()) {
        const auto& path = *layers.path;
        out += "<polyline class=\"path\" points=\"";
        for (std::size_t i = 0; i < path.size(); ++i) {
            if (i) out += ' ';
            out += c.point({path[i].base_x, path[i].base_y});
        }
        out += "\"/>\n<g id=\"snapshots\">\n";
        for (std::size_t i : snapshot_indices(path, layers.snapshot_spacing))
            robot_element(out, c, scene.robot(), path[i], "snapshot");
        out += "</g>\n";
    }
    out += "</svg>\n";
    return out;
}

void write_svg(const Scene& scene, const SvgLayers& layers, const std::filesystem::path& path) {
    const std::string text = render_svg(scene, layers);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace harmony
