#include "kinoforge/field_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "kinoforge/svg.hpp"

namespace kinoforge {

static_assert(std::endian::native == std::endian::little, "field files are written in host order");

void FieldGrid::resize(int w, int h) {
    width = w;
    height = h;
    cost_to_go = GridD::Constant(h, w, kInf);
    end_x = GridD::Zero(h, w);
    end_y = GridD::Zero(h, w);
    valid = Grid<std::uint8_t>::Zero(h, w);
}

std::optional<Cell> FieldGrid::cell_of(const Point& p) const {
    const double fx = std::floor(p.x() / cell_size);
    const double fy = std::floor(p.y() / cell_size);
    if (!(fx >= 0 && fy >= 0 && fx < width && fy < height)) return std::nullopt;
    return Cell(static_cast<int>(fx), static_cast<int>(fy));
}

double FieldGrid::cost_at(const Point& p) const {
    const auto c = cell_of(p);
    return c ? cost_to_go(c->y(), c->x()) : kInf;
}

double FieldGrid::interpolated_cost(const Point& p) const {
    const double own = cost_at(p);
    if (!std::isfinite(own)) return own;
    const double fx = std::clamp(p.x() / cell_size - 0.5, 0.0, width - 1.0);
    const double fy = std::clamp(p.y() / cell_size - 0.5, 0.0, height - 1.0);
    const int x0 = std::min(static_cast<int>(fx), width - 1), y0 = std::min(static_cast<int>(fy), height - 1);
    const int x1 = std::min(x0 + 1, width - 1), y1 = std::min(y0 + 1, height - 1);
    const double tx = fx - x0, ty = fy - y0;
    const double c00 = cost_to_go(y0, x0), c10 = cost_to_go(y0, x1), c01 = cost_to_go(y1, x0), c11 = cost_to_go(y1, x1);
    if (!std::isfinite(c00 + c10 + c01 + c11)) return own;
    return (1 - ty) * ((1 - tx) * c00 + tx * c10) + ty * ((1 - tx) * c01 + tx * c11);
}

bool FieldGrid::operator==(const FieldGrid& o) const {
    auto same = [](const GridD& a, const GridD& b) {
        if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
        return std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
    };
    return kind == o.kind && width == o.width && height == o.height && cell_size == o.cell_size && goal == o.goal &&
           goal_cell == o.goal_cell && same(cost_to_go, o.cost_to_go) && same(end_x, o.end_x) &&
           same(end_y, o.end_y) && (valid == o.valid).all();
}

namespace {

constexpr char kMagic[8] = {'K', 'F', 'F', 'I', 'E', 'L', 'D', '1'};

template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v{};
    if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw ParseError("field file truncated");
    return v;
}

}  // namespace

void write_field(std::ostream& os, const FieldGrid& grid) {
    os.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(grid.kind));
    put<std::int32_t>(os, grid.width);
    put<std::int32_t>(os, grid.height);
    put<std::int32_t>(os, grid.goal_cell.x());
    put<std::int32_t>(os, grid.goal_cell.y());
    put<double>(os, grid.goal.x());
    put<double>(os, grid.goal.y());
    put<double>(os, grid.cell_size);
    for (int y = 0; y < grid.height; ++y)
        for (int x = 0; x < grid.width; ++x) {
            put<double>(os, grid.cost_to_go(y, x));
            put<double>(os, grid.end_x(y, x));
            put<double>(os, grid.end_y(y, x));
            put<std::uint8_t>(os, grid.valid(y, x));
        }
}

FieldGrid read_field(std::istream& is) {
    char magic[8];
    if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw ParseError("not a field file (bad magic)");
    FieldGrid g;
    const auto kind = get<std::uint32_t>(is);
    if (kind > 1) throw ParseError(fmt::format("unknown field kind {}", kind));
    g.kind = static_cast<FieldGrid::Kind>(kind);
    const int w = get<std::int32_t>(is);
    const int h = get<std::int32_t>(is);
    if (w < 1 || h < 1) throw ParseError("field file has empty dimensions");
    g.resize(w, h);
    g.goal_cell.x() = get<std::int32_t>(is);
    g.goal_cell.y() = get<std::int32_t>(is);
    g.goal.x() = get<double>(is);
    g.goal.y() = get<double>(is);
    g.cell_size = get<double>(is);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            g.cost_to_go(y, x) = get<double>(is);
            g.end_x(y, x) = get<double>(is);
            g.end_y(y, x) = get<double>(is);
            g.valid(y, x) = get<std::uint8_t>(is);
        }
    return g;
}

void save_field(const std::string& path, const FieldGrid& grid) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidInput(fmt::format("cannot write '{}'", path));
    write_field(os, grid);
}

FieldGrid load_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ParseError(fmt::format("cannot open '{}'", path));
    return read_field(is);
}

std::string medial_field_svg(const Workspace& ws, const MedialAxis& axis, const GoalField& field, int stride) {
    const GridMap& map = ws.map();
    const double cs = map.cell_size();
    svg::Document doc(map.width() * cs, map.height() * cs, 8.0 / cs);
    doc.rect(0, 0, map.width() * cs, map.height() * cs, "white");
    for (int y = 0; y < map.height(); ++y)
        for (int x = 0; x < map.width(); ++x) {
            if (map.is_obstacle(x, y))
                doc.rect(x * cs, y * cs, cs, cs, "#222222");
            else if (axis.contains(x, y))
                doc.rect(x * cs, y * cs, cs, cs, "#e03030");
        }
    const FieldGrid& g = field.grid();
    for (int y = 0; y < map.height(); y += stride)
        for (int x = 0; x < map.width(); x += stride) {
            if (!g.valid(y, x)) continue;
            doc.arrow(map.cell_center(x, y), g.endpoint(x, y), "#3060c0", 0.08 * cs);
        }
    doc.circle(g.goal.x(), g.goal.y(), 0.8 * cs, "#20a040");
    return doc.str();
}

std::string cost_field_svg(const CostMap& costs, const FieldGrid& field, int stride) {
    const double cs = costs.cell_size();
    svg::Document doc(costs.width() * cs, costs.height() * cs, 8.0 / cs);
    for (int y = 0; y < costs.height(); ++y)
        for (int x = 0; x < costs.width(); ++x) {
            const int shade = static_cast<int>(std::lround(255.0 * (1.0 - costs.at(x, y))));
            doc.rect(x * cs, y * cs, cs, cs, fmt::format("rgb({0},{0},{0})", shade));
        }
    for (int y = 0; y < costs.height(); y += stride)
        for (int x = 0; x < costs.width(); x += stride) {
            if (!field.valid(y, x)) continue;
            doc.arrow(costs.cell_center(x, y), field.endpoint(x, y), "#3060c0", 0.08 * cs);
        }
    doc.circle(field.goal.x(), field.goal.y(), 0.8 * cs, "#20a040");
    return doc.str();
}

}  // namespace kinoforge
