#include "kinoforge/geom_env.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace kinoforge {

GridMap::GridMap(int width, int height, double cell_size)
    : width_(width), height_(height), cell_size_(cell_size) {
    if (width < 1 || height < 1) throw InvalidInput("grid dimensions must be at least 1x1");
    if (!(cell_size > 0.0)) throw InvalidInput("cell size must be positive");
    occupancy_ = Grid<std::uint8_t>::Zero(height, width);
}

bool GridMap::is_obstacle(int x, int y) const {
    if (!in_grid(x, y)) return true;
    if (x == 0 || y == 0 || x == width_ - 1 || y == height_ - 1) return true;
    return occupancy_(y, x) != 0;
}

std::optional<Cell> GridMap::cell_of(const Point& p) const {
    const double fx = std::floor(p.x() / cell_size_);
    const double fy = std::floor(p.y() / cell_size_);
    if (!(fx >= 0 && fy >= 0 && fx < width_ && fy < height_)) return std::nullopt;
    return Cell(static_cast<int>(fx), static_cast<int>(fy));
}

int GridMap::occupied_count() const {
    return static_cast<int>((occupancy_ != 0).count());
}

int GridMap::free_count() const {
    int n = 0;
    for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x) n += is_free(x, y) ? 1 : 0;
    return n;
}

bool GridMap::operator==(const GridMap& other) const {
    return width_ == other.width_ && height_ == other.height_ && cell_size_ == other.cell_size_ &&
           (occupancy_ == other.occupancy_).all();
}

CostMap::CostMap(int width, int height, double cell_size, double fill)
    : width_(width), height_(height), cell_size_(cell_size) {
    if (width < 1 || height < 1) throw InvalidInput("cost map dimensions must be at least 1x1");
    if (!(fill >= 0.0 && fill <= 1.0)) throw InvalidInput("c_tv must lie in [0, 1]");
    cost_ = GridD::Constant(height, width, fill);
}

void CostMap::set(int x, int y, double c) {
    if (!(c >= 0.0 && c <= 1.0)) throw InvalidInput(fmt::format("c_tv {} outside [0, 1]", c));
    cost_(y, x) = c;
}

std::optional<Cell> CostMap::cell_of(const Point& p) const {
    const double fx = std::floor(p.x() / cell_size_);
    const double fy = std::floor(p.y() / cell_size_);
    if (!(fx >= 0 && fy >= 0 && fx < width_ && fy < height_)) return std::nullopt;
    return Cell(static_cast<int>(fx), static_cast<int>(fy));
}

double CostMap::at(const Point& p) const {
    const auto c = cell_of(p);
    return c ? cost_(c->y(), c->x()) : 1.0;
}

GridMap CostMap::to_grid_map() const {
    GridMap g(width_, height_, cell_size_);
    for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x)
            if (cost_(y, x) >= 1.0) g.set_occupied(x, y);
    return g;
}

// ---------------------------------------------------------------------------
// movingai .map

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        if (end == text.size()) break;
        pos = end + 1;
    }
    // A trailing newline leaves one empty line behind.
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

int parse_header_int(std::string_view line, std::string_view key, int lineno) {
    if (line.substr(0, key.size()) != key || line.size() <= key.size() || line[key.size()] != ' ')
        throw ParseError(fmt::format("line {}: expected '{} <int>'", lineno, key));
    std::string rest(line.substr(key.size() + 1));
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(rest, &used);
    } catch (const std::exception&) {
        throw ParseError(fmt::format("line {}: bad integer in '{}'", lineno, line));
    }
    if (used != rest.size() || v < 1) throw ParseError(fmt::format("line {}: bad integer in '{}'", lineno, line));
    return v;
}

}  // namespace

GridMap load_movingai(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.size() < 4) throw ParseError(fmt::format("line {}: truncated header", lines.size() + 1));
    if (lines[0] != "type octile") throw ParseError("line 1: expected 'type octile'");
    const int height = parse_header_int(lines[1], "height", 2);
    const int width = parse_header_int(lines[2], "width", 3);
    if (lines[3] != "map") throw ParseError("line 4: expected 'map'");
    if (lines.size() != static_cast<std::size_t>(4 + height))
        throw ParseError(fmt::format("line {}: expected {} map rows, found {}", lines.size() + 1, height,
                                     lines.size() - 4));
    GridMap map(width, height);
    for (int y = 0; y < height; ++y) {
        const std::string_view row = lines[4 + y];
        const int lineno = 5 + y;
        if (static_cast<int>(row.size()) != width)
            throw ParseError(fmt::format("line {}: row has {} characters, expected {}", lineno, row.size(), width));
        for (int x = 0; x < width; ++x) {
            switch (row[x]) {
                case '.':
                case 'G':
                case 'S':
                    break;
                case '@':
                case 'O':
                case 'T':
                case 'W':
                    map.set_occupied(x, y);
                    break;
                default:
                    throw ParseError(fmt::format("line {}: unknown map character '{}'", lineno, row[x]));
            }
        }
    }
    return map;
}

std::string render_movingai(const GridMap& map) {
    std::string out = fmt::format("type octile\nheight {}\nwidth {}\nmap\n", map.height(), map.width());
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) out += map.occupied(x, y) ? '@' : '.';
        out += '\n';
    }
    return out;
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(fmt::format("cannot open '{}'", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

GridMap read_movingai_file(const std::string& path) { return load_movingai(read_file(path)); }

// ---------------------------------------------------------------------------
// PGM

namespace {

class PgmReader {
public:
    explicit PgmReader(std::string_view bytes) : bytes_(bytes) {}

    // Next whitespace-delimited header token, skipping '#' comments.
    std::string token() {
        skip_space_and_comments();
        std::size_t start = pos_;
        while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
        if (start == pos_) throw ParseError("pgm: truncated header");
        return std::string(bytes_.substr(start, pos_ - start));
    }

    int integer(const char* what) {
        const std::string t = token();
        std::size_t used = 0;
        long v = 0;
        try {
            v = std::stol(t, &used);
        } catch (const std::exception&) {
            throw ParseError(fmt::format("pgm: bad {} '{}'", what, t));
        }
        if (used != t.size() || v < 0) throw ParseError(fmt::format("pgm: bad {} '{}'", what, t));
        return static_cast<int>(v);
    }

    // Consumes the single whitespace byte that separates the header from raster data.
    void end_header() {
        if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_])))
            throw ParseError("pgm: truncated payload");
        ++pos_;
    }

    std::size_t remaining() const { return bytes_.size() - pos_; }
    unsigned char byte(std::size_t offset) const { return static_cast<unsigned char>(bytes_[pos_ + offset]); }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            const char c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::string_view bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

CostMap load_pgm(std::string_view bytes) {
    PgmReader r(bytes);
    std::string magic;
    try {
        magic = r.token();
    } catch (const ParseError&) {
        throw ParseError("pgm: bad magic");
    }
    if (magic != "P2" && magic != "P5") throw ParseError(fmt::format("pgm: bad magic '{}'", magic));
    const int width = r.integer("width");
    const int height = r.integer("height");
    const int maxval = r.integer("maxval");
    if (width < 1 || height < 1) throw ParseError("pgm: empty image");
    if (maxval < 1 || maxval > 65535) throw ParseError(fmt::format("pgm: maxval {} out of range", maxval));
    CostMap costs(width, height);
    if (magic == "P2") {
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                int v = 0;
                try {
                    v = r.integer("pixel");
                } catch (const ParseError&) {
                    throw ParseError("pgm: truncated payload");
                }
                if (v > maxval) throw ParseError(fmt::format("pgm: pixel {} exceeds maxval", v));
                costs.set(x, y, static_cast<double>(v) / maxval);
            }
    } else {
        r.end_header();
        const std::size_t bpp = maxval < 256 ? 1 : 2;
        if (r.remaining() < bpp * width * height) throw ParseError("pgm: truncated payload");
        std::size_t off = 0;
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                int v = r.byte(off);
                if (bpp == 2) v = (v << 8) | r.byte(off + 1);
                off += bpp;
                if (v > maxval) throw ParseError(fmt::format("pgm: pixel {} exceeds maxval", v));
                costs.set(x, y, static_cast<double>(v) / maxval);
            }
    }
    return costs;
}

std::string render_pgm(const CostMap& costs, int maxval, bool binary) {
    std::string out = fmt::format("{}\n{} {}\n{}\n", binary ? "P5" : "P2", costs.width(), costs.height(), maxval);
    for (int y = 0; y < costs.height(); ++y) {
        for (int x = 0; x < costs.width(); ++x) {
            const int v = static_cast<int>(std::lround(costs.at(x, y) * maxval));
            if (binary) {
                if (maxval >= 256) out += static_cast<char>((v >> 8) & 0xff);
                out += static_cast<char>(v & 0xff);
            } else {
                out += fmt::format("{}{}", v, x + 1 == costs.width() ? '\n' : ' ');
            }
        }
    }
    return out;
}

CostMap read_pgm_file(const std::string& path) { return load_pgm(read_file(path)); }

// ---------------------------------------------------------------------------
// Distance transform

namespace {

// One-dimensional squared distance transform (lower envelope of parabolas)
// that also reports which sample attains the minimum.
void dt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& arg, std::vector<int>& v,
           std::vector<double>& z) {
    const int n = static_cast<int>(f.size());
    auto meet = [&](int q, int p) { return ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p)); };
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (!std::isfinite(f[q])) continue;
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -kInf;
            z[1] = kInf;
            continue;
        }
        double s = meet(q, v[k]);
        while (s <= z[k]) {
            --k;
            s = meet(q, v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInf;
    }
    if (k < 0) {
        std::fill(d.begin(), d.end(), kInf);
        std::fill(arg.begin(), arg.end(), -1);
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (z[j + 1] < q) ++j;
        const double diff = q - v[j];
        d[q] = diff * diff + f[v[j]];
        arg[q] = v[j];
    }
}

}  // namespace

DistanceTransform exact_distance_transform(const GridMap& map) {
    const int w = map.width();
    const int h = map.height();
    // Pass 1: along rows.
    GridD row_d(h, w);
    GridI row_arg(h, w);
    {
        std::vector<double> f(w), d(w), z(w + 1);
        std::vector<int> arg(w), v(w);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) f[x] = map.is_obstacle(x, y) ? 0.0 : kInf;
            dt_1d(f, d, arg, v, z);
            for (int x = 0; x < w; ++x) {
                row_d(y, x) = d[x];
                row_arg(y, x) = arg[x];
            }
        }
    }
    // Pass 2: along columns over the row results.
    DistanceTransform out;
    out.distance.resize(h, w);
    out.feature.resize(h, w);
    std::vector<double> f(h), d(h), z(h + 1);
    std::vector<int> arg(h), v(h);
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) f[y] = row_d(y, x);
        dt_1d(f, d, arg, v, z);
        for (int y = 0; y < h; ++y) {
            if (arg[y] < 0) {
                out.distance(y, x) = kInf;
                out.feature(y, x) = -1;
            } else {
                out.distance(y, x) = std::sqrt(d[y]) * map.cell_size();
                out.feature(y, x) = map.index(row_arg(arg[y], x), arg[y]);
            }
        }
    }
    return out;
}

GridI label_obstacle_components(const GridMap& map, int* count) {
    const int w = map.width();
    const int h = map.height();
    GridI label = GridI::Constant(h, w, -1);
    int next = 0;
    std::vector<int> stack;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!map.is_obstacle(x, y) || label(y, x) >= 0) continue;
            label(y, x) = next;
            stack.push_back(map.index(x, y));
            while (!stack.empty()) {
                const Cell c = map.cell_from_index(stack.back());
                stack.pop_back();
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = c.x() + dx, ny = c.y() + dy;
                        if (!map.in_grid(nx, ny) || !map.is_obstacle(nx, ny) || label(ny, nx) >= 0) continue;
                        label(ny, nx) = next;
                        stack.push_back(map.index(nx, ny));
                    }
            }
            ++next;
        }
    if (count) *count = next;
    return label;
}

// ---------------------------------------------------------------------------
// Workspace

Workspace::Workspace(GridMap map) : map_(std::move(map)), edt_(exact_distance_transform(map_)) {}

bool Workspace::contains(const Point& p) const { return map_.cell_of(p).has_value(); }

double Workspace::clearance(const Point& p) const {
    const auto cell = map_.cell_of(p);
    if (!cell) throw OutOfBounds(fmt::format("point ({}, {}) outside the map", p.x(), p.y()));
    if (map_.is_obstacle(cell->x(), cell->y())) return 0.0;
    const int w = map_.width();
    const int h = map_.height();
    // Bilinear interpolation between cell centers.
    const double u = p.x() / map_.cell_size() - 0.5;
    const double v = p.y() / map_.cell_size() - 0.5;
    const int x0 = std::clamp(static_cast<int>(std::floor(u)), 0, std::max(0, w - 2));
    const int y0 = std::clamp(static_cast<int>(std::floor(v)), 0, std::max(0, h - 2));
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const double tx = std::clamp(u - x0, 0.0, 1.0);
    const double ty = std::clamp(v - y0, 0.0, 1.0);
    const GridD& d = edt_.distance;
    const double top = (1 - tx) * d(y0, x0) + tx * d(y0, x1);
    const double bottom = (1 - tx) * d(y1, x0) + tx * d(y1, x1);
    return (1 - ty) * top + ty * bottom;
}

WorkspaceBox Workspace::box() const {
    return {0.0, map_.width() * map_.cell_size(), 0.0, map_.height() * map_.cell_size()};
}

bool collision_free_trajectory(const Workspace& ws, const Trajectory& traj, double robot_radius) {
    auto ok = [&](const Point& p) { return ws.contains(p) && ws.clearance(p) > robot_radius; };
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const Point p = project(traj.states[i]);
        if (!ok(p)) return false;
        if (i + 1 < traj.size()) {
            const Point mid = 0.5 * (p + project(traj.states[i + 1]));
            if (!ok(mid)) return false;
        }
    }
    return true;
}

double trajectory_cost(const Trajectory& traj, CostMode mode, const CostMap* costs, double K) {
    if (mode == CostMode::duration) return traj.duration();
    if (!costs) throw InvalidInput("cost-map mode needs a cost map");
    double total = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double c = costs->at(project(traj.states[i]));
        if (c >= 1.0) return kInf;
        const double val = std::exp(K * c);
        if (i > 0) total += 0.5 * (prev + val) * (traj.times[i] - traj.times[i - 1]);
        prev = val;
    }
    return total;
}

}  // namespace kinoforge
