#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "kinoforge/dynamics.hpp"

namespace kinoforge {

template <typename T>
using Grid = Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using GridD = Grid<double>;
using GridI = Grid<int>;
using Cell = Eigen::Vector2i;

constexpr double kInf = std::numeric_limits<double>::infinity();

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OutOfBounds : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Occupancy grid. Cell (x, y) covers [x, x+1) x [y, y+1) in cell units and is
/// addressed as row y, column x; its linear index is y * width + x. The outer
/// ring of cells counts as obstacle regardless of the stored occupancy.
class GridMap {
public:
    GridMap() = default;
    GridMap(int width, int height, double cell_size = 1.0);

    int width() const { return width_; }
    int height() const { return height_; }
    double cell_size() const { return cell_size_; }
    int cell_count() const { return width_ * height_; }

    bool occupied(int x, int y) const { return occupancy_(y, x) != 0; }
    void set_occupied(int x, int y, bool value = true) { occupancy_(y, x) = value ? 1 : 0; }
    /// Stored occupancy, boundary ring, or outside the grid.
    bool is_obstacle(int x, int y) const;
    bool is_free(int x, int y) const { return !is_obstacle(x, y); }
    bool in_grid(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    int index(int x, int y) const { return y * width_ + x; }
    Cell cell_from_index(int idx) const { return {idx % width_, idx / width_}; }
    /// Cell containing p, or nullopt when p lies outside the grid.
    std::optional<Cell> cell_of(const Point& p) const;
    Point cell_center(int x, int y) const { return {(x + 0.5) * cell_size_, (y + 0.5) * cell_size_}; }
    Point cell_center(const Cell& c) const { return cell_center(c.x(), c.y()); }

    /// Number of cells flagged occupied in the stored grid (boundary ring excluded).
    int occupied_count() const;
    int free_count() const;

    bool operator==(const GridMap& other) const;

private:
    int width_ = 0;
    int height_ = 0;
    double cell_size_ = 1.0;
    Grid<std::uint8_t> occupancy_;
};

/// Traversability costs c_tv in [0, 1]; c_tv == 1 is not traversable.
class CostMap {
public:
    CostMap() = default;
    CostMap(int width, int height, double cell_size = 1.0, double fill = 0.0);

    int width() const { return width_; }
    int height() const { return height_; }
    double cell_size() const { return cell_size_; }
    int cell_count() const { return width_ * height_; }
    int index(int x, int y) const { return y * width_ + x; }
    Cell cell_from_index(int idx) const { return {idx % width_, idx / width_}; }
    bool in_grid(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
    std::optional<Cell> cell_of(const Point& p) const;
    Point cell_center(int x, int y) const { return {(x + 0.5) * cell_size_, (y + 0.5) * cell_size_}; }

    double at(int x, int y) const { return cost_(y, x); }
    void set(int x, int y, double c);
    /// c_tv of the cell containing p; 1 outside the grid.
    double at(const Point& p) const;
    bool traversable(int x, int y) const { return in_grid(x, y) && cost_(y, x) < 1.0; }
    bool traversable(const Point& p) const { return at(p) < 1.0; }

    const GridD& values() const { return cost_; }

    /// Obstacle grid with the c_tv == 1 cells occupied.
    GridMap to_grid_map() const;

private:
    int width_ = 0;
    int height_ = 0;
    double cell_size_ = 1.0;
    GridD cost_;
};

GridMap load_movingai(std::string_view text);
std::string render_movingai(const GridMap& map);
GridMap read_movingai_file(const std::string& path);

CostMap load_pgm(std::string_view bytes);
/// Writes P5 (binary) or P2 (ascii) with the given maxval; c_tv is scaled and rounded.
std::string render_pgm(const CostMap& costs, int maxval = 255, bool binary = true);
CostMap read_pgm_file(const std::string& path);

inline Point project(const StateVec& s) { return {s[0], s[1]}; }

/// Exact Euclidean distance transform over obstacle cell centers (boundary ring
/// included) with the nearest obstacle cell of every cell.
struct DistanceTransform {
    GridD distance;  // length units
    GridI feature;   // linear index of a nearest obstacle cell, -1 if none exists
};

DistanceTransform exact_distance_transform(const GridMap& map);

/// 8-connected labelling of obstacle cells (boundary ring included); free cells get -1.
GridI label_obstacle_components(const GridMap& map, int* count = nullptr);

/// Obstacle map with its distance transform precomputed.
class Workspace {
public:
    Workspace() = default;
    explicit Workspace(GridMap map);

    const GridMap& map() const { return map_; }
    const DistanceTransform& edt() const { return edt_; }
    double cell_clearance(int x, int y) const { return edt_.distance(y, x); }
    bool contains(const Point& p) const;

    /// Bilinear interpolation of the distance transform at p; 0 inside obstacle
    /// cells. Throws OutOfBounds outside the grid.
    double clearance(const Point& p) const;

    WorkspaceBox box() const;

private:
    GridMap map_;
    DistanceTransform edt_;
};

/// True iff every sample and every midpoint between consecutive samples has
/// clearance strictly greater than the robot radius.
bool collision_free_trajectory(const Workspace& ws, const Trajectory& traj, double robot_radius);

enum class CostMode { duration, costmap };

/// Duration mode returns T. Cost-map mode integrates exp(K c_tv) over the
/// trajectory samples with the trapezoid rule; +inf if any sample touches a
/// c_tv == 1 cell.
double trajectory_cost(const Trajectory& traj, CostMode mode, const CostMap* costs = nullptr, double K = 0.0);

}  // namespace kinoforge
