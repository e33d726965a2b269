#pragma once

#include <iosfwd>
#include <string>

#include "kinoforge/field.hpp"
#include "kinoforge/field_medial.hpp"

namespace kinoforge {

// Binary layout (little endian):
//   char[8] "KFFIELD1", u32 kind, i32 width, i32 height, i32 goal_x, i32 goal_y,
//   f64 goal_px, f64 goal_py, f64 cell_size,
//   then width*height row-major records {f64 cost_to_go, f64 end_x, f64 end_y, u8 valid}.
void write_field(std::ostream& os, const FieldGrid& grid);
FieldGrid read_field(std::istream& is);

void save_field(const std::string& path, const FieldGrid& grid);
FieldGrid load_field(const std::string& path);

/// Obstacles, medial axis in red, guidance vectors as arrows every `stride` cells.
std::string medial_field_svg(const Workspace& ws, const MedialAxis& axis, const GoalField& field, int stride = 2);
/// Cost map shaded from light (cheap) to dark (expensive) with waypoint arrows.
std::string cost_field_svg(const CostMap& costs, const FieldGrid& field, int stride = 2);

}  // namespace kinoforge
