#include <cmath>
#include <string>

#include <doctest.h>

#include "kinoforge/bench.hpp"
#include "kinoforge/geom_env.hpp"

using namespace kinoforge;

namespace {

double brute_distance(const GridMap& m, int x, int y) {
    double best = kInf;
    for (int oy = 0; oy < m.height(); ++oy)
        for (int ox = 0; ox < m.width(); ++ox)
            if (m.is_obstacle(ox, oy)) best = std::min(best, std::hypot(ox - x, oy - y));
    return best;
}

}  // namespace

TEST_CASE("movingai parsing") {
    const std::string text = "type octile\nheight 3\nwidth 4\nmap\n....\n.@T.\n..W.\n";
    const GridMap m = load_movingai(text);
    CHECK(m.width() == 4);
    CHECK(m.height() == 3);
    CHECK(m.occupied(1, 1));
    CHECK(m.occupied(2, 1));
    CHECK(m.occupied(2, 2));
    CHECK_FALSE(m.occupied(0, 0));
    CHECK(m.occupied_count() == 3);
    CHECK(load_movingai(render_movingai(m)) == m);
}

TEST_CASE("movingai rejects malformed input") {
    CHECK_THROWS_AS(load_movingai("type octile\nheight 2\nwidth 2\nmap\n..\n"), ParseError);
    CHECK_THROWS_AS(load_movingai("type octile\nheight 1\nwidth 2\nmap\n.x\n"), ParseError);
    CHECK_THROWS_AS(load_movingai("height 1\nwidth 2\n..\n"), ParseError);
}

TEST_CASE("pgm round trip in both encodings") {
    CostMap c(5, 4, 1.0, 0.0);
    c.set(0, 0, 1.0);
    c.set(2, 1, 0.5);
    c.set(4, 3, 0.2);
    for (bool binary : {true, false}) {
        const CostMap r = load_pgm(render_pgm(c, 255, binary));
        REQUIRE(r.width() == 5);
        REQUIRE(r.height() == 4);
        CHECK(r.at(0, 0) == 1.0);
        CHECK_FALSE(r.traversable(0, 0));
        CHECK(r.at(2, 1) == doctest::Approx(128.0 / 255));
        CHECK(r.at(4, 3) == doctest::Approx(51.0 / 255));
    }
    CHECK_THROWS_AS(load_pgm("P6\n1 1\n255\nx"), ParseError);
}

TEST_CASE("cost map obstacle grid") {
    CostMap c(4, 4, 1.0, 0.1);
    c.set(1, 2, 1.0);
    const GridMap g = c.to_grid_map();
    CHECK(g.occupied(1, 2));
    CHECK(g.occupied_count() == 1);
    CHECK(c.at(Point(-1, 0)) == 1.0);
    CHECK_THROWS(c.set(0, 0, 1.5));
}

TEST_CASE("cell indexing is row y, column x") {
    GridMap m(5, 3);
    CHECK(m.index(4, 2) == 14);
    CHECK(m.cell_from_index(7) == Cell(2, 1));
    CHECK(*m.cell_of(Point(2.9, 1.1)) == Cell(2, 1));
    CHECK_FALSE(m.cell_of(Point(5.0, 0.5)).has_value());
    CHECK(m.is_obstacle(0, 1));
    CHECK(m.is_obstacle(-1, 1));
    CHECK(m.is_free(1, 1));
}

TEST_CASE("exact distance transform matches brute force") {
    for (std::uint64_t seed : {1, 2, 3}) {
        Rng rng(seed);
        const GridMap m = random_rect_map(40, 30, 0.2, rng);
        const DistanceTransform dt = exact_distance_transform(m);
        for (int y = 0; y < m.height(); ++y)
            for (int x = 0; x < m.width(); ++x) {
                const double want = brute_distance(m, x, y);
                CHECK(dt.distance(y, x) == doctest::Approx(want).epsilon(1e-12));
                const int f = dt.feature(y, x);
                REQUIRE(f >= 0);
                const Cell fc = m.cell_from_index(f);
                CHECK(m.is_obstacle(fc.x(), fc.y()));
                CHECK(std::hypot(fc.x() - x, fc.y() - y) == doctest::Approx(want).epsilon(1e-12));
            }
    }
}

TEST_CASE("obstacle components") {
    GridMap m(8, 8);
    m.set_occupied(3, 3);
    m.set_occupied(4, 4);  // diagonal neighbour: same component
    m.set_occupied(6, 3);  // joins the boundary ring
    int count = 0;
    const GridI lab = label_obstacle_components(m, &count);
    CHECK(count == 2);
    CHECK(lab(3, 3) == lab(4, 4));
    CHECK(lab(3, 6) == lab(0, 0));
    CHECK(lab(3, 3) != lab(0, 0));
    CHECK(lab(1, 1) == -1);
}

TEST_CASE("clearance and collision checks") {
    const Workspace ws(empty_map(10, 10));
    CHECK(ws.cell_clearance(5, 5) == doctest::Approx(4.0));
    CHECK(ws.clearance(Point(5.5, 5.5)) == doctest::Approx(4.0));
    CHECK(ws.clearance(Point(0.5, 0.5)) == 0.0);
    CHECK_THROWS_AS(ws.clearance(Point(-1, 5)), OutOfBounds);

    const SystemSpec spec = SystemSpec::first_order();
    const Trajectory inside = propagate(spec, make_state(spec, 3, 5, 0), Control(1, 0), 3.0);
    CHECK(collision_free_trajectory(ws, inside, 0.5));
    const Trajectory into_wall = propagate(spec, make_state(spec, 3, 5, 0), Control(1, 0), 7.0);
    CHECK_FALSE(collision_free_trajectory(ws, into_wall, 0.5));
}

TEST_CASE("trajectory cost modes") {
    const SystemSpec spec = SystemSpec::first_order();
    const Trajectory t = propagate(spec, make_state(spec, 1.5, 1.5, 0), Control(1, 0), 2.0);
    CHECK(trajectory_cost(t, CostMode::duration) == doctest::Approx(2.0));
    CostMap c(8, 8, 1.0, 0.25);
    CHECK(trajectory_cost(t, CostMode::costmap, &c, 2.0) == doctest::Approx(2.0 * std::exp(0.5)));
    c.set(3, 1, 1.0);
    CHECK(std::isinf(trajectory_cost(t, CostMode::costmap, &c, 2.0)));
}
