#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "kinoforge/bench.hpp"
#include "kinoforge/cli.hpp"

using namespace kinoforge;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run kf(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("kf_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("fnv1a64 reference values") {
    CHECK(cli::fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(cli::fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(cli::fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("usage errors exit 2") {
    CHECK(kf({}).code == cli::invalid_input);
    CHECK(kf({"frobnicate"}).code == cli::invalid_input);
    CHECK(kf({"plan", "--start", "1,1"}).code == cli::invalid_input);
    CHECK(kf({"--help"}).code == cli::ok);
}

TEST_CASE("map generation, field build and planning") {
    const fs::path d = scratch("flow");
    const std::string map = (d / "open.map").string();
    REQUIRE(kf({"gen-map", "--kind", "empty", "--width", "32", "--height", "32", "--out", map}).code == cli::ok);
    CHECK(load_movingai(slurp(map)) == empty_map(32, 32));

    const Run bf = kf({"build-field", "--map", map, "--goal", "25.5,25.5", "--out", (d / "field").string()});
    REQUIRE(bf.code == cli::ok);
    CHECK(fs::exists(d / "field" / "field.bin"));
    CHECK(fs::exists(d / "field" / "figure.svg"));
    CHECK(slurp(d / "field" / "manifest.txt").find("command=build-field") != std::string::npos);

    const Run pl = kf({"plan", "--map", map, "--start", "5.5,5.5,0", "--goal", "25.5,25.5", "--field",
                       (d / "field" / "field.bin").string(), "--iters", "3000", "--out", (d / "plan").string()});
    REQUIRE(pl.code == cli::ok);
    for (const char* f : {"trace.txt", "solution.txt", "figure.svg", "manifest.txt"}) CHECK(fs::exists(d / "plan" / f));
    const std::string manifest = slurp(d / "plan" / "manifest.txt");
    CHECK(manifest.find("trace_digest=" + cli::file_digest((d / "plan" / "trace.txt").string())) != std::string::npos);
    fs::remove_all(d);
}

TEST_CASE("invalid inputs exit 2") {
    const fs::path d = scratch("bad");
    const std::string map = (d / "m.map").string();
    REQUIRE(kf({"gen-map", "--kind", "empty", "--width", "16", "--height", "16", "--out", map}).code == cli::ok);
    // Start inside the boundary ring.
    CHECK(kf({"plan", "--map", map, "--start", "0.5,0.5", "--goal", "8.5,8.5", "--out", (d / "p").string()}).code ==
          cli::invalid_input);
    CHECK(kf({"plan", "--map", map, "--start", "4.5,4.5", "--goal", "8.5,8.5", "--expansion", "bogus", "--out",
              (d / "p").string()})
              .code == cli::invalid_input);
    CHECK(kf({"plan", "--map", (d / "missing.map").string(), "--start", "4.5,4.5", "--goal", "8.5,8.5", "--out",
              (d / "p").string()})
              .code == cli::invalid_input);
    std::ofstream(d / "broken.map") << "type octile\nheight 2\n";
    CHECK(kf({"build-field", "--map", (d / "broken.map").string(), "--goal", "1,1", "--out", (d / "f").string()}).code ==
          cli::invalid_input);
    CHECK(kf({"plan", "--map", map, "--start", "4.5,4.5", "--goal", "8.5,8.5", "--controller", "policy:/nope.json",
              "--out", (d / "p").string()})
              .code == cli::invalid_input);
    fs::remove_all(d);
}

TEST_CASE("no solution exits 3") {
    const fs::path d = scratch("nosol");
    GridMap m(24, 24);
    for (int y = 0; y < 24; ++y) m.set_occupied(12, y);
    std::ofstream(d / "wall.map") << render_movingai(m);
    const Run r = kf({"plan", "--map", (d / "wall.map").string(), "--start", "5.5,12.5", "--goal", "18.5,12.5",
                      "--iters", "500", "--out", (d / "p").string()});
    CHECK(r.code == cli::no_solution);
    CHECK(fs::exists(d / "p" / "trace.txt"));
    fs::remove_all(d);
}

TEST_CASE("plan traces are reproducible") {
    const fs::path d = scratch("det");
    const std::string map = (d / "c.map").string();
    REQUIRE(kf({"gen-map", "--kind", "city", "--width", "48", "--height", "48", "--seed", "3", "--out", map}).code ==
            cli::ok);
    Rng rng(2);
    const auto inst = generate_instances(Workspace(read_movingai_file(map)), SystemSpec::first_order(), "c", 1, {}, rng);
    const std::string start = std::to_string(inst[0].start[0]) + "," + std::to_string(inst[0].start[1]);
    const std::string goal = std::to_string(inst[0].goal.x()) + "," + std::to_string(inst[0].goal.y());
    for (const char* exp : {"rlc", "random", "slc"}) {
        std::string t[2];
        for (int k = 0; k < 2; ++k) {
            const fs::path out = d / (std::string(exp) + std::to_string(k));
            const Run r = kf({"plan", "--map", map, "--start", start, "--goal", goal, "--expansion", exp, "--seed", "5",
                              "--iters", "2000", "--out", out.string()});
            REQUIRE((r.code == cli::ok || r.code == cli::no_solution));
            t[k] = slurp(out / "trace.txt");
        }
        CHECK(t[0] == t[1]);
        CHECK(!t[0].empty());
    }
    fs::remove_all(d);
}

TEST_CASE("slc table and policy controllers from files") {
    const fs::path d = scratch("ctrl");
    const Run bs = kf({"build-slc", "--system", "second_order", "--initial-samples", "4", "--out", (d / "t").string()});
    REQUIRE(bs.code == cli::ok);
    CHECK(bs.out.find("plans=100") != std::string::npos);
    const std::string map = (d / "o.map").string();
    REQUIRE(kf({"gen-map", "--kind", "empty", "--width", "24", "--height", "24", "--out", map}).code == cli::ok);
    const Run pl = kf({"plan", "--map", map, "--system", "second_order", "--controller",
                       "table:" + (d / "t" / "table.bin").string(), "--start", "5.5,5.5,0,0,0", "--goal", "18.5,18.5",
                       "--iters", "3000", "--out", (d / "p").string()});
    CHECK((pl.code == cli::ok || pl.code == cli::no_solution));
    // A table for the wrong system is rejected.
    CHECK(kf({"plan", "--map", map, "--controller", "table:" + (d / "t" / "table.bin").string(), "--start", "5.5,5.5",
              "--goal", "18.5,18.5", "--out", (d / "q").string()})
              .code == cli::invalid_input);

    MlpPolicy p;
    p.obs_dim = 3;
    p.act_dim = 2;
    p.obs_offset = Eigen::Vector3d::Zero();
    p.obs_scale = Eigen::Vector3d::Ones();
    MlpLayer l;
    l.weight = Eigen::Matrix<double, 2, 3>{{1, 0, 0}, {0, 0, 1}};
    l.bias = Eigen::Vector2d::Zero();
    p.layers = {l};
    p.act_low = Eigen::Vector2d(-1, -1);
    p.act_high = Eigen::Vector2d(1, 1);
    save_policy((d / "policy.json").string(), p);
    const Run pp = kf({"plan", "--map", map, "--controller", "policy:" + (d / "policy.json").string(), "--start",
                       "5.5,5.5", "--goal", "18.5,18.5", "--iters", "3000", "--out", (d / "pp").string()});
    CHECK(pp.code == cli::ok);
    fs::remove_all(d);
}

TEST_CASE("export-golden writes the reference format") {
    const fs::path d = scratch("golden");
    const std::string out = (d / "g.txt").string();
    const Run r = kf({"export-golden", "--system", "first_order", "--start", "0,0,0", "--controls", "1,0,1;0,1,0.5",
                      "--out", out});
    REQUIRE(r.code == cli::ok);
    std::istringstream is(slurp(out));
    std::string header, line, last;
    std::getline(is, header);
    CHECK(header == "system=first_order substep=0.05");
    int n = 0;
    while (std::getline(is, line)) last = line, ++n;
    CHECK(n == 31);
    std::istringstream ls(last);
    double t, x, y, th;
    ls >> t >> x >> y >> th;
    CHECK(t == doctest::Approx(1.5));
    CHECK(x == doctest::Approx(1.0));
    CHECK(th == doctest::Approx(0.5));
    CHECK(kf({"export-golden", "--controls", "2,0,1", "--out", out}).code == cli::invalid_input);
    CHECK(kf({"export-golden", "--controls", "1,0", "--out", out}).code == cli::invalid_input);
    fs::remove_all(d);
}

TEST_CASE("bench and report") {
    const fs::path d = scratch("bench");
    std::ofstream(d / "bench.json") << R"({
  "max_iterations": 300, "seeds": 2, "instances_per_map": 1, "budget_points": 10,
  "maps": [{"id": "open", "generate": "empty", "size": 24}],
  "planners": [{"name": "rlc", "strategy": "rlc"}, {"name": "random", "strategy": "random"}]
})";
    const Run b = kf({"bench", "--config", (d / "bench.json").string(), "--out", (d / "out").string()});
    REQUIRE(b.code == cli::ok);
    CHECK(b.out.find("records=4") != std::string::npos);
    CHECK(read_records((d / "out" / "records.tsv").string()).size() == 4);
    const Run rep = kf({"report", "--records", (d / "out" / "records.tsv").string(), "--out", (d / "rep").string()});
    CHECK(rep.code == cli::ok);
    CHECK(slurp(d / "rep" / "summary.csv").rfind("planner,budget_type,budget,", 0) == 0);
    std::ofstream(d / "bad.json") << "{ nope";
    CHECK(kf({"bench", "--config", (d / "bad.json").string(), "--out", (d / "o2").string()}).code == cli::invalid_input);
    fs::remove_all(d);
}

TEST_CASE("installed binary runs") {
    const std::string cmd = std::string(KINOFORGE_BINARY) + " --version > /dev/null";
    CHECK(std::system(cmd.c_str()) == 0);
}
