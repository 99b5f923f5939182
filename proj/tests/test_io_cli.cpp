#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cwlab/io.hpp"
#include "scenario.hpp"

namespace fs = std::filesystem;
using namespace cwlab;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "cwlab-unit" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int exit_code(const std::string& cmd) {
    const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

io::Json minimal_scenario() {
    return io::Json::parse(R"({
        "schema": "cwlab-scenario/1",
        "name": "mini",
        "analyses": [{"id": "a", "op": "expansivity_floor", "map": "torus-anosov", "resolutions": [16], "horizon": 2}]
    })");
}

}  // namespace

TEST_CASE("cell sets round-trip through the binary container on every surface") {
    const fs::path dir = scratch("cellset");
    std::mt19937_64 rng(1);
    for (const auto& sp : {GridSpace::rectangle({-1, 2, 0, 1}, 24), GridSpace::torus(32), GridSpace::sphere_quotient(32)}) {
        std::bernoulli_distribution coin(0.3);
        std::vector<CellIndex> cells;
        for (CellIndex c = 0; c < sp.cell_count(); ++c)
            if (coin(rng)) cells.push_back(c);
        const CellSet s(sp, cells);
        const fs::path p = dir / (to_string(sp.kind()) + ".cws");
        io::write_cellset(p, s);
        const CellSet back = io::read_cellset(p);
        CHECK(back.space() == sp);
        CHECK(back == s);
    }
    io::write_cellset(dir / "empty.cws", CellSet(GridSpace::torus(8), {}));
    CHECK(io::read_cellset(dir / "empty.cws").empty());
}

TEST_CASE("corrupt cell set files are rejected") {
    const fs::path dir = scratch("corrupt");
    const fs::path good = dir / "good.cws";
    io::write_cellset(good, CellSet::full(GridSpace::torus(16)));
    const std::string bytes = slurp(good);

    auto write_raw = [&](const std::string& name, const std::string& data) {
        std::ofstream(dir / name, std::ios::binary) << data;
        return dir / name;
    };
    std::string bad_magic = bytes;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(io::read_cellset(write_raw("magic.cws", bad_magic)), Error);
    CHECK_THROWS_AS(io::read_cellset(write_raw("short.cws", bytes.substr(0, bytes.size() - 3))), Error);
    CHECK_THROWS_AS(io::read_cellset(write_raw("tiny.cws", bytes.substr(0, 6))), Error);
    CHECK_THROWS_AS(io::read_cellset(dir / "missing.cws"), Error);
}

TEST_CASE("label fields round-trip through PGM and sidecar") {
    const fs::path dir = scratch("labels");
    const CellSet dom = CellSet::full(GridSpace::rectangle({0, 1, 0, 1}, 20));
    const LabelField f = sheared_foliation(dom, 0.3);
    io::write_label_field(dir / "field", f, {{"note", "sheared"}});
    CHECK(fs::exists(dir / "field.pgm"));
    const auto side = io::read_json(dir / "field.json");
    CHECK(side["format"] == "cwlab-label-field");
    CHECK(side["diagnostics"]["note"] == "sheared");
    const LabelField back = io::read_label_field(dir / "field");
    CHECK(back == f);
}

TEST_CASE("renders write a PPM and a legend") {
    const fs::path dir = scratch("render");
    const LabelField f = horizontal_foliation(CellSet::full(GridSpace::torus(16)));
    io::render_labels(dir / "f.ppm", f);
    const std::string img = slurp(dir / "f.ppm");
    CHECK(img.rfind("P6\n16 16\n255\n", 0) == 0);
    CHECK(img.size() == std::string("P6\n16 16\n255\n").size() + 16 * 16 * 3);
    CHECK(io::read_json(dir / "f.ppm.legend.json").is_object());
}

TEST_CASE("numbers and hashes") {
    CHECK(io::format_number(0.1) == "0.1");
    CHECK(std::stod(io::format_number(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(io::format_number(INFINITY) == "inf");
    const fs::path dir = scratch("hash");
    io::write_text(dir / "a.txt", "hello");
    io::write_text(dir / "b.txt", "hello");
    io::write_text(dir / "c.txt", "hellp");
    CHECK(io::file_hash(dir / "a.txt") == io::file_hash(dir / "b.txt"));
    CHECK(io::file_hash(dir / "a.txt") != io::file_hash(dir / "c.txt"));
    CHECK(io::file_hash(dir / "a.txt").size() == 16);
}

TEST_CASE("scenario validation names the bad field") {
    CHECK_NOTHROW(cli::parse_scenario(minimal_scenario()));

    auto expect_field = [](io::Json doc, const std::string& field) {
        try {
            cli::parse_scenario(doc);
            FAIL("accepted an invalid scenario");
        } catch (const cli::ScenarioError& e) {
            CHECK(e.field == field);
        }
    };
    auto doc = minimal_scenario();
    doc["schema"] = "other/2";
    expect_field(doc, "schema");
    doc = minimal_scenario();
    doc["analyses"][0]["op"] = "teleport";
    expect_field(doc, "analyses[0].op");
    doc = minimal_scenario();
    doc["analyses"][0]["horizon"] = -1;
    expect_field(doc, "analyses[0].horizon");
    doc = minimal_scenario();
    doc["analyses"][0]["bogus"] = 1;
    expect_field(doc, "analyses[0].bogus");
    doc = minimal_scenario();
    doc["analyses"].push_back(doc["analyses"][0]);
    expect_field(doc, "analyses[1].id");
    // Sampling analyses need a seed.
    doc = minimal_scenario();
    doc["analyses"][0] = {{"id", "c"}, {"op", "cwn_estimate"}, {"map", "torus-anosov"}, {"resolution", 32}};
    expect_field(doc, "seed");
}

TEST_CASE("the command line reports invalid scenarios with exit code 2") {
    const std::string cli = CWLAB_CLI_PATH;
    const std::string dir = CWLAB_SCENARIO_DIR;
    CHECK(exit_code(cli + " validate " + dir + "/malformed-negative-delta.json") == 2);
    CHECK(exit_code(cli + " validate " + dir + "/torus-cwn.json") == 0);
    CHECK(exit_code(cli + " validate /nonexistent/scenario.json") == 2);
    CHECK(exit_code(cli + " frobnicate") != 0);
}

TEST_CASE("scenario runs are deterministic and write a manifest") {
    const auto s = cli::parse_scenario(minimal_scenario());
    const fs::path a = scratch("run-a"), b = scratch("run-b");
    const fs::path src = scratch("run-src") / "mini.json";
    io::write_json(src, minimal_scenario());
    const auto ra = cli::run_scenario(s, src, a, 1);
    const auto rb = cli::run_scenario(s, src, b, 1);
    CHECK(ra.failed == 0);
    CHECK(rb.failed == 0);
    REQUIRE(fs::exists(ra.manifest));
    const auto manifest = io::read_json(ra.manifest);
    REQUIRE(manifest.at("analyses").size() == 1);
    const auto& entry = manifest.at("analyses").at(0);
    CHECK(entry.at("status") == "ok");
    CHECK(entry.at("artifacts").size() == 2);
    for (const auto& art : entry.at("artifacts"))
        CHECK(art.at("hash") == io::file_hash(a / art.at("path").get<std::string>()));
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
        if (!entry.is_regular_file()) continue;
        const fs::path rel = fs::relative(entry.path(), a);
        CHECK_MESSAGE(slurp(entry.path()) == slurp(b / rel), rel.string());
    }
}
