#include "scenario.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <thread>

#include "cwlab/atlas.hpp"
#include "cwlab/decomposition.hpp"
#include "cwlab/dynamics.hpp"
#include "cwlab/graphlike.hpp"

namespace cwlab::cli {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Parameter schema

enum class Kind { Int, Double, String, Bool, Point, IntList, PointList };

struct Field {
    std::string name;
    Kind kind;
    bool required = false;
    Json fallback = nullptr;
    double lo = -INFINITY, hi = INFINITY;
    bool lo_open = false;  // lo itself is excluded
    std::vector<std::string> choices;
};

struct OpSchema {
    std::vector<Field> fields;
    bool samples = false;  // needs the scenario seed
};

const std::vector<std::string> kGenerators{"flat", "cocarc", "sin", "cantor"};
const std::vector<std::string> kMaps{"torus-anosov", "sphere-pseudo-anosov", "identity"};

Field map_field() { return {"map", Kind::String, true, nullptr, -INFINITY, INFINITY, false, kMaps}; }
Field res_field(int fallback) { return {"resolution", Kind::Int, false, fallback, 16, 2048}; }
Field delta_field() { return {"delta", Kind::Double, false, 0.15, 0.0, 0.5, true}; }
Field horizon_field(int fallback) { return {"horizon", Kind::Int, false, fallback, 0, 40}; }

const std::map<std::string, OpSchema>& schemas() {
    static const std::map<std::string, OpSchema> s{
        {"semicontinuity",
         {{{"generator", Kind::String, true, nullptr, -INFINITY, INFINITY, false, kGenerators},
           {"points", Kind::PointList, true},
           {"resolutions", Kind::IntList, false, Json::array({64, 128, 256}), 16, 1024}}}},
        {"flow_decomposition",
         {{{"generator", Kind::String, true, nullptr, -INFINITY, INFINITY, false, kGenerators}, res_field(256)}}},
        {"backgammon", {{res_field(256), {"samples", Kind::Int, false, 10, 1, 10000}}, true}},
        {"finite_horizon_plaque",
         {{map_field(), res_field(512), {"base", Kind::Point, true}, delta_field(), horizon_field(10),
           {"direction", Kind::String, false, "stable", -INFINITY, INFINITY, false, {"stable", "unstable"}}}}},
        {"cwn_estimate",
         {{map_field(), res_field(512), delta_field(), horizon_field(10), {"samples", Kind::Int, false, 50, 1, 100000}},
          true}},
        {"expansivity_floor",
         {{map_field(), {"resolutions", Kind::IntList, false, Json::array({256, 512}), 16, 2048}, horizon_field(8)}}},
        {"cantor_in_stable",
         {{map_field(), res_field(512), {"eps", Kind::Double, false, 0.3, 0.0, 0.5, true},
           {"levels", Kind::Int, false, 3, 0, 4}, {"orbit_budget", Kind::Int, false, 400, 1, 1000000}, horizon_field(10)},
          true}},
        {"stable_atlas",
         {{map_field(), res_field(256), delta_field(), horizon_field(10), {"scale", Kind::Double, false, 0.1, 0.0, 0.5, true},
           {"samples", Kind::Int, false, 200, 1, 100000}, {"export_boxes", Kind::Bool, false, false}},
          true}},
    };
    return s;
}

std::string kind_name(Kind k) {
    switch (k) {
        case Kind::Int: return "an integer";
        case Kind::Double: return "a number";
        case Kind::String: return "a string";
        case Kind::Bool: return "a boolean";
        case Kind::Point: return "a point [x, y]";
        case Kind::IntList: return "a non-empty list of integers";
        default: return "a non-empty list of points";
    }
}

bool is_point(const Json& v) { return v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number(); }

void check_range(const Field& f, const std::string& path, double v) {
    if (!std::isfinite(v)) throw ScenarioError(path, "must be finite");
    if (f.lo_open ? !(v > f.lo) : v < f.lo)
        throw ScenarioError(path, "must be " + std::string(f.lo_open ? "greater than " : "at least ") + io::format_number(f.lo));
    if (v > f.hi) throw ScenarioError(path, "must be at most " + io::format_number(f.hi));
}

Json validate_field(const Field& f, const std::string& path, const Json& v) {
    auto bad = [&] { return ScenarioError(path, "must be " + kind_name(f.kind)); };
    switch (f.kind) {
        case Kind::Int:
            if (!v.is_number_integer()) throw bad();
            check_range(f, path, v.get<double>());
            return v;
        case Kind::Double:
            if (!v.is_number()) throw bad();
            check_range(f, path, v.get<double>());
            return v.get<double>();
        case Kind::String:
            if (!v.is_string()) throw bad();
            if (!f.choices.empty() && std::find(f.choices.begin(), f.choices.end(), v.get<std::string>()) == f.choices.end()) {
                std::string list;
                for (const auto& c : f.choices) list += (list.empty() ? "" : ", ") + c;
                throw ScenarioError(path, "must be one of " + list);
            }
            return v;
        case Kind::Bool:
            if (!v.is_boolean()) throw bad();
            return v;
        case Kind::Point:
            if (!is_point(v)) throw bad();
            return v;
        case Kind::IntList:
            if (!v.is_array() || v.empty()) throw bad();
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (!v[i].is_number_integer()) throw bad();
                check_range(f, path + "[" + std::to_string(i) + "]", v[i].get<double>());
            }
            return v;
        default:
            if (!v.is_array() || v.empty()) throw bad();
            for (std::size_t i = 0; i < v.size(); ++i)
                if (!is_point(v[i])) throw ScenarioError(path + "[" + std::to_string(i) + "]", "must be a point [x, y]");
            return v;
    }
}

}  // namespace

std::vector<std::string> known_ops() {
    std::vector<std::string> out;
    for (const auto& [k, v] : schemas()) out.push_back(k);
    return out;
}

Scenario parse_scenario(const Json& doc) {
    if (!doc.is_object()) throw ScenarioError("(root)", "scenario must be a JSON object");
    static const std::set<std::string> top{"schema", "name", "seed", "output", "analyses"};
    for (const auto& [k, v] : doc.items())
        if (!top.count(k)) throw ScenarioError(k, "unknown field");
    if (!doc.contains("schema")) throw ScenarioError("schema", "missing");
    if (doc["schema"] != kSchema) throw ScenarioError("schema", std::string("must be \"") + kSchema + "\"");
    Scenario s;
    if (!doc.contains("name") || !doc["name"].is_string() || doc["name"].get<std::string>().empty())
        throw ScenarioError("name", "must be a non-empty string");
    s.name = doc["name"];
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) throw ScenarioError("seed", "must be a non-negative integer");
        s.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("output")) {
        if (!doc["output"].is_string()) throw ScenarioError("output", "must be a string");
        s.output = doc["output"];
    }
    if (!doc.contains("analyses") || !doc["analyses"].is_array() || doc["analyses"].empty())
        throw ScenarioError("analyses", "must be a non-empty list");

    std::set<std::string> ids;
    bool sampling = false;
    for (std::size_t i = 0; i < doc["analyses"].size(); ++i) {
        const Json& a = doc["analyses"][i];
        const std::string at = "analyses[" + std::to_string(i) + "]";
        if (!a.is_object()) throw ScenarioError(at, "must be an object");
        if (!a.contains("op") || !a["op"].is_string()) throw ScenarioError(at + ".op", "must be a string");
        const std::string op = a["op"];
        auto it = schemas().find(op);
        if (it == schemas().end()) throw ScenarioError(at + ".op", "unknown operation \"" + op + "\"");
        Analysis an;
        an.op = op;
        an.id = a.contains("id") ? (a["id"].is_string() ? a["id"].get<std::string>() : "") : op;
        if (an.id.empty() || an.id.find_first_of("/\\.") != std::string::npos)
            throw ScenarioError(at + ".id", "must be a non-empty name without path characters");
        if (!ids.insert(an.id).second) throw ScenarioError(at + ".id", "duplicate id \"" + an.id + "\"");
        std::set<std::string> allowed{"op", "id"};
        an.params = Json::object();
        for (const Field& f : it->second.fields) {
            allowed.insert(f.name);
            const std::string path = at + "." + f.name;
            if (a.contains(f.name)) an.params[f.name] = validate_field(f, path, a[f.name]);
            else if (f.required) throw ScenarioError(path, "missing");
            else an.params[f.name] = f.fallback;
        }
        for (const auto& [k, v] : a.items())
            if (!allowed.count(k)) throw ScenarioError(at + "." + k, "unknown field for " + op);
        if (an.params.contains("map") && an.params["map"] == "sphere-pseudo-anosov" && an.params.contains("resolution") &&
            an.params["resolution"].get<int>() % 2 != 0)
            throw ScenarioError(at + ".resolution", "must be even on the sphere quotient");
        sampling = sampling || it->second.samples;
        s.analyses.push_back(std::move(an));
    }
    if (sampling && !doc.contains("seed")) throw ScenarioError("seed", "required by sampling analyses");
    return s;
}

Scenario load_scenario(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("(file)", "cannot open " + path.string());
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ScenarioError("(syntax)", std::string("byte ") + std::to_string(e.byte) + ": invalid JSON");
    }
    return parse_scenario(doc);
}

int thread_count_from_env() {
    const char* v = std::getenv("CWLAB_THREADS");
    if (!v || !*v) return 1;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 1 || n > 256) return 1;
    return static_cast<int>(n);
}

// ---------------------------------------------------------------------------
// Analyses

namespace {

struct Artifact {
    std::string path;  // relative to the output directory
    std::string op;
};

struct Context {
    const Analysis& analysis;
    std::uint64_t seed;
    fs::path dir;  // out / id
    std::string rel;
    std::vector<Artifact> artifacts;

    fs::path file(const std::string& name, const std::string& op) {
        artifacts.push_back({rel + "/" + name, op});
        return dir / name;
    }
    const Json& p(const char* key) const { return analysis.params.at(key); }
};

Json num(double v) {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

Json point_json(Point p) { return Json::array({num(p.x), num(p.y)}); }
Point to_point(const Json& j) { return {j[0].get<double>(), j[1].get<double>()}; }

GraphLikeContinuum generator(const std::string& name, int res) {
    if (name == "flat") return make_flat_row(res);
    if (name == "cocarc") return make_cocarc(res);
    if (name == "sin") return make_sin_one_over_x(res);
    return make_cantor_square(res);
}

void write_field(Context& cx, const std::string& stem, const LabelField& f, const Json& diagnostics, const std::string& op) {
    io::write_label_field(cx.file(stem, op), f, diagnostics);
    // write_label_field appends the suffixes itself.
    cx.artifacts.back().path += ".pgm";
    cx.artifacts.push_back({cx.rel + "/" + stem + ".json", op});
}

void run_semicontinuity(Context& cx) {
    const std::string gen = cx.p("generator");
    std::vector<int> res = cx.p("resolutions").get<std::vector<int>>();
    std::map<int, LabelField> cache;
    DecompositionGenerator g = [&](int r) {
        auto it = cache.find(r);
        if (it == cache.end()) it = cache.emplace(r, flow_decomposition(generator(gen, r)).field).first;
        return it->second;
    };
    Json rep{{"generator", gen}, {"points", Json::array()}};
    std::vector<std::vector<std::string>> rows;
    std::vector<double> finest;
    for (const auto& pj : cx.p("points")) {
        const Point pt = to_point(pj);
        const SemicontinuityReport r = semicontinuity_profile(g, pt, res);
        Json entries = Json::array();
        for (const auto& e : r.entries) {
            entries.push_back({{"resolution", e.resolution},
                               {"cell_size", num(e.cell_size)},
                               {"upper_defect", num(e.upper_defect)},
                               {"symmetric_defect", num(e.symmetric_defect)},
                               {"worst_direction", e.worst_direction}});
            rows.push_back({io::format_number(pt.x), io::format_number(pt.y), std::to_string(e.resolution),
                            io::format_number(e.cell_size), io::format_number(e.upper_defect),
                            io::format_number(e.symmetric_defect), std::to_string(e.worst_direction)});
        }
        finest.push_back(r.entries.empty() ? 0.0 : r.entries.back().symmetric_defect);
        const bool continuous = !r.entries.empty() && r.entries.back().symmetric_defect <= 2.0 * r.entries.back().cell_size + 1e-12;
        rep["points"].push_back({{"point", point_json(pt)},
                                 {"upper_semicontinuous", r.upper_semicontinuous()},
                                 {"continuous", continuous},
                                 {"entries", entries}});
    }
    if (finest.size() >= 2) {
        const auto [lo, hi] = std::minmax_element(finest.begin(), finest.end());
        rep["symmetric_defect_spread"] = num(*hi - *lo);
    }
    io::write_json(cx.file("semicontinuity.json", "semicontinuity_profile"), rep);
    io::write_csv(cx.file("semicontinuity.csv", "semicontinuity_profile"),
                  {"x", "y", "resolution", "cell_size", "upper_defect", "symmetric_defect", "worst_direction"}, rows);
}

void run_flow(Context& cx) {
    const int res = cx.p("resolution");
    const GraphLikeContinuum c = generator(cx.p("generator"), res);
    const FlowDecomposition fd = flow_decomposition(c);
    const CwReport cw = is_cw_decomposition(fd.field, Disc::from_cells(fd.field.domain()));
    const QuotientGraph qg = quotient_graph(fd.field, false);
    Json diag{{"generator", cx.p("generator")},
              {"resolution", res},
              {"plaques", fd.field.plaque_count()},
              {"quotient_is_path", qg.is_path()},
              {"cw_decomposition", cw.ok},
              {"cw_diagnostics", cw.diagnostics},
              {"c_plaque", fd.c_plaque},
              {"contact_hausdorff", num(fd.upper_contact.empty() || fd.lower_contact.empty()
                                            ? INFINITY
                                            : hausdorff_distance(fd.upper_contact, fd.lower_contact))}};
    write_field(cx, "field", fd.field, diag, "flow_decomposition");
    io::write_cellset(cx.file("continuum.cws", "make_generator"), c.cells);
    io::write_cellset_pgm(cx.file("continuum.pgm", "make_generator"), c.cells);
    io::render_labels(cx.file("field.ppm", "flow_decomposition"), fd.field);
    cx.artifacts.push_back({cx.rel + "/field.ppm.legend.json", "flow_decomposition"});
    io::write_json(cx.file("report.json", "flow_decomposition"), diag);
}

void run_backgammon(Context& cx) {
    const int res = cx.p("resolution");
    const Backgammon bg = make_backgammon(res);
    std::vector<AtlasChart> charts;
    charts.push_back({Box::from_cells(bg.q_u.domain()), bg.q_u});
    charts.push_back({Box::from_cells(bg.q_v.domain()), bg.q_v});
    const Atlas a(Box::from_cells(bg.x, false), charts);
    const auto cr = compatibility_check(a);
    const CellSet lf = leaf(a, bg.x.cells()[0]);
    const auto comps = components(lf.intersect(bg.q_v.domain()));
    std::mt19937_64 rng(cx.seed);
    const auto vc = bg.q_v.domain().cells();
    Json gaps = Json::array();
    double min_gap = INFINITY;
    for (int k = 0; k < cx.p("samples").get<int>(); ++k) {
        const CellIndex p = vc[rng() % vc.size()];
        const Continuum* cc = nullptr;
        for (const auto& c : comps)
            if (c.set().contains(p)) cc = &c;
        const double g = hausdorff_distance(cc->set(), bg.q_v.plaque_at(p));
        min_gap = std::min(min_gap, g);
        gaps.push_back({{"point", point_json(bg.x.space().center(p))}, {"gap", num(g)}});
    }
    Json rep{{"resolution", res},
             {"depth", bg.depth},
             {"compatible", cr.ok},
             {"leaf_count", a.leaf_count()},
             {"leaf_equals_x", lf == bg.x},
             {"min_gap", num(min_gap)},
             {"gaps", gaps}};
    io::write_cellset(cx.file("x.cws", "make_backgammon"), bg.x);
    io::render_cellset(cx.file("x.ppm", "make_backgammon"), bg.x);
    cx.artifacts.push_back({cx.rel + "/x.ppm.legend.json", "make_backgammon"});
    io::write_json(cx.file("report.json", "leaf"), rep);
}

SurfaceMap map_of(const Context& cx) { return SurfaceMap::from_kind(map_kind_from_string(cx.p("map"))); }

void run_plaque(Context& cx) {
    const SurfaceMap m = map_of(cx);
    const GridSpace sp = m.make_space(cx.p("resolution"));
    StablePlaqueSpec request;
    request.base = to_point(cx.p("base"));
    request.delta = cx.p("delta");
    request.horizon = cx.p("horizon");
    request.direction = cx.p("direction") == "stable" ? Direction::Stable : Direction::Unstable;
    const FiniteHorizonPlaque pl = finite_horizon_plaque(m, request, sp);
    Json diam = Json::array();
    for (double d : pl.horizon_diameters) diam.push_back(num(d));
    std::vector<Point> pts(pl.lifts);
    Json rep{{"map", cx.p("map")},
             {"cells", pl.cells.set().size()},
             {"base_cell", pl.base_cell},
             {"diameter", num(diameter(pl.cells.set()))},
             {"principal_axis_angle", num(principal_axis_angle(pts))},
             {"horizon_diameters", diam}};
    io::write_cellset(cx.file("plaque.cws", "finite_horizon_plaque"), pl.cells.set());
    io::write_cellset_pgm(cx.file("plaque.pgm", "finite_horizon_plaque"), pl.cells.set());
    io::write_json(cx.file("report.json", "finite_horizon_plaque"), rep);
}

void run_cwn(Context& cx) {
    const SurfaceMap m = map_of(cx);
    const GridSpace sp = m.make_space(cx.p("resolution"));
    const CwnReport r = cwn_estimate(m, cx.p("delta"), cx.p("horizon"), cx.p("samples"), cx.seed, sp);
    Json samples = Json::array();
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
        const auto& s = r.samples[i];
        samples.push_back({{"x", point_json(s.x)}, {"y", point_json(s.y)}, {"count", s.count}, {"prong_distance", num(s.prong_distance)}});
        rows.push_back({std::to_string(i), io::format_number(s.x.x), io::format_number(s.x.y), io::format_number(s.y.x),
                        io::format_number(s.y.y), std::to_string(s.count), io::format_number(s.prong_distance)});
    }
    Json rep{{"map", cx.p("map")},
             {"resolution", sp.resolution()},
             {"delta", cx.p("delta")},
             {"horizon", cx.p("horizon")},
             {"seed", cx.seed},
             {"max_count", r.max_count},
             {"histogram", r.histogram},
             {"witnesses", r.witnesses},
             {"samples", samples}};
    io::write_json(cx.file("cwn.json", "cwn_estimate"), rep);
    io::write_csv(cx.file("cwn.csv", "cwn_estimate"), {"sample", "x0", "x1", "y0", "y1", "count", "prong_distance"}, rows);
}

void run_expansivity(Context& cx) {
    const SurfaceMap m = map_of(cx);
    Json entries = Json::array();
    std::vector<std::vector<std::string>> rows;
    for (int res : cx.p("resolutions").get<std::vector<int>>()) {
        const GridSpace sp = m.make_space(res);
        const ExpansivityFloor e = expansivity_floor(m, cx.p("horizon"), sp);
        entries.push_back({{"resolution", e.resolution}, {"value", num(e.value)}, {"at_grid_floor", e.at_grid_floor}});
        rows.push_back({std::to_string(e.resolution), io::format_number(e.value), e.at_grid_floor ? "true" : "false"});
    }
    io::write_json(cx.file("expansivity.json", "expansivity_floor"),
                   Json{{"map", cx.p("map")}, {"horizon", cx.p("horizon")}, {"entries", entries}});
    io::write_csv(cx.file("expansivity.csv", "expansivity_floor"), {"resolution", "value", "at_grid_floor"}, rows);
}

void run_cantor(Context& cx) {
    const SurfaceMap m = map_of(cx);
    const GridSpace sp = m.make_space(cx.p("resolution"));
    CantorParams cp;
    cp.eps = cx.p("eps");
    cp.levels = cx.p("levels");
    cp.orbit_budget = cx.p("orbit_budget");
    cp.horizon = cx.p("horizon");
    cp.seed = cx.seed;
    const CantorResult r = cantor_in_stable(m, cp, sp);
    Json pts = Json::array();
    for (std::size_t i = 0; i < r.points.size(); ++i)
        pts.push_back({{"point", point_json(r.points[i])}, {"arc_parameter", num(r.arc_parameters[i])}});
    Json offs = Json::array();
    for (double o : r.stable_offsets) offs.push_back(num(o));
    Json rep{{"map", cx.p("map")},
             {"complete", r.complete},
             {"level_reached", r.level_reached},
             {"diagnostic", r.diagnostic},
             {"base", point_json(r.base)},
             {"stable_offsets", offs},
             {"joint_stability", num(r.points.empty() ? 0.0 : joint_stability(m, r.points, cp.horizon))},
             {"points", pts}};
    io::write_json(cx.file("cantor.json", "cantor_in_stable"), rep);
}

void run_atlas(Context& cx) {
    const SurfaceMap m = map_of(cx);
    const GridSpace sp = m.make_space(cx.p("resolution"));
    const double scale = cx.p("scale");
    const Atlas a = stable_atlas(m, cx.p("delta"), cx.p("horizon"), scale, sp);
    const CompatibilityReport cr = compatibility_check(a);
    const GenericityReport g = leaf_genericity_report(a, cx.p("samples"), cx.seed);
    Json cert{{"ok", cr.ok}, {"pairs_checked", cr.pairs_checked}, {"charts", a.charts().size()}, {"plaques", a.plaque_count()}};
    const fs::path cert_path = cx.file("certificate.json", "compatibility_check");
    io::write_json(cert_path, cert);
    Json boxes = Json::array();
    const bool export_boxes = cx.p("export_boxes");
    int cw_failures = 0;
    for (std::size_t i = 0; i < a.charts().size(); ++i) {
        const auto& ch = a.charts()[i];
        const bool ok = is_cw_decomposition(ch.field, ch.box.disc()).ok;
        cw_failures += ok ? 0 : 1;
        const auto cells = ch.box.cells.cells();
        Json b{{"index", i},
               {"cells", cells.size()},
               {"cols", {sp.col(cells.front()), sp.col(cells.back())}},
               {"rows", {sp.row(cells.front()), sp.row(cells.back())}},
               {"plaques", ch.field.plaque_count()},
               {"cw_decomposition", ok}};
        if (export_boxes) {
            const std::string stem = "boxes/box" + std::to_string(i);
            write_field(cx, stem, ch.field, Json{{"box", i}}, "stable_atlas");
            b["raster"] = stem + ".pgm";
        }
        boxes.push_back(b);
    }
    Json manifest{{"map", cx.p("map")},
                  {"resolution", sp.resolution()},
                  {"scale", scale},
                  {"delta", cx.p("delta")},
                  {"horizon", cx.p("horizon")},
                  {"certificate", "certificate.json"},
                  {"certificate_hash", io::file_hash(cert_path)},
                  {"cw_failures", cw_failures},
                  {"boxes", boxes}};
    io::write_json(cx.file("atlas.json", "stable_atlas"), manifest);
    Json gen{{"samples", g.samples},
             {"branched", g.branched},
             {"branch_free_fraction", num(g.branch_free_fraction)},
             {"branch_witnesses", g.branch_witnesses}};
    io::write_json(cx.file("genericity.json", "leaf_genericity_report"), gen);
}

using Runner = std::function<void(Context&)>;

const std::map<std::string, Runner>& runners() {
    static const std::map<std::string, Runner> r{
        {"semicontinuity", run_semicontinuity}, {"flow_decomposition", run_flow},   {"backgammon", run_backgammon},
        {"finite_horizon_plaque", run_plaque},  {"cwn_estimate", run_cwn},         {"expansivity_floor", run_expansivity},
        {"cantor_in_stable", run_cantor},       {"stable_atlas", run_atlas},
    };
    return r;
}

struct Outcome {
    bool ok = true;
    std::string error;
    std::vector<Artifact> artifacts;
};

}  // namespace

RunSummary run_scenario(const Scenario& s, const fs::path& scenario_path, const fs::path& out, int threads) {
    fs::create_directories(out);
    std::vector<Outcome> outcomes(s.analyses.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < s.analyses.size(); i = next++) {
            const Analysis& an = s.analyses[i];
            Context cx{an, s.seed, out / an.id, an.id, {}};
            fs::create_directories(cx.dir);
            try {
                runners().at(an.op)(cx);
            } catch (const std::exception& e) {
                outcomes[i].ok = false;
                outcomes[i].error = e.what();
                io::write_json(cx.file("error.json", an.op), Json{{"op", an.op}, {"error", e.what()}});
            }
            outcomes[i].artifacts = std::move(cx.artifacts);
        }
    };
    std::vector<std::thread> pool;
    const int n = std::max(1, std::min<int>(threads, static_cast<int>(s.analyses.size())));
    for (int t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    RunSummary sum;
    Json analyses = Json::array();
    for (std::size_t i = 0; i < s.analyses.size(); ++i) {
        const auto& an = s.analyses[i];
        Json arts = Json::array();
        for (const auto& a : outcomes[i].artifacts)
            arts.push_back({{"path", a.path}, {"op", a.op}, {"hash", io::file_hash(out / a.path)}});
        Json entry{{"id", an.id}, {"op", an.op}, {"params", an.params}, {"status", outcomes[i].ok ? "ok" : "error"}};
        if (!outcomes[i].ok) entry["error"] = outcomes[i].error;
        entry["artifacts"] = arts;
        analyses.push_back(entry);
        if (!outcomes[i].ok) ++sum.failed;
    }
    Json manifest{{"tool", "cwlab"},
                  {"version", kToolVersion},
                  {"schema", kSchema},
                  {"scenario", s.name},
                  {"scenario_hash", io::file_hash(scenario_path)},
                  {"seed", s.seed},
                  {"threads", threads},
                  {"hash_algorithm", "fnv1a-64"},
                  {"analyses", analyses}};
    sum.manifest = out / "manifest.json";
    io::write_json(sum.manifest, manifest);
    return sum;
}

}  // namespace cwlab::cli
