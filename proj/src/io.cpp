#include "cwlab/io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>

namespace cwlab::io {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'C', 'W', 'C', 'S'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

class Reader {
public:
    explicit Reader(std::string bytes) : bytes_(std::move(bytes)) {}
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }
    std::string take(std::size_t n) {
        need(n);
        std::string s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    bool done() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) throw Error("corrupt cell set file: truncated");
    }
    std::string bytes_;
    std::size_t pos_ = 0;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

fs::path with_suffix(const fs::path& base, const std::string& suffix) {
    return fs::path(base.string() + suffix);
}

// PGM/PPM header: magic, width, height, maxval, single whitespace.
struct Netpbm {
    std::string magic;
    int width = 0, height = 0, maxval = 0;
    std::size_t data = 0;
};

Netpbm parse_netpbm(const std::string& bytes) {
    Netpbm h;
    std::size_t pos = 0;
    auto token = [&]() {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
                ++pos;
            } else {
                break;
            }
        }
        const std::size_t start = pos;
        while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
        if (start == pos) throw Error("corrupt raster: truncated header");
        return bytes.substr(start, pos - start);
    };
    auto number = [&]() {
        const std::string t = token();
        int v = 0;
        auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || p != t.data() + t.size() || v <= 0) throw Error("corrupt raster: bad header field");
        return v;
    };
    h.magic = token();
    h.width = number();
    h.height = number();
    h.maxval = number();
    h.data = pos + 1;
    return h;
}

std::array<unsigned char, 3> palette(int label) {
    if (label < 0) return {0, 0, 0};
    // Golden-angle hue walk with three lightness tiers.
    const double hue = std::fmod(label * 0.6180339887498949, 1.0) * 6.0;
    const double light = 0.55 + 0.15 * (label % 3);
    const int sector = static_cast<int>(hue);
    const double f = hue - sector;
    const double lo = light * 0.35, hi = light;
    const double up = lo + (hi - lo) * f, down = hi - (hi - lo) * f;
    double r = 0, g = 0, b = 0;
    switch (sector % 6) {
        case 0: r = hi, g = up, b = lo; break;
        case 1: r = down, g = hi, b = lo; break;
        case 2: r = lo, g = hi, b = up; break;
        case 3: r = lo, g = down, b = hi; break;
        case 4: r = up, g = lo, b = hi; break;
        default: r = hi, g = lo, b = down; break;
    }
    auto byte = [](double v) { return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
    return {byte(r), byte(g), byte(b)};
}

void write_ppm(const fs::path& path, const GridSpace& sp, const std::vector<int>& labels) {
    std::string out = "P6\n" + std::to_string(sp.width()) + " " + std::to_string(sp.height()) + "\n255\n";
    for (int r = sp.height() - 1; r >= 0; --r)
        for (int c = 0; c < sp.width(); ++c) {
            const auto rgb = palette(labels[static_cast<std::size_t>(sp.index(c, r))]);
            out.append(reinterpret_cast<const char*>(rgb.data()), 3);
        }
    write_text(path, out);
}

}  // namespace

Json space_header(const GridSpace& space) {
    const auto& b = space.bounds();
    return Json{{"kind", to_string(space.kind())},
                {"resolution", space.resolution()},
                {"bounds", {b.x0, b.x1, b.y0, b.y1}},
                {"width", space.width()},
                {"height", space.height()}};
}

GridSpace space_from_header(const Json& header) {
    try {
        const SpaceKind kind = space_kind_from_string(header.at("kind").get<std::string>());
        const int res = header.at("resolution").get<int>();
        GridSpace sp;
        if (kind == SpaceKind::Torus) sp = GridSpace::torus(res);
        else if (kind == SpaceKind::SphereQuotient) sp = GridSpace::sphere_quotient(res);
        else {
            const auto& b = header.at("bounds");
            if (!b.is_array() || b.size() != 4) throw Error("bounds must have four entries");
            sp = GridSpace::rectangle({b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()}, res);
        }
        if (header.contains("width") && (header["width"].get<int>() != sp.width() || header["height"].get<int>() != sp.height()))
            throw Error("grid size does not match the header");
        return sp;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("bad space header: ") + e.what());
    }
}

void write_cellset(const fs::path& path, const CellSet& s) {
    const auto& sp = s.space();
    std::string out(kMagic, 4);
    put_u32(out, kVersion);
    const std::string header = space_header(sp).dump();
    put_u32(out, static_cast<std::uint32_t>(header.size()));
    out += header;
    const auto cells = s.cells();
    std::size_t k = 0;
    for (int r = 0; r < sp.height(); ++r) {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> runs;
        while (k < cells.size() && sp.row(cells[k]) == r) {
            const int start = sp.col(cells[k]);
            int len = 1;
            ++k;
            while (k < cells.size() && sp.row(cells[k]) == r && sp.col(cells[k]) == start + len) ++len, ++k;
            runs.emplace_back(static_cast<std::uint32_t>(start), static_cast<std::uint32_t>(len));
        }
        put_u32(out, static_cast<std::uint32_t>(runs.size()));
        for (auto [a, n] : runs) {
            put_u32(out, a);
            put_u32(out, n);
        }
    }
    write_text(path, out);
}

CellSet read_cellset(const fs::path& path) {
    Reader in(slurp(path));
    if (in.take(4) != std::string(kMagic, 4)) throw Error("corrupt cell set file: bad magic");
    const std::uint32_t version = in.u32();
    if (version != kVersion) throw Error("unsupported cell set version " + std::to_string(version));
    const std::uint32_t hlen = in.u32();
    Json header;
    try {
        header = Json::parse(in.take(hlen));
    } catch (const nlohmann::json::exception&) {
        throw Error("corrupt cell set file: bad header");
    }
    const GridSpace sp = space_from_header(header);
    std::vector<CellIndex> cells;
    for (int r = 0; r < sp.height(); ++r) {
        const std::uint32_t n = in.u32();
        int last_end = -1;
        for (std::uint32_t i = 0; i < n; ++i) {
            const std::uint32_t a = in.u32(), len = in.u32();
            if (len == 0 || static_cast<std::int64_t>(a) <= last_end || a + static_cast<std::uint64_t>(len) > static_cast<std::uint64_t>(sp.width()))
                throw Error("corrupt cell set file: bad run in row " + std::to_string(r));
            for (std::uint32_t c = a; c < a + len; ++c) cells.push_back(sp.index(static_cast<int>(c), r));
            last_end = static_cast<int>(a + len);
        }
    }
    if (!in.done()) throw Error("corrupt cell set file: trailing bytes");
    return CellSet(sp, std::move(cells));
}

void write_cellset_pgm(const fs::path& path, const CellSet& s) {
    const auto& sp = s.space();
    const auto mask = s.mask();
    std::string out = "P5\n" + std::to_string(sp.width()) + " " + std::to_string(sp.height()) + "\n255\n";
    for (int r = sp.height() - 1; r >= 0; --r)
        for (int c = 0; c < sp.width(); ++c) out.push_back(mask[static_cast<std::size_t>(sp.index(c, r))] ? '\xff' : '\0');
    write_text(path, out);
}

void write_label_field(const fs::path& base, const LabelField& f, const Json& diagnostics) {
    const auto& sp = f.space();
    if (f.plaque_count() > 65534) throw Error("too many plaques for a 16-bit raster");
    std::vector<std::uint16_t> raster(static_cast<std::size_t>(sp.cell_count()), 0);
    const auto cells = f.domain().cells();
    for (std::size_t i = 0; i < cells.size(); ++i)
        raster[static_cast<std::size_t>(cells[i])] = static_cast<std::uint16_t>(f.labels()[i] + 1);
    std::string out = "P5\n" + std::to_string(sp.width()) + " " + std::to_string(sp.height()) + "\n65535\n";
    for (int r = sp.height() - 1; r >= 0; --r)
        for (int c = 0; c < sp.width(); ++c) {
            const std::uint16_t v = raster[static_cast<std::size_t>(sp.index(c, r))];
            out.push_back(static_cast<char>(v >> 8));
            out.push_back(static_cast<char>(v & 0xff));
        }
    write_text(with_suffix(base, ".pgm"), out);
    Json side{{"format", "cwlab-label-field"},
              {"version", 1},
              {"space", space_header(sp)},
              {"domain_size", f.domain().size()},
              {"plaque_count", f.plaque_count()},
              {"diagnostics", diagnostics}};
    write_json(with_suffix(base, ".json"), side);
}

LabelField read_label_field(const fs::path& base) {
    const Json side = read_json(with_suffix(base, ".json"));
    if (side.value("format", "") != "cwlab-label-field") throw Error("not a label field sidecar");
    const GridSpace sp = space_from_header(side.at("space"));
    const std::string bytes = slurp(with_suffix(base, ".pgm"));
    const Netpbm h = parse_netpbm(bytes);
    if (h.magic != "P5" || h.maxval != 65535) throw Error("label raster must be a 16-bit PGM");
    if (h.width != sp.width() || h.height != sp.height()) throw Error("label raster size does not match the sidecar");
    const std::size_t n = static_cast<std::size_t>(sp.cell_count());
    if (bytes.size() != h.data + 2 * n) throw Error("corrupt label raster: wrong data length");
    std::vector<CellIndex> cells;
    std::vector<int> labels;
    // Rows are stored top first; collect in ascending cell order.
    for (int r = 0; r < sp.height(); ++r)
        for (int c = 0; c < sp.width(); ++c) {
            const std::size_t at = h.data + 2 * (static_cast<std::size_t>(sp.height() - 1 - r) * static_cast<std::size_t>(sp.width()) + static_cast<std::size_t>(c));
            const int v = (static_cast<unsigned char>(bytes[at]) << 8) | static_cast<unsigned char>(bytes[at + 1]);
            if (v == 0) continue;
            cells.push_back(sp.index(c, r));
            labels.push_back(v - 1);
        }
    LabelField f = LabelField::from_labels(CellSet(sp, cells), labels);
    if (f.plaque_count() != side.at("plaque_count").get<int>()) throw Error("plaque count does not match the sidecar");
    return f;
}

void render_labels(const fs::path& path, const LabelField& f) {
    const auto& sp = f.space();
    std::vector<int> labels(static_cast<std::size_t>(sp.cell_count()), -1);
    const auto cells = f.domain().cells();
    for (std::size_t i = 0; i < cells.size(); ++i) labels[static_cast<std::size_t>(cells[i])] = f.labels()[i];
    write_ppm(path, sp, labels);
    Json legend{{"space", space_header(sp)}, {"background", {0, 0, 0}}, {"plaques", Json::array()}};
    for (int p = 0; p < f.plaque_count(); ++p) {
        const auto rgb = palette(p);
        legend["plaques"].push_back({{"id", p}, {"cells", f.plaque_cells(p).size()}, {"rgb", {rgb[0], rgb[1], rgb[2]}}});
    }
    write_json(with_suffix(path, ".legend.json"), legend);
}

void render_cellset(const fs::path& path, const CellSet& s) {
    const auto& sp = s.space();
    std::vector<int> labels(static_cast<std::size_t>(sp.cell_count()), -1);
    for (CellIndex c : s.cells()) labels[static_cast<std::size_t>(c)] = 0;
    write_ppm(path, sp, labels);
    const auto rgb = palette(0);
    write_json(with_suffix(path, ".legend.json"),
               Json{{"space", space_header(sp)}, {"background", {0, 0, 0}}, {"set", {{"cells", s.size()}, {"rgb", {rgb[0], rgb[1], rgb[2]}}}}});
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = with_suffix(path, ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + path.string());
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out) throw Error("write failed for " + path.string());
    }
    fs::rename(tmp, path);
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    auto line = [](const std::vector<std::string>& cells) {
        std::string s;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) s += ',';
            if (cells[i].find_first_of(",\"\n") != std::string::npos) {
                s += '"';
                for (char ch : cells[i]) s += ch == '"' ? std::string("\"\"") : std::string(1, ch);
                s += '"';
            } else {
                s += cells[i];
            }
        }
        return s + "\n";
    };
    std::string out = line(header);
    for (const auto& r : rows) out += line(r);
    write_text(path, out);
}

Json read_json(const fs::path& path) {
    try {
        return Json::parse(slurp(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error("corrupt JSON in " + path.string() + ": " + e.what());
    }
}

std::string file_hash(const fs::path& path) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : slurp(path)) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
}

std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    std::array<char, 32> buf{};
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), p);
}

}  // namespace cwlab::io
