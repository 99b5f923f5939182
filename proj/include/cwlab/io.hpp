#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cwlab/decomposition.hpp"
#include "cwlab/geometry.hpp"

namespace cwlab::io {

using Json = nlohmann::ordered_json;

Json space_header(const GridSpace& space);
GridSpace space_from_header(const Json& header);

/// Versioned binary container: magic, version, JSON space header, then runs per row.
void write_cellset(const std::filesystem::path& path, const CellSet& s);
CellSet read_cellset(const std::filesystem::path& path);

/// 8-bit PGM, member cells white, top image row is the top chart row.
void write_cellset_pgm(const std::filesystem::path& path, const CellSet& s);

/// `<base>.pgm` holds 16-bit labels (plaque id + 1, 0 off the domain); `<base>.json` is the sidecar.
void write_label_field(const std::filesystem::path& base, const LabelField& f, const Json& diagnostics = Json::object());
LabelField read_label_field(const std::filesystem::path& base);

/// Color raster (binary PPM) with a fixed palette by label id, plus `<path>.legend.json`.
void render_labels(const std::filesystem::path& path, const LabelField& f);
void render_cellset(const std::filesystem::path& path, const CellSet& s);

/// Whole-file writes go through a temporary and a rename.
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const Json& j);
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
Json read_json(const std::filesystem::path& path);

/// 64-bit FNV-1a of the file bytes, as 16 hex digits.
std::string file_hash(const std::filesystem::path& path);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

}  // namespace cwlab::io
