#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "pmelab/grid.hpp"

namespace pmelab {

nlohmann::json grid_to_json(const Grid& grid);
Grid grid_from_json(const nlohmann::json& j);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

/// Writes `path` as CSV (`t,x[,y],value`, time-major, x fastest) and the
/// grid descriptor to the sidecar `path` with extension `.json`.
void write_field_csv(const Field& field, const std::filesystem::path& path);
Field read_field_csv(const std::filesystem::path& path);

/// Checkpoint layout: `dir/grid.json` plus `dir/<prefix>_NNNNN.csv` for
/// every `stride`-th time slice (the last slice is always written).
void write_checkpoint(const Field& field, const std::filesystem::path& dir,
                      const std::string& prefix = "slice", int stride = 1);

void write_json(const nlohmann::json& j, const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace pmelab
