#include "pmelab/field_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pmelab/error.hpp"

namespace pmelab {

namespace fs = std::filesystem;
using nlohmann::json;

json grid_to_json(const Grid& grid) {
  json ext = json::array();
  json nx = json::array();
  for (int a = 0; a < grid.n; ++a) {
    ext.push_back({grid.extents[a].lo, grid.extents[a].hi});
    nx.push_back(grid.nx[a]);
  }
  return {{"n", grid.n}, {"extents", ext}, {"nx", nx},
          {"t0", grid.t0}, {"t1", grid.t1}, {"nt", grid.nt}};
}

Grid grid_from_json(const json& j) {
  try {
    const int n = j.at("n").get<int>();
    std::vector<Interval> ext;
    std::vector<int> nx;
    for (const auto& e : j.at("extents")) ext.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
    for (const auto& v : j.at("nx")) nx.push_back(v.get<int>());
    return make_grid(n, ext, nx, j.at("t0").get<double>(), j.at("t1").get<double>(),
                     j.at("nt").get<int>());
  } catch (const json::exception& e) {
    fail(Errc::invalid_argument, std::string("malformed grid descriptor: ") + e.what());
  }
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) fail(Errc::io_error, "cannot open " + path.string() + " for writing");
  return os;
}

void write_slice_rows(std::ostream& os, const Field& field, int k) {
  const Grid& g = field.grid();
  const std::string t = format_double(g.time(k));
  const auto vals = field.slice(k);
  for (std::size_t c = 0; c < g.cells(); ++c) {
    const Point p = g.point(c);
    os << t << ',' << format_double(p[0]);
    if (g.n == 2) os << ',' << format_double(p[1]);
    os << ',' << format_double(vals[c]) << '\n';
  }
}

const char* csv_header(int n) { return n == 2 ? "t,x,y,value\n" : "t,x,value\n"; }

}  // namespace

void write_json(const json& j, const fs::path& path) {
  auto os = open_out(path);
  os << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream is(path);
  if (!is) fail(Errc::io_error, "cannot open " + path.string());
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    fail(Errc::io_error, path.string() + ": " + e.what());
  }
}

void write_field_csv(const Field& field, const fs::path& path) {
  auto os = open_out(path);
  os << csv_header(field.grid().n);
  for (int k = 0; k < field.grid().slices(); ++k) write_slice_rows(os, field, k);
  json side = {{"grid", grid_to_json(field.grid())}, {"name", field.name()}};
  fs::path sidecar = path;
  sidecar.replace_extension(".json");
  write_json(side, sidecar);
}

Field read_field_csv(const fs::path& path) {
  fs::path sidecar = path;
  sidecar.replace_extension(".json");
  const json side = read_json(sidecar);
  const Grid g = grid_from_json(side.at("grid"));

  std::ifstream is(path);
  if (!is) fail(Errc::io_error, "cannot open " + path.string());
  std::string line;
  std::getline(is, line);
  if (line + "\n" != csv_header(g.n))
    fail(Errc::io_error, path.string() + ": unexpected header '" + line + "'");

  std::vector<double> values;
  values.reserve(g.cells() * g.slices());
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto pos = line.rfind(',');
    double v = 0.0;
    const char* first = line.data() + pos + 1;
    auto res = std::from_chars(first, line.data() + line.size(), v);
    if (res.ec != std::errc()) fail(Errc::io_error, path.string() + ": bad value in '" + line + "'");
    values.push_back(v);
  }
  if (values.size() != g.cells() * g.slices())
    fail(Errc::io_error, path.string() + ": row count does not match grid");
  return Field(g, std::move(values), side.value("name", std::string("field")));
}

void write_checkpoint(const Field& field, const fs::path& dir, const std::string& prefix,
                      int stride) {
  if (stride < 1) fail(Errc::invalid_argument, "checkpoint stride must be >= 1");
  fs::create_directories(dir);
  write_json({{"grid", grid_to_json(field.grid())}, {"name", field.name()}, {"stride", stride}},
             dir / "grid.json");
  const int last = field.grid().nt;
  for (int k = 0; k <= last; ++k) {
    if (k % stride != 0 && k != last) continue;
    char name[64];
    std::snprintf(name, sizeof name, "%s_%05d.csv", prefix.c_str(), k);
    auto os = open_out(dir / name);
    os << csv_header(field.grid().n);
    write_slice_rows(os, field, k);
  }
}

}  // namespace pmelab
