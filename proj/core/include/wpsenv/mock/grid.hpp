#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wpsenv::mock {

/// ASCII grid. Row 0 is the northmost row.
struct Grid {
  std::size_t ncols = 0;
  std::size_t nrows = 0;
  double xll = 0;
  double yll = 0;
  double cellsize = 1;
  double nodata = -9999;
  std::vector<double> cells;  // row-major, nrows * ncols

  double& at(std::size_t row, std::size_t col) { return cells[row * ncols + col]; }
  double at(std::size_t row, std::size_t col) const { return cells[row * ncols + col]; }
  double sum() const;
  bool operator==(const Grid&) const = default;
};

/// Zero-filled grid; throws ValidationError on non-positive sizes.
Grid make_grid(std::size_t ncols, std::size_t nrows, double xll, double yll, double cellsize, double nodata = -9999);

/// Full file: six header lines then nrows rows of ncols values.
Grid read_grid(std::string_view text);
/// Header only (any data rows are ignored); cells zero-filled.
Grid read_grid_header(std::string_view text);
std::string write_grid(const Grid& g);

struct PointSource {
  double x = 0, y = 0, q = 0;
};

struct RoadSource {
  std::string id;
  std::vector<std::pair<double, double>> vertices;
  double q = 0;
};

/// CSV with header `x,y,q`.
std::vector<PointSource> read_points(std::string_view csv);
/// CSV with header `id,wkt,q`; wkt is a quoted LINESTRING.
std::vector<RoadSource> read_roads(std::string_view csv);
std::vector<std::pair<double, double>> parse_linestring(std::string_view wkt);

/// Containing cell as (row, col) with row 0 northmost, or false when the
/// point lies outside the grid. Points on the max edges fall into the last
/// row/column.
bool locate(const Grid& g, double x, double y, std::size_t& row, std::size_t& col);

struct BinStats {
  std::size_t skipped = 0;  // sources or samples outside the grid
};

Grid vector2grid(const std::vector<PointSource>& points, const Grid& spec, BinStats* stats = nullptr);
Grid road2grid(const std::vector<RoadSource>& roads, const Grid& spec, double sumpol, BinStats* stats = nullptr);
/// Throws ValidationError when the headers differ (tolerance 1e-9).
Grid g_sum(const Grid& a, const Grid& b);

}  // namespace wpsenv::mock
