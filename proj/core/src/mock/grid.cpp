#include "wpsenv/mock/grid.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include "wpsenv/error.hpp"
#include "wpsenv/numfmt.hpp"

namespace wpsenv::mock {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return out;
}

std::vector<std::string_view> words(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double number(std::string_view tok, const std::string& what) {
  auto v = parse_number(trim(tok));
  if (!v || !std::isfinite(*v)) throw ValidationError(what + ": not a number '" + std::string(trim(tok)) + "'");
  return *v;
}

std::size_t count(std::string_view tok, const std::string& what) {
  double v = number(tok, what);
  if (v < 1 || std::floor(v) != v || v > 1e7) throw ValidationError(what + " must be a positive integer");
  return static_cast<std::size_t>(v);
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Parses the header; returns the index of the first data line.
size_t parse_header(const std::vector<std::string_view>& lines, Grid& g) {
  std::map<std::string, std::string_view> h;
  size_t i = 0;
  for (; i < lines.size() && h.size() < 6; ++i) {
    auto w = words(lines[i]);
    if (w.empty()) continue;
    if (w.size() != 2 || !std::isalpha(static_cast<unsigned char>(w[0][0]))) break;
    std::string key = lower(w[0]);
    if (!h.emplace(key, w[1]).second) throw ValidationError("grid header repeats " + key);
  }
  for (const char* k : {"ncols", "nrows", "xllcorner", "yllcorner", "cellsize"})
    if (!h.count(k)) throw ValidationError(std::string("grid header lacks ") + k);
  g.ncols = count(h["ncols"], "ncols");
  g.nrows = count(h["nrows"], "nrows");
  if (g.ncols * g.nrows > 10'000'000) throw ValidationError("grid too large");
  g.xll = number(h["xllcorner"], "xllcorner");
  g.yll = number(h["yllcorner"], "yllcorner");
  g.cellsize = number(h["cellsize"], "cellsize");
  if (g.cellsize <= 0) throw ValidationError("cellsize must be positive");
  g.nodata = h.count("nodata_value") ? number(h["nodata_value"], "nodata_value") : -9999;
  for (const auto& [k, v] : h)
    if (k != "ncols" && k != "nrows" && k != "xllcorner" && k != "yllcorner" && k != "cellsize" &&
        k != "nodata_value")
      throw ValidationError("unknown grid header key " + k);
  g.cells.assign(g.ncols * g.nrows, 0.0);
  return i;
}

// Splits one CSV record honoring double quotes.
std::vector<std::string> csv_fields(std::string_view line, size_t lineno) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  if (quoted) throw ValidationError("bad CSV: unterminated quote on line " + std::to_string(lineno));
  return out;
}

void expect_header(const std::vector<std::string_view>& lines, size_t& i, const std::vector<std::string>& want) {
  while (i < lines.size() && trim(lines[i]).empty()) ++i;
  if (i == lines.size()) throw ValidationError("bad CSV: missing header");
  auto got = csv_fields(lines[i], i + 1);
  bool ok = got.size() == want.size();
  for (size_t k = 0; ok && k < want.size(); ++k) ok = lower(trim(got[k])) == want[k];
  if (!ok) {
    std::string w;
    for (const auto& s : want) w += (w.empty() ? "" : ",") + s;
    throw ValidationError("bad CSV: header must be " + w);
  }
  ++i;
}

}  // namespace

double Grid::sum() const {
  double s = 0;
  for (double c : cells) s += c;
  return s;
}

Grid make_grid(std::size_t ncols, std::size_t nrows, double xll, double yll, double cellsize, double nodata) {
  if (ncols == 0 || nrows == 0) throw ValidationError("grid dimensions must be positive");
  if (!(cellsize > 0)) throw ValidationError("cellsize must be positive");
  Grid g{ncols, nrows, xll, yll, cellsize, nodata, {}};
  g.cells.assign(ncols * nrows, 0.0);
  return g;
}

Grid read_grid(std::string_view text) {
  auto lines = lines_of(text);
  Grid g;
  size_t i = parse_header(lines, g);
  size_t row = 0;
  for (; i < lines.size(); ++i) {
    auto w = words(lines[i]);
    if (w.empty()) continue;
    if (row == g.nrows) throw ValidationError("grid has more than " + std::to_string(g.nrows) + " rows");
    if (w.size() != g.ncols)
      throw ValidationError("grid row " + std::to_string(row) + " has " + std::to_string(w.size()) + " values, expected " +
                            std::to_string(g.ncols));
    for (size_t c = 0; c < g.ncols; ++c) g.at(row, c) = number(w[c], "grid cell");
    ++row;
  }
  if (row != g.nrows) throw ValidationError("grid has " + std::to_string(row) + " rows, expected " + std::to_string(g.nrows));
  return g;
}

Grid read_grid_header(std::string_view text) {
  Grid g;
  parse_header(lines_of(text), g);
  return g;
}

std::string write_grid(const Grid& g) {
  std::string out;
  out += "ncols " + std::to_string(g.ncols) + "\n";
  out += "nrows " + std::to_string(g.nrows) + "\n";
  out += "xllcorner " + format_number(g.xll) + "\n";
  out += "yllcorner " + format_number(g.yll) + "\n";
  out += "cellsize " + format_number(g.cellsize) + "\n";
  out += "nodata_value " + format_number(g.nodata) + "\n";
  for (size_t r = 0; r < g.nrows; ++r) {
    for (size_t c = 0; c < g.ncols; ++c) out += (c ? " " : "") + format_number(g.at(r, c));
    out += "\n";
  }
  return out;
}

std::vector<PointSource> read_points(std::string_view csv) {
  auto lines = lines_of(csv);
  size_t i = 0;
  expect_header(lines, i, {"x", "y", "q"});
  std::vector<PointSource> out;
  for (; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    auto f = csv_fields(lines[i], i + 1);
    std::string where = "bad CSV line " + std::to_string(i + 1);
    if (f.size() != 3) throw ValidationError(where + ": expected 3 fields");
    PointSource p{number(f[0], where), number(f[1], where), number(f[2], where)};
    if (p.q < 0) throw ValidationError(where + ": q must be non-negative");
    out.push_back(p);
  }
  return out;
}

std::vector<std::pair<double, double>> parse_linestring(std::string_view wkt) {
  std::string_view s = trim(wkt);
  auto fail = [&]() { return ValidationError("bad WKT LINESTRING: '" + std::string(s) + "'"); };
  if (lower(s.substr(0, std::min<size_t>(s.size(), 10))) != "linestring") throw fail();
  std::string_view body = trim(s.substr(10));
  if (body.size() < 2 || body.front() != '(' || body.back() != ')') throw fail();
  body = body.substr(1, body.size() - 2);
  std::vector<std::pair<double, double>> out;
  size_t start = 0;
  for (;;) {
    auto comma = body.find(',', start);
    auto w = words(body.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (w.size() != 2) throw fail();
    auto x = parse_number(w[0]), y = parse_number(w[1]);
    if (!x || !y || !std::isfinite(*x) || !std::isfinite(*y)) throw fail();
    out.emplace_back(*x, *y);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.size() < 2) throw fail();
  return out;
}

std::vector<RoadSource> read_roads(std::string_view csv) {
  auto lines = lines_of(csv);
  size_t i = 0;
  expect_header(lines, i, {"id", "wkt", "q"});
  std::vector<RoadSource> out;
  for (; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    auto f = csv_fields(lines[i], i + 1);
    std::string where = "bad CSV line " + std::to_string(i + 1);
    if (f.size() != 3) throw ValidationError(where + ": expected 3 fields");
    RoadSource r{std::string(trim(f[0])), parse_linestring(f[1]), number(f[2], where)};
    if (r.q < 0) throw ValidationError(where + ": q must be non-negative");
    out.push_back(std::move(r));
  }
  return out;
}

bool locate(const Grid& g, double x, double y, std::size_t& row, std::size_t& col) {
  double maxx = g.xll + static_cast<double>(g.ncols) * g.cellsize;
  double maxy = g.yll + static_cast<double>(g.nrows) * g.cellsize;
  if (!(x >= g.xll && x <= maxx && y >= g.yll && y <= maxy)) return false;
  auto c = static_cast<std::size_t>(std::floor((x - g.xll) / g.cellsize));
  auto s = static_cast<std::size_t>(std::floor((y - g.yll) / g.cellsize));
  col = std::min(c, g.ncols - 1);
  row = g.nrows - 1 - std::min(s, g.nrows - 1);
  return true;
}

Grid vector2grid(const std::vector<PointSource>& points, const Grid& spec, BinStats* stats) {
  Grid g = make_grid(spec.ncols, spec.nrows, spec.xll, spec.yll, spec.cellsize, spec.nodata);
  std::size_t skipped = 0;
  for (const auto& p : points) {
    std::size_t r, c;
    if (locate(g, p.x, p.y, r, c))
      g.at(r, c) += p.q;
    else
      ++skipped;
  }
  if (stats) stats->skipped = skipped;
  return g;
}

Grid road2grid(const std::vector<RoadSource>& roads, const Grid& spec, double sumpol, BinStats* stats) {
  if (!(sumpol >= 0) || !std::isfinite(sumpol)) throw ValidationError("sumpol must be a non-negative number");
  Grid g = make_grid(spec.ncols, spec.nrows, spec.xll, spec.yll, spec.cellsize, spec.nodata);
  std::size_t skipped = 0;
  auto deposit = [&](double x, double y, double amount) {
    std::size_t r, c;
    if (locate(g, x, y, r, c))
      g.at(r, c) += amount;
    else
      ++skipped;
  };
  for (const auto& road : roads) {
    if (road.q == 0) continue;
    std::vector<double> seg;
    double length = 0;
    for (size_t i = 1; i < road.vertices.size(); ++i) {
      seg.push_back(std::hypot(road.vertices[i].first - road.vertices[i - 1].first,
                               road.vertices[i].second - road.vertices[i - 1].second));
      length += seg.back();
    }
    if (length == 0) {
      deposit(road.vertices[0].first, road.vertices[0].second, sumpol * road.q);
      continue;
    }
    auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(length / (g.cellsize / 2))));
    double share = sumpol * road.q / static_cast<double>(n);
    size_t k = 0;
    double walked = 0;  // arclength at the start of segment k
    for (size_t i = 0; i < n; ++i) {
      double s = (static_cast<double>(i) + 0.5) * length / static_cast<double>(n);
      while (k + 1 < seg.size() && s > walked + seg[k]) walked += seg[k++];
      double t = seg[k] > 0 ? std::clamp((s - walked) / seg[k], 0.0, 1.0) : 0.0;
      const auto& a = road.vertices[k];
      const auto& b = road.vertices[k + 1];
      deposit(a.first + t * (b.first - a.first), a.second + t * (b.second - a.second), share);
    }
  }
  if (stats) stats->skipped = skipped;
  return g;
}

Grid g_sum(const Grid& a, const Grid& b) {
  constexpr double tol = 1e-9;
  if (a.ncols != b.ncols || a.nrows != b.nrows)
    throw ValidationError("grid shapes differ: " + std::to_string(a.ncols) + "x" + std::to_string(a.nrows) + " vs " +
                          std::to_string(b.ncols) + "x" + std::to_string(b.nrows));
  if (std::abs(a.xll - b.xll) > tol || std::abs(a.yll - b.yll) > tol || std::abs(a.cellsize - b.cellsize) > tol)
    throw ValidationError("grid georeferences differ");
  Grid out = a;
  for (size_t i = 0; i < out.cells.size(); ++i) {
    if (a.cells[i] == a.nodata || b.cells[i] == b.nodata)
      out.cells[i] = a.nodata;
    else
      out.cells[i] = a.cells[i] + b.cells[i];
  }
  return out;
}

}  // namespace wpsenv::mock
