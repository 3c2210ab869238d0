#include "wpsenv/catalog/validation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <vector>

#include "wpsenv/error.hpp"
#include "wpsenv/numfmt.hpp"
#include "wpsenv/store/datastore.hpp"

namespace wpsenv::catalog {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  for (;;) {
    auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool iequals_prefix(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (size_t i = 0; i < prefix.size(); ++i)
    if (std::toupper(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
  return true;
}

double coord(std::string_view tok) {
  auto v = parse_number(trim(tok));
  if (!v || !std::isfinite(*v)) throw ValidationError("not a number: '" + std::string(trim(tok)) + "'", "rectangle");
  return *v;
}

Extent envelope_of_polygon(std::string_view wkt) {
  std::string_view body = trim(wkt.substr(7));
  if (body.size() < 4 || body.front() != '(' || body.back() != ')')
    throw ValidationError("malformed POLYGON", "rectangle");
  body = trim(body.substr(1, body.size() - 2));
  // rings: (x y, x y, ...), (...)
  std::vector<std::pair<double, double>> pts;
  size_t i = 0;
  while (i < body.size()) {
    if (body[i] != '(') throw ValidationError("malformed POLYGON ring", "rectangle");
    auto close = body.find(')', i);
    if (close == std::string_view::npos) throw ValidationError("unterminated POLYGON ring", "rectangle");
    for (auto vertex : split(body.substr(i + 1, close - i - 1), ',')) {
      vertex = trim(vertex);
      auto sp = vertex.find_first_of(" \t");
      if (sp == std::string_view::npos) throw ValidationError("vertex needs two coordinates", "rectangle");
      auto rest = trim(vertex.substr(sp));
      if (rest.find_first_of(" \t") != std::string_view::npos)
        throw ValidationError("only 2D vertices are supported", "rectangle");
      pts.emplace_back(coord(vertex.substr(0, sp)), coord(rest));
    }
    i = close + 1;
    while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
    if (i < body.size()) {
      if (body[i] != ',') throw ValidationError("malformed POLYGON ring list", "rectangle");
      ++i;
      while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
    }
  }
  if (pts.size() < 3) throw ValidationError("POLYGON needs at least three vertices", "rectangle");
  Extent e{pts[0].first, pts[0].second, pts[0].first, pts[0].second};
  for (auto [x, y] : pts) {
    e.minx = std::min(e.minx, x);
    e.miny = std::min(e.miny, y);
    e.maxx = std::max(e.maxx, x);
    e.maxy = std::max(e.maxy, y);
  }
  return e;
}

}  // namespace

bool is_identifier(std::string_view s) { return valid_wrapper_name(s); }

Extent parse_extent(std::string_view raw) {
  std::string_view s = trim(raw);
  if (iequals_prefix(s, "POLYGON")) return envelope_of_polygon(s);
  auto parts = split(s, ',');
  if (parts.size() != 4) throw ValidationError("expected minx,miny,maxx,maxy or POLYGON((...))", "rectangle");
  Extent e{coord(parts[0]), coord(parts[1]), coord(parts[2]), coord(parts[3])};
  if (e.minx > e.maxx || e.miny > e.maxy) throw ValidationError("min corner exceeds max corner", "rectangle");
  return e;
}

ValidatedValue validate_input(const WidgetDescriptor& widget, std::string_view raw, const std::string& user,
                              const store::Datastore& store) {
  const std::string kind(to_string(widget.kind));
  switch (widget.kind) {
    case WidgetKind::Edit: return Text{std::string(raw)};
    case WidgetKind::Number: {
      auto v = parse_number(trim(raw));
      if (!v || !std::isfinite(*v)) throw ValidationError("not a decimal number: '" + std::string(raw) + "'", kind);
      if (widget.min && *v < *widget.min) throw ValidationError("below minimum " + format_number(*widget.min), kind);
      if (widget.max && *v > *widget.max) throw ValidationError("above maximum " + format_number(*widget.max), kind);
      return Number{*v};
    }
    case WidgetKind::Checkbox:
      if (raw == "true") return Flag{true};
      if (raw == "false") return Flag{false};
      throw ValidationError("expected \"true\" or \"false\"", kind);
    case WidgetKind::Rectangle: return parse_extent(raw);
    case WidgetKind::File: {
      std::string path;
      try {
        path = store::Datastore::normalize(raw);
      } catch (const ValidationError& e) {
        throw ValidationError(e.reason(), kind);
      }
      if (!store.exists(user, path)) throw ValidationError("no such file in store: " + path, kind);
      return FilePath{path};
    }
    case WidgetKind::FileSave: {
      try {
        return SavePath{store::Datastore::normalize(raw)};
      } catch (const ValidationError& e) {
        throw ValidationError(e.reason(), kind);
      }
    }
    case WidgetKind::SelectTable:
      if (!is_identifier(raw)) throw ValidationError("not a table identifier: '" + std::string(raw) + "'", kind);
      return TableRef{std::string(raw), std::nullopt};
    case WidgetKind::SelectTableAttr: {
      auto dot = raw.find('.');
      if (dot == std::string_view::npos || !is_identifier(raw.substr(0, dot)) || !is_identifier(raw.substr(dot + 1)))
        throw ValidationError("expected table.attr: '" + std::string(raw) + "'", kind);
      return TableRef{std::string(raw.substr(0, dot)), std::string(raw.substr(dot + 1))};
    }
  }
  throw ValidationError("unknown widget", kind);
}

}  // namespace wpsenv::catalog
