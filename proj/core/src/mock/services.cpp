#include "wpsenv/mock/services.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "wpsenv/error.hpp"
#include "wpsenv/mock/grid.hpp"
#include "wpsenv/numfmt.hpp"

namespace wpsenv::mock {

using catalog::BoundParam;
using catalog::ProcessDescriptor;
using catalog::WidgetKind;

namespace {

BoundParam file_in(const std::string& id, const std::string& title) {
  BoundParam p;
  p.decl = {id, title, 1, 1, wps::ComplexType{"text/plain", std::nullopt, std::nullopt}};
  p.widget.kind = WidgetKind::File;
  p.human_name = title;
  return p;
}

BoundParam file_out(const std::string& id, const std::string& title) {
  BoundParam p = file_in(id, title);
  p.widget.kind = WidgetKind::FileSave;
  return p;
}

BoundParam number_in(const std::string& id, const std::string& title, double min, std::optional<double> max) {
  BoundParam p;
  p.decl = {id, title, 1, 1, wps::LiteralType{"double"}};
  p.widget.kind = WidgetKind::Number;
  p.widget.min = min;
  p.widget.max = max;
  p.human_name = title;
  return p;
}

BoundParam text_param(const std::string& id, const std::string& title) {
  BoundParam p;
  p.decl = {id, title, 1, 1, wps::LiteralType{"string"}};
  p.widget.kind = WidgetKind::Edit;
  p.human_name = title;
  return p;
}

ProcessDescriptor builtin(const std::string& name, const std::string& title, const std::string& description) {
  ProcessDescriptor d;
  d.display_name = title;
  d.description = description;
  d.endpoint = std::string(catalog::kLocalEndpoint);
  d.remote_identifier = name;
  d.wrapper_name = name;
  d.kind = catalog::ProcessKind::LocalBuiltin;
  d.store_supported = true;
  d.status_supported = true;
  return d;
}

const wps::InputValue& input(const std::vector<wps::NamedValue>& inputs, const std::string& id) {
  for (const auto& [k, v] : inputs)
    if (k == id) return v;
  throw ValidationError("missing input " + id);
}

double literal_number(const std::vector<wps::NamedValue>& inputs, const std::string& id) {
  const auto* lit = std::get_if<wps::LiteralVal>(&input(inputs, id));
  if (!lit) throw ValidationError("input " + id + " must be a literal");
  auto v = parse_number(lit->text);
  if (!v || !std::isfinite(*v)) throw ValidationError("input " + id + " is not a number: '" + lit->text + "'");
  return *v;
}

exec::RunnerOutput grid_output(const Grid& g) {
  return {"result", wps::InputValue{wps::ComplexInline{write_grid(g), "text/plain"}}};
}

void report_skipped(exec::RunContext& ctx, const BinStats& stats, const char* what) {
  if (stats.skipped) ctx.log("warn", std::to_string(stats.skipped) + " " + what + " outside the grid skipped");
}

}  // namespace

std::vector<ProcessDescriptor> builtin_descriptors() {
  std::vector<ProcessDescriptor> out;

  auto v2g = builtin("vector2grid", "Point sources to grid", "Rasterizes point pollution sources onto a grid");
  v2g.inputs = {file_in("points", "Point sources (x,y,q CSV)"), file_in("grid_spec", "Grid definition")};
  v2g.outputs = {file_out("result", "Pollution grid")};
  out.push_back(std::move(v2g));

  auto r2g = builtin("road2grid", "Road sources to grid", "Rasterizes road pollution sources onto a grid");
  r2g.inputs = {file_in("roads", "Road sources (id,wkt,q CSV)"), file_in("grid_spec", "Grid definition"),
                number_in("sumpol", "Emission scale", 0, std::nullopt)};
  r2g.outputs = {file_out("result", "Pollution grid")};
  out.push_back(std::move(r2g));

  auto sum = builtin("g_sum", "Grid sum", "Cell-wise sum; combines grids");
  sum.inputs = {file_in("a", "First grid"), file_in("b", "Second grid")};
  sum.outputs = {file_out("result", "Sum grid")};
  out.push_back(std::move(sum));

  auto echo = builtin("slow_echo", "Slow echo", "Echoes the payload after a delay");
  echo.inputs = {text_param("payload", "Payload"), number_in("duration", "Duration (s)", 0, 3600)};
  echo.outputs = {text_param("echo", "Echo")};
  out.push_back(std::move(echo));

  return out;
}

void register_builtins(catalog::Catalog& catalog) {
  for (auto& d : builtin_descriptors())
    if (!catalog.find_by_wrapper(d.wrapper_name)) catalog.add(std::move(d));
}

std::vector<exec::RunnerOutput> MockRunner::run(const ProcessDescriptor& desc,
                                                const std::vector<wps::NamedValue>& inputs, exec::RunContext& ctx) {
  const std::string& id = desc.remote_identifier;
  if (id == "vector2grid") {
    auto points = read_points(ctx.fetch(input(inputs, "points")));
    auto spec = read_grid_header(ctx.fetch(input(inputs, "grid_spec")));
    BinStats stats;
    auto g = vector2grid(points, spec, &stats);
    report_skipped(ctx, stats, "points");
    ctx.log("info", "binned " + std::to_string(points.size() - stats.skipped) + " points");
    return {grid_output(g)};
  }
  if (id == "road2grid") {
    auto roads = read_roads(ctx.fetch(input(inputs, "roads")));
    auto spec = read_grid_header(ctx.fetch(input(inputs, "grid_spec")));
    double sumpol = literal_number(inputs, "sumpol");
    BinStats stats;
    auto g = road2grid(roads, spec, sumpol, &stats);
    report_skipped(ctx, stats, "road samples");
    ctx.log("info", "rasterized " + std::to_string(roads.size()) + " roads");
    return {grid_output(g)};
  }
  if (id == "g_sum") {
    auto a = read_grid(ctx.fetch(input(inputs, "a")));
    auto b = read_grid(ctx.fetch(input(inputs, "b")));
    return {grid_output(g_sum(a, b))};
  }
  if (id == "slow_echo") {
    const auto* payload = std::get_if<wps::LiteralVal>(&input(inputs, "payload"));
    if (!payload) throw ValidationError("payload must be a literal");
    double duration = literal_number(inputs, "duration");
    if (duration < 0 || duration > 3600) throw ValidationError("duration must be within [0, 3600] seconds");
    auto tick = std::chrono::duration<double>(duration / 10);
    for (int k = 0; k < 10; ++k) {
      ctx.progress(10 * k);
      auto until = std::chrono::steady_clock::now() + std::chrono::duration_cast<std::chrono::steady_clock::duration>(tick);
      while (std::chrono::steady_clock::now() < until) {
        if (ctx.is_cancelled()) throw CancelledError();
        auto left = until - std::chrono::steady_clock::now();
        std::this_thread::sleep_for(std::min<std::chrono::steady_clock::duration>(left, std::chrono::milliseconds(20)));
      }
    }
    return {{"echo", wps::InputValue{wps::LiteralVal{payload->text}}}};
  }
  throw NotFound("no builtin process '" + id + "'");
}

}  // namespace wpsenv::mock
