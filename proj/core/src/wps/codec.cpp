#include "wpsenv/wps/codec.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <set>

#include "wpsenv/error.hpp"
#include "wpsenv/numfmt.hpp"
#include "xml.hpp"

namespace wpsenv::wps {

namespace {

using xml::Node;

constexpr const char* kXsiNs = "http://www.w3.org/2001/XMLSchema-instance";
constexpr const char* kXsdRef = "http://www.w3.org/TR/xmlschema-2/#";

// ---------------------------------------------------------------------------
// decoding helpers

std::unique_ptr<Node> load(std::string_view text) { return xml::parse(text); }

[[noreturn]] void fail(const std::string& msg) { throw ProtocolError(msg); }

void check_exception_root(const Node& root) {
  if (!root.is(kOwsNs, "ExceptionReport")) return;
  std::string msg = "remote exception report";
  if (const Node* ex = root.child(kOwsNs, "Exception")) {
    if (const auto* code = ex->attr("", "exceptionCode")) msg += ": " + *code;
    if (const Node* t = ex->child(kOwsNs, "ExceptionText")) msg += ": " + t->text;
  }
  fail(msg);
}

void check_root(const Node& root, std::string_view local) {
  check_exception_root(root);
  if (root.local != local || (root.ns != kWpsNs && !root.ns.empty()))
    fail("expected wps:" + std::string(local) + ", found " + root.local);
  if (const auto* v = root.attr("", "version"); v && *v != kVersion)
    fail("unsupported WPS version " + *v);
}

const Node& require(const Node& parent, std::string_view ns, std::string_view name) {
  const Node* n = parent.child(ns, name);
  if (!n) fail("missing " + std::string(name) + " in " + parent.local);
  return *n;
}

std::string child_text(const Node& parent, std::string_view ns, std::string_view name) {
  const Node* n = parent.child(ns, name);
  return n ? n->text : std::string{};
}

std::optional<std::string> child_text_opt(const Node& parent, std::string_view ns, std::string_view name) {
  const Node* n = parent.child(ns, name);
  if (!n) return std::nullopt;
  return n->text;
}

std::string trimmed(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string identifier_of(const Node& n) {
  const Node* id = n.child(kOwsNs, "Identifier");
  if (!id) fail("missing Identifier in " + n.local);
  std::string v = trimmed(id->text);
  if (v.empty()) fail("empty Identifier in " + n.local);
  return v;
}

bool bool_attr(const Node& n, std::string_view name) {
  const auto* v = n.attr("", name);
  return v && (*v == "true" || *v == "1");
}

unsigned occurs_attr(const Node& n, std::string_view name, unsigned dflt) {
  const auto* v = n.attr("", name);
  if (!v) return dflt;
  if (*v == "unbounded") return 1u << 30;
  unsigned out = 0;
  auto res = std::from_chars(v->data(), v->data() + v->size(), out);
  if (res.ec != std::errc{} || res.ptr != v->data() + v->size()) fail(std::string(name) + " is not an integer");
  return out;
}

std::string href_of(const Node& ref) {
  if (const auto* h = ref.attr(kXlinkNs, "href")) return *h;
  if (const auto* h = ref.attr("", "href")) return *h;
  fail("Reference without href");
}

std::string attr_or(const Node& n, std::string_view name, std::string dflt = {}) {
  const auto* v = n.attr("", name);
  return v ? *v : dflt;
}

std::string literal_base(const Node& lit) {
  const Node* dt = lit.child(kOwsNs, "DataType");
  if (!dt) return "string";
  std::string base = trimmed(dt->text);
  if (base.empty()) {
    const auto* ref = dt->attr(kOwsNs, "reference");
    if (!ref) ref = dt->attr("", "reference");
    if (ref) {
      auto hash = ref->rfind('#');
      base = hash == std::string::npos ? *ref : ref->substr(hash + 1);
    }
  }
  if (auto colon = base.find(':'); colon != std::string::npos) base = base.substr(colon + 1);
  return base.empty() ? "string" : base;
}

ComplexType complex_type(const Node& cx) {
  const Node* fmt = nullptr;
  if (const Node* def = cx.child(kWpsNs, "Default")) fmt = def->child(kWpsNs, "Format");
  if (!fmt) fmt = cx.child(kWpsNs, "Format");
  if (!fmt) fail("ComplexData without Default/Format");
  ComplexType t;
  t.mime = trimmed(child_text(*fmt, kWpsNs, "MimeType"));
  if (t.mime.empty()) fail("ComplexData format without MimeType");
  if (auto enc = child_text_opt(*fmt, kWpsNs, "Encoding")) t.encoding = trimmed(*enc);
  if (auto sch = child_text_opt(*fmt, kWpsNs, "Schema")) t.schema = trimmed(*sch);
  return t;
}

BBoxType bbox_type(const Node& bb) {
  BBoxType t;
  if (const Node* def = bb.child(kWpsNs, "Default"))
    if (const Node* crs = def->child(kWpsNs, "CRS")) t.default_crs = trimmed(crs->text);
  return t;
}

ParamDecl param_decl(const Node& n, bool output) {
  ParamDecl p;
  p.identifier = identifier_of(n);
  p.title = child_text(n, kOwsNs, "Title");
  if (!output) {
    p.min_occurs = occurs_attr(n, "minOccurs", 1);
    p.max_occurs = occurs_attr(n, "maxOccurs", 1);
    if (p.max_occurs == 0) fail("maxOccurs must be positive for " + p.identifier);
    if (p.min_occurs > p.max_occurs) fail("minOccurs > maxOccurs for " + p.identifier);
  }
  const char* lit = output ? "LiteralOutput" : "LiteralData";
  const char* cx = output ? "ComplexOutput" : "ComplexData";
  const char* bb = output ? "BoundingBoxOutput" : "BoundingBoxData";
  if (const Node* l = n.child(kWpsNs, lit))
    p.dtype = LiteralType{literal_base(*l)};
  else if (const Node* c = n.child(kWpsNs, cx))
    p.dtype = complex_type(*c);
  else if (const Node* b = n.child(kWpsNs, bb))
    p.dtype = bbox_type(*b);
  else
    fail("unsupported data form for " + p.identifier);
  return p;
}

std::pair<double, double> corner(const Node& bb, std::string_view name) {
  std::string text = trimmed(child_text(bb, kOwsNs, name));
  auto sp = text.find_first_of(" \t\n");
  if (sp == std::string::npos) fail("bounding box corner needs two coordinates");
  auto x = parse_number(text.substr(0, sp));
  auto y = parse_number(trimmed(text.substr(sp)));
  if (!x || !y) fail("bounding box corner is not numeric: " + text);
  return {*x, *y};
}

BBoxVal bbox_value(const Node& bb) {
  auto [minx, miny] = corner(bb, "LowerCorner");
  auto [maxx, maxy] = corner(bb, "UpperCorner");
  if (!(minx <= maxx) || !(miny <= maxy)) fail("bounding box lower corner exceeds upper corner");
  return BBoxVal{minx, miny, maxx, maxy, attr_or(bb, "crs")};
}

/// Decodes the value carried by a wps:Input / wps:Output element.
InputValue value_of(const Node& n) {
  if (const Node* ref = n.child(kWpsNs, "Reference")) {
    std::string href = href_of(*ref);
    if (href.find("://") == std::string::npos) fail("Reference href is not an absolute URL: " + href);
    return ComplexRef{href, attr_or(*ref, "mimeType")};
  }
  const Node* data = n.child(kWpsNs, "Data");
  if (!data) fail("value without Data or Reference");
  if (const Node* lit = data->child(kWpsNs, "LiteralData")) return LiteralVal{lit->text};
  if (const Node* cx = data->child(kWpsNs, "ComplexData")) {
    std::string body = cx->children.empty() ? cx->text : cx->inner_xml();
    return ComplexInline{std::move(body), attr_or(*cx, "mimeType")};
  }
  if (const Node* bb = data->child(kWpsNs, "BoundingBoxData")) return bbox_value(*bb);
  fail("Data without a recognised payload");
}

std::vector<NamedValue> named_values(const Node* container, std::string_view element) {
  std::vector<NamedValue> out;
  if (!container) return out;
  for (const Node* n : container->children_named(kWpsNs, element)) out.emplace_back(identifier_of(*n), value_of(*n));
  return out;
}

int clamp_percent(int p) {
  if (p < 0 || p > 99) {
    spdlog::warn("percentCompleted {} outside [0,99], clamped", p);
    return std::clamp(p, 0, 99);
  }
  return p;
}

// ---------------------------------------------------------------------------
// encoding helpers

void ns_decls(xml::Writer& w, bool with_xlink = true) {
  w.attr("xmlns:wps", kWpsNs).attr("xmlns:ows", kOwsNs);
  if (with_xlink) w.attr("xmlns:xlink", kXlinkNs);
  w.attr("xmlns:xsi", kXsiNs);
}

void write_bbox(xml::Writer& w, const BBoxVal& b) {
  w.start("wps:BoundingBoxData").attr("crs", b.crs).attr("dimensions", "2");
  w.leaf("ows:LowerCorner", format_number(b.minx) + " " + format_number(b.miny));
  w.leaf("ows:UpperCorner", format_number(b.maxx) + " " + format_number(b.maxy));
  w.end();
}

/// Writes the body of a wps:Input or wps:Output. Execute requests use
/// xlink:href; execute responses use the plain href attribute.
void write_value(xml::Writer& w, const InputValue& v, bool xlink_href) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ComplexRef>) {
          w.start("wps:Reference").attr(xlink_href ? "xlink:href" : "href", x.href);
          if (!x.mime.empty()) w.attr("mimeType", x.mime);
          w.end();
        } else {
          w.start("wps:Data");
          if constexpr (std::is_same_v<T, LiteralVal>) {
            w.leaf("wps:LiteralData", x.text);
          } else if constexpr (std::is_same_v<T, ComplexInline>) {
            w.start("wps:ComplexData");
            if (!x.mime.empty()) w.attr("mimeType", x.mime);
            w.raw(xml::escape_text(x.body));
            w.end();
          } else {
            write_bbox(w, x);
          }
          w.end();
        }
      },
      v);
}

void write_literal_type(xml::Writer& w, const LiteralType& t) {
  w.start("ows:DataType").attr("ows:reference", std::string(kXsdRef) + t.base).text(t.base).end();
}

void write_param(xml::Writer& w, const ParamDecl& p, bool output) {
  w.start(output ? "Output" : "Input");
  if (!output) w.attr("minOccurs", std::to_string(p.min_occurs)).attr("maxOccurs", std::to_string(p.max_occurs));
  w.leaf("ows:Identifier", p.identifier);
  w.leaf("ows:Title", p.title);
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, LiteralType>) {
          w.start(output ? "LiteralOutput" : "LiteralData");
          write_literal_type(w, t);
          if (!output) w.start("ows:AnyValue").end();
          w.end();
        } else if constexpr (std::is_same_v<T, ComplexType>) {
          auto format = [&] {
            w.start("Format");
            w.leaf("MimeType", t.mime);
            if (t.encoding) w.leaf("Encoding", *t.encoding);
            if (t.schema) w.leaf("Schema", *t.schema);
            w.end();
          };
          w.start(output ? "ComplexOutput" : "ComplexData");
          if (!output) w.attr("maximumMegabytes", "256");
          w.start("Default");
          format();
          w.end();
          w.start("Supported");
          format();
          w.end();
          w.end();
        } else {
          w.start(output ? "BoundingBoxOutput" : "BoundingBoxData");
          w.start("Default").leaf("CRS", t.default_crs).end();
          w.start("Supported").leaf("CRS", t.default_crs).end();
          w.end();
        }
      },
      p.dtype);
  w.end();
}

}  // namespace

// ---------------------------------------------------------------------------

CapabilitiesDoc parse_capabilities(std::string_view text) {
  auto root = load(text);
  check_root(*root, "Capabilities");
  CapabilitiesDoc doc;
  if (const Node* si = root->child(kOwsNs, "ServiceIdentification")) doc.service_title = child_text(*si, kOwsNs, "Title");
  const Node* offerings = root->child(kWpsNs, "ProcessOfferings");
  if (!offerings) fail("missing ProcessOfferings");
  std::set<std::string> seen;
  for (const Node* p : offerings->children_named(kWpsNs, "Process")) {
    ProcessBrief b;
    b.identifier = identifier_of(*p);
    b.title = child_text(*p, kOwsNs, "Title");
    b.abstract = child_text_opt(*p, kOwsNs, "Abstract");
    if (!seen.insert(b.identifier).second) fail("duplicate process identifier " + b.identifier);
    doc.process_briefs.push_back(std::move(b));
  }
  return doc;
}

ProcessDescription parse_process_description(std::string_view text) {
  auto root = load(text);
  check_exception_root(*root);
  const Node* pd = root.get();
  if (root->local == "ProcessDescriptions") {
    if (const auto* v = root->attr("", "version"); v && *v != kVersion) fail("unsupported WPS version " + *v);
    pd = root->child(kWpsNs, "ProcessDescription");
    if (!pd) fail("missing ProcessDescription");
  } else if (root->local != "ProcessDescription") {
    fail("expected ProcessDescriptions, found " + root->local);
  }
  ProcessDescription d;
  d.identifier = identifier_of(*pd);
  d.title = child_text(*pd, kOwsNs, "Title");
  d.abstract = child_text_opt(*pd, kOwsNs, "Abstract");
  d.store_supported = bool_attr(*pd, "storeSupported");
  d.status_supported = bool_attr(*pd, "statusSupported");
  auto collect = [](const Node* container, std::string_view element, bool output) {
    std::vector<ParamDecl> out;
    std::set<std::string> seen;
    if (!container) return out;
    for (const Node* n : container->children_named(kWpsNs, element)) {
      out.push_back(param_decl(*n, output));
      if (!seen.insert(out.back().identifier).second) fail("duplicate parameter " + out.back().identifier);
    }
    return out;
  };
  d.inputs = collect(pd->child(kWpsNs, "DataInputs"), "Input", false);
  d.outputs = collect(pd->child(kWpsNs, "ProcessOutputs"), "Output", true);
  return d;
}

ExecuteRequest decode_execute(std::string_view text) {
  auto root = load(text);
  check_root(*root, "Execute");
  ExecuteRequest req;
  req.process_id = identifier_of(*root);
  req.inputs = named_values(root->child(kWpsNs, "DataInputs"), "Input");
  if (const Node* rf = root->child(kWpsNs, "ResponseForm")) {
    if (const Node* doc = rf->child(kWpsNs, "ResponseDocument")) {
      req.response_form.store_results = bool_attr(*doc, "storeExecuteResponse");
      req.response_form.status = bool_attr(*doc, "status");
      for (const Node* o : doc->children_named(kWpsNs, "Output"))
        req.response_form.requested_outputs.push_back(identifier_of(*o));
    } else if (const Node* raw = rf->child(kWpsNs, "RawDataOutput")) {
      req.response_form.requested_outputs.push_back(identifier_of(*raw));
    }
  }
  return req;
}

ExecuteResponse parse_execute_response(std::string_view text) {
  auto root = load(text);
  check_root(*root, "ExecuteResponse");
  ExecuteResponse resp;
  resp.process_id = identifier_of(require(*root, kWpsNs, "Process"));
  if (const auto* loc = root->attr("", "statusLocation")) resp.status_location = *loc;
  const Node& status = require(*root, kWpsNs, "Status");
  if (const auto* ct = status.attr("", "creationTime")) {
    auto t = parse_instant(*ct);
    if (!t) fail("bad creationTime " + *ct);
    resp.status.timestamp = *t;
  }
  if (status.child(kWpsNs, "ProcessAccepted")) {
    resp.status.state = Accepted{};
  } else if (const Node* st = status.child(kWpsNs, "ProcessStarted"); st || (st = status.child(kWpsNs, "ProcessPaused"))) {
    int pct = 0;
    if (const auto* p = st->attr("", "percentCompleted")) {
      auto v = parse_number(trimmed(*p));
      if (!v) fail("percentCompleted is not numeric");
      double clamped = std::clamp(*v, -1.0, 100.0);
      pct = clamp_percent(static_cast<int>(clamped));
    }
    resp.status.state = Started{pct};
  } else if (status.child(kWpsNs, "ProcessSucceeded")) {
    resp.status.state = Succeeded{};
  } else if (const Node* f = status.child(kWpsNs, "ProcessFailed")) {
    std::string msg;
    if (const Node* rep = f->child(kOwsNs, "ExceptionReport"))
      if (const Node* ex = rep->child(kOwsNs, "Exception")) msg = child_text(*ex, kOwsNs, "ExceptionText");
    resp.status.state = Failed{msg};
  } else {
    fail("Status without a recognised state");
  }
  resp.outputs = named_values(root->child(kWpsNs, "ProcessOutputs"), "Output");
  return resp;
}

std::optional<ExceptionReport> parse_exception_report(std::string_view text) {
  auto root = load(text);
  if (!root->is(kOwsNs, "ExceptionReport")) return std::nullopt;
  ExceptionReport rep;
  if (const Node* ex = root->child(kOwsNs, "Exception")) {
    rep.code = attr_or(*ex, "exceptionCode");
    if (const auto* loc = ex->attr("", "locator")) rep.locator = *loc;
    rep.text = child_text(*ex, kOwsNs, "ExceptionText");
  }
  return rep;
}

// ---------------------------------------------------------------------------

std::string encode_capabilities(const CapabilitiesDoc& doc, std::string_view service_url) {
  xml::Writer w;
  w.start("wps:Capabilities");
  ns_decls(w);
  w.attr("service", "WPS").attr("version", kVersion).attr("xml:lang", "en-US").attr("updateSequence", "1");
  w.attr("xsi:schemaLocation",
         "http://www.opengis.net/wps/1.0.0 http://schemas.opengis.net/wps/1.0.0/wpsGetCapabilities_response.xsd");
  w.start("ows:ServiceIdentification");
  w.leaf("ows:Title", doc.service_title);
  w.leaf("ows:ServiceType", "WPS");
  w.leaf("ows:ServiceTypeVersion", kVersion);
  w.end();
  w.start("ows:OperationsMetadata");
  for (const char* op : {"GetCapabilities", "DescribeProcess", "Execute"}) {
    w.start("ows:Operation").attr("name", op).start("ows:DCP").start("ows:HTTP");
    w.start("ows:Get").attr("xlink:href", std::string(service_url) + "?").end();
    w.start("ows:Post").attr("xlink:href", service_url).end();
    w.end().end().end();
  }
  w.end();
  w.start("wps:ProcessOfferings");
  for (const auto& b : doc.process_briefs) {
    w.start("wps:Process").attr("wps:processVersion", "1");
    w.leaf("ows:Identifier", b.identifier);
    w.leaf("ows:Title", b.title);
    if (b.abstract) w.leaf("ows:Abstract", *b.abstract);
    w.end();
  }
  w.end();
  w.start("wps:Languages");
  w.start("wps:Default").leaf("ows:Language", "en-US").end();
  w.start("wps:Supported").leaf("ows:Language", "en-US").end();
  w.end();
  return w.finish();
}

std::string encode_process_descriptions(const std::vector<ProcessDescription>& descs) {
  xml::Writer w;
  w.start("wps:ProcessDescriptions");
  ns_decls(w, false);
  w.attr("service", "WPS").attr("version", kVersion).attr("xml:lang", "en-US");
  w.attr("xsi:schemaLocation",
         "http://www.opengis.net/wps/1.0.0 http://schemas.opengis.net/wps/1.0.0/wpsDescribeProcess_response.xsd");
  for (const auto& d : descs) {
    w.start("ProcessDescription").attr("wps:processVersion", "1");
    w.attr("storeSupported", d.store_supported ? "true" : "false");
    w.attr("statusSupported", d.status_supported ? "true" : "false");
    w.leaf("ows:Identifier", d.identifier);
    w.leaf("ows:Title", d.title);
    if (d.abstract) w.leaf("ows:Abstract", *d.abstract);
    if (!d.inputs.empty()) {
      w.start("DataInputs");
      for (const auto& p : d.inputs) write_param(w, p, false);
      w.end();
    }
    w.start("ProcessOutputs");
    for (const auto& p : d.outputs) write_param(w, p, true);
    w.end();
    w.end();
  }
  return w.finish();
}

std::string encode_execute(const ExecuteRequest& req) {
  xml::Writer w;
  w.start("wps:Execute");
  ns_decls(w);
  w.attr("service", "WPS").attr("version", kVersion);
  w.attr("xsi:schemaLocation",
         "http://www.opengis.net/wps/1.0.0 http://schemas.opengis.net/wps/1.0.0/wpsExecute_request.xsd");
  w.leaf("ows:Identifier", req.process_id);
  w.start("wps:DataInputs");
  for (const auto& [id, v] : req.inputs) {
    w.start("wps:Input");
    w.leaf("ows:Identifier", id);
    write_value(w, v, true);
    w.end();
  }
  w.end();
  w.start("wps:ResponseForm").start("wps:ResponseDocument");
  w.attr("storeExecuteResponse", req.response_form.store_results ? "true" : "false");
  w.attr("lineage", "false");
  w.attr("status", req.response_form.status ? "true" : "false");
  for (const auto& o : req.response_form.requested_outputs) {
    w.start("wps:Output").attr("asReference", "true");
    w.leaf("ows:Identifier", o);
    w.end();
  }
  w.end().end();
  return w.finish();
}

std::string encode_execute_response(const ExecuteResponse& resp) {
  xml::Writer w;
  w.start("wps:ExecuteResponse");
  ns_decls(w);
  w.attr("service", "WPS").attr("version", kVersion).attr("xml:lang", "en-US");
  if (resp.status_location) w.attr("statusLocation", *resp.status_location);
  w.attr("xsi:schemaLocation",
         "http://www.opengis.net/wps/1.0.0 http://schemas.opengis.net/wps/1.0.0/wpsExecute_response.xsd");
  w.start("wps:Process").attr("wps:processVersion", "1");
  w.leaf("ows:Identifier", resp.process_id);
  w.leaf("ows:Title", resp.process_id);
  w.end();
  w.start("wps:Status").attr("creationTime", format_instant(resp.status.timestamp));
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Accepted>) {
          w.leaf("wps:ProcessAccepted", "Process accepted");
        } else if constexpr (std::is_same_v<T, Started>) {
          w.start("wps:ProcessStarted").attr("percentCompleted", std::to_string(s.percent));
          w.text("Process started").end();
        } else if constexpr (std::is_same_v<T, Succeeded>) {
          w.leaf("wps:ProcessSucceeded", "Process succeeded");
        } else {
          w.start("wps:ProcessFailed").start("ows:ExceptionReport").attr("version", kVersion);
          w.start("ows:Exception").attr("exceptionCode", "NoApplicableCode");
          w.leaf("ows:ExceptionText", s.message);
          w.end().end().end();
        }
      },
      resp.status.state);
  w.end();
  if (!resp.outputs.empty()) {
    w.start("wps:ProcessOutputs");
    for (const auto& [id, v] : resp.outputs) {
      w.start("wps:Output");
      w.leaf("ows:Identifier", id);
      w.leaf("ows:Title", id);
      write_value(w, v, false);
      w.end();
    }
    w.end();
  }
  return w.finish();
}

std::string encode_exception_report(const ExceptionReport& report) {
  xml::Writer w;
  w.start("ows:ExceptionReport").attr("xmlns:ows", kOwsNs).attr("version", kVersion).attr("xml:lang", "en-US");
  w.start("ows:Exception").attr("exceptionCode", report.code);
  if (report.locator) w.attr("locator", *report.locator);
  w.leaf("ows:ExceptionText", report.text);
  w.end().end();
  return w.finish();
}

}  // namespace wpsenv::wps
