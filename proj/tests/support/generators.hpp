#pragma once

#include <random>
#include <string>
#include <vector>

#include "wpsenv/catalog/descriptor.hpp"
#include "wpsenv/wps/types.hpp"

namespace wpsenv::test {

/// Random protocol values for round-trip and fuzz harnesses.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::mt19937_64& rng() { return rng_; }
  int range(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return range(0, 1) == 1; }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(range(0, static_cast<int>(v.size()) - 1))];
  }

  std::string identifier() {
    static const std::string first = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_";
    static const std::string rest = first + "0123456789.-";
    std::string s(1, first[range(0, static_cast<int>(first.size()) - 1)]);
    int n = range(0, 12);
    for (int i = 0; i < n; ++i) s += rest[range(0, static_cast<int>(rest.size()) - 1)];
    return s;
  }

  /// Text with XML-special characters, interior whitespace and non-ASCII.
  std::string text(int max_len = 24) {
    static const std::vector<std::string> pieces = {"a", "Z", "7", " ", "<", ">", "&", "\"", "'", "é", "λ", "\t",
                                                    "x y", "]]>", "&amp;", "/", "=", ";", "%", "#"};
    std::string s;
    int n = range(0, max_len);
    for (int i = 0; i < n; ++i) s += pick(pieces);
    return s;
  }

  std::string mime() {
    return pick(std::vector<std::string>{"text/plain", "text/xml", "application/json", "image/tiff",
                                         "application/octet-stream", "Text/Plain"});
  }

  std::string href() {
    return "http://" + pick(std::vector<std::string>{"example.org", "127.0.0.1:8080", "h"}) + "/files/" +
           identifier() + (coin() ? "?a=1&b=" + std::to_string(range(0, 99)) : "");
  }

  double coord() {
    switch (range(0, 3)) {
      case 0: return range(-180, 180);
      case 1: return std::uniform_real_distribution<double>(-1e6, 1e6)(rng_);
      case 2: return std::uniform_real_distribution<double>(-1, 1)(rng_) * 1e-5;
      default: return range(-10, 10) / 4.0;
    }
  }

  wps::InputValue value() {
    switch (range(0, 3)) {
      case 0: return wps::LiteralVal{text()};
      case 1: return wps::ComplexRef{href(), mime()};
      case 2: return wps::ComplexInline{text(64), mime()};
      default: {
        double a = coord(), b = coord(), c = coord(), d = coord();
        return wps::BBoxVal{std::min(a, b), std::min(c, d), std::max(a, b), std::max(c, d),
                            pick(std::vector<std::string>{"EPSG:4326", "EPSG:3857", "urn:ogc:def:crs:EPSG::32633"})};
      }
    }
  }

  std::vector<wps::NamedValue> named_values(int max) {
    std::vector<wps::NamedValue> out;
    int n = range(0, max);
    for (int i = 0; i < n; ++i) out.emplace_back(identifier(), value());
    return out;
  }

  wps::ExecuteRequest request() {
    wps::ExecuteRequest r;
    r.process_id = identifier();
    r.inputs = named_values(6);
    r.response_form.store_results = coin();
    r.response_form.status = coin();
    int n = range(0, 3);
    for (int i = 0; i < n; ++i) r.response_form.requested_outputs.push_back(identifier());
    return r;
  }

  Instant instant() {
    // 2000-01-01 .. 2040-01-01, millisecond grain
    std::int64_t ms = std::uniform_int_distribution<std::int64_t>(946684800000LL, 2208988800000LL)(rng_);
    return Instant(std::chrono::milliseconds(ms));
  }

  wps::ExecuteResponse response() {
    wps::ExecuteResponse r;
    r.process_id = identifier();
    r.status.timestamp = instant();
    switch (range(0, 3)) {
      case 0: r.status.state = wps::Accepted{}; break;
      case 1: r.status.state = wps::Started{range(0, 99)}; break;
      case 2:
        r.status.state = wps::Succeeded{};
        r.outputs = named_values(5);
        break;
      default: r.status.state = wps::Failed{text()}; break;
    }
    if (coin()) r.status_location = href();
    return r;
  }

  wps::DataTypeSpec dtype() {
    switch (range(0, 2)) {
      case 0: return wps::LiteralType{pick(std::vector<std::string>{"string", "double", "Double", "integer", "boolean"})};
      case 1: {
        wps::ComplexType c{pick(std::vector<std::string>{"text/plain", "Text/Plain", "text/xml", "image/tiff"}),
                           std::nullopt, std::nullopt};
        if (coin()) c.encoding = pick(std::vector<std::string>{"UTF-8", "base64"});
        if (coin()) c.schema = pick(std::vector<std::string>{"http://s/a.xsd", "http://s/b.xsd"});
        return c;
      }
      default: return wps::BBoxType{pick(std::vector<std::string>{"EPSG:4326", "EPSG:3857"})};
    }
  }

 private:
  std::mt19937_64 rng_;
};

/// Byte-level mutations of a valid document.
inline std::string mutate(std::string doc, Gen& g) {
  int edits = g.range(1, 4);
  for (int e = 0; e < edits && !doc.empty(); ++e) {
    auto at = static_cast<std::size_t>(g.range(0, static_cast<int>(doc.size()) - 1));
    switch (g.range(0, 6)) {
      case 0: doc[at] = static_cast<char>(g.range(0, 255)); break;
      case 1: doc.erase(at, static_cast<std::size_t>(g.range(1, 16))); break;
      case 2: doc.insert(at, 1, "<>&\"'/= \0x"[g.range(0, 9)]); break;
      case 3: doc.resize(at); break;
      case 4: {
        auto len = static_cast<std::size_t>(g.range(1, 64));
        doc.insert(at, doc.substr(at, len));
        break;
      }
      case 5: {
        auto from = doc.find('<', at);
        if (from != std::string::npos) doc.insert(from, "<x:y xmlns:x=\"urn:" + std::to_string(at) + "\">");
        break;
      }
      default: {
        static const std::vector<std::string> swaps = {"1.0.0", "2.0.0", "wps:", "ows:", "xlink:", "&amp;", "&#0;"};
        doc.insert(at, g.pick(swaps));
      }
    }
  }
  return doc;
}

}  // namespace wpsenv::test
