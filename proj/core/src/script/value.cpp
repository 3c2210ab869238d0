#include "wpsenv/script/value.hpp"

#include "wpsenv/numfmt.hpp"
#include "wpsenv/script/ast.hpp"

namespace wpsenv::script {

namespace {
// containers may reference themselves; refuse to walk past this depth
constexpr int kMaxValueDepth = 200;

void check_depth(int depth) {
  if (depth > kMaxValueDepth) throw ScriptError({0, 0}, "value nested too deeply (cyclic?)");
}
}  // namespace

const Value* Object::find(std::string_view key) const {
  for (const auto& [k, v] : entries)
    if (k == key) return &v;
  return nullptr;
}

void Object::set(std::string key, Value value) {
  for (auto& [k, v] : entries)
    if (k == key) {
      v = std::move(value);
      return;
    }
  entries.emplace_back(std::move(key), std::move(value));
}

Value make_array(Array items) { return Value(std::make_shared<Array>(std::move(items))); }
Value make_object(Object obj) { return Value(std::make_shared<Object>(std::move(obj))); }

const char* kind_name(const Value& v) {
  switch (v.v.index()) {
    case 0: return "null";
    case 1: return "number";
    case 2: return "text";
    case 3: return "boolean";
    case 4: return "array";
    case 5: return "object";
    case 6: return "matrix";
    default: return "handle";
  }
}

bool truthy(const Value& v) {
  if (v.is_null()) return false;
  if (auto b = v.boolean()) return *b;
  if (auto n = v.number()) return *n != 0;  // NaN != 0 holds, so NaN is truthy
  if (auto t = v.text()) return !t->empty();
  return true;
}

namespace {
bool equals_at(const Value& a, const Value& b, int depth) {
  check_depth(depth);
  if (a.v.index() != b.v.index()) return false;
  if (a.is_null()) return true;
  if (auto n = a.number()) return *n == *b.number();
  if (auto t = a.text()) return *t == *b.text();
  if (auto x = a.boolean()) return *x == *b.boolean();
  if (auto arr = a.array()) {
    const Array& other = *b.array();
    if (arr->size() != other.size()) return false;
    for (size_t i = 0; i < arr->size(); ++i)
      if (!equals_at((*arr)[i], other[i], depth + 1)) return false;
    return true;
  }
  if (auto obj = a.object()) {
    const Object& other = *b.object();
    if (obj->entries.size() != other.entries.size()) return false;
    for (const auto& [k, v] : obj->entries) {
      const Value* w = other.find(k);
      if (!w || !equals_at(v, *w, depth + 1)) return false;
    }
    return true;
  }
  if (auto m = a.matrix()) {
    const Matrix& o = *b.matrix();
    return m->rows == o.rows && m->cols == o.cols && m->cells == o.cells;
  }
  return a.handle() == b.handle();
}
}  // namespace

bool equals(const Value& a, const Value& b) { return equals_at(a, b, 0); }

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string render(const Value& v, bool nested, int depth) {
  check_depth(depth);
  if (v.is_null()) return "null";
  if (auto n = v.number()) return format_number(*n);
  if (auto t = v.text()) return nested ? quoted(*t) : *t;
  if (auto b = v.boolean()) return *b ? "true" : "false";
  if (auto arr = v.array()) {
    std::string out = "[";
    for (size_t i = 0; i < arr->size(); ++i) out += (i ? "," : "") + render((*arr)[i], true, depth + 1);
    return out + "]";
  }
  if (auto obj = v.object()) {
    std::string out = "{";
    bool first = true;
    for (const auto& [k, x] : obj->entries) {
      out += (first ? "" : ",") + k + ":" + render(x, true, depth + 1);
      first = false;
    }
    return out + "}";
  }
  if (auto m = v.matrix()) {
    std::string out = "[";
    for (size_t r = 0; r < m->rows; ++r) {
      out += r ? ",[" : "[";
      for (size_t c = 0; c < m->cols; ++c) out += (c ? "," : "") + format_number(m->at(r, c));
      out += "]";
    }
    return out + "]";
  }
  return "<handle " + v.handle()->wrapper + ">";
}

}  // namespace

std::string to_display(const Value& v) { return render(v, false, 0); }

namespace {
Value copy_at(const Value& v, int depth) {
  check_depth(depth);
  if (auto arr = v.array()) {
    Array out;
    out.reserve(arr->size());
    for (const auto& x : *arr) out.push_back(copy_at(x, depth + 1));
    return make_array(std::move(out));
  }
  if (auto obj = v.object()) {
    Object out;
    for (const auto& [k, x] : obj->entries) out.entries.emplace_back(k, copy_at(x, depth + 1));
    return make_object(std::move(out));
  }
  if (auto m = v.matrix()) return Value(std::make_shared<Matrix>(*m));
  return v;
}
}  // namespace

Value deep_copy(const Value& v) { return copy_at(v, 0); }

}  // namespace wpsenv::script
