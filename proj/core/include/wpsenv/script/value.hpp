#pragma once

#include <future>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace wpsenv::script {

struct Value;
struct Object;
struct Matrix;
struct HandleState;

using Array = std::vector<Value>;
using ArrayPtr = std::shared_ptr<Array>;
using ObjectPtr = std::shared_ptr<Object>;
using MatrixPtr = std::shared_ptr<Matrix>;
using HandlePtr = std::shared_ptr<HandleState>;

/// Arrays, objects and matrices have reference semantics inside one run.
struct Value {
  using Null = std::monostate;
  std::variant<Null, double, std::string, bool, ArrayPtr, ObjectPtr, MatrixPtr, HandlePtr> v;

  Value() = default;
  Value(Null) {}
  Value(double d) : v(d) {}
  Value(int i) : v(static_cast<double>(i)) {}
  Value(std::string s) : v(std::move(s)) {}
  Value(const char* s) : v(std::string(s)) {}
  Value(bool b) : v(b) {}
  Value(ArrayPtr a) : v(std::move(a)) {}
  Value(ObjectPtr o) : v(std::move(o)) {}
  Value(MatrixPtr m) : v(std::move(m)) {}
  Value(HandlePtr h) : v(std::move(h)) {}

  bool is_null() const { return std::holds_alternative<Null>(v); }
  const double* number() const { return std::get_if<double>(&v); }
  const std::string* text() const { return std::get_if<std::string>(&v); }
  const bool* boolean() const { return std::get_if<bool>(&v); }
  Array* array() const {
    auto p = std::get_if<ArrayPtr>(&v);
    return p ? p->get() : nullptr;
  }
  Object* object() const {
    auto p = std::get_if<ObjectPtr>(&v);
    return p ? p->get() : nullptr;
  }
  Matrix* matrix() const {
    auto p = std::get_if<MatrixPtr>(&v);
    return p ? p->get() : nullptr;
  }
  HandlePtr handle() const {
    auto p = std::get_if<HandlePtr>(&v);
    return p ? *p : nullptr;
  }
};

/// Insertion-ordered map.
struct Object {
  std::vector<std::pair<std::string, Value>> entries;

  const Value* find(std::string_view key) const;
  void set(std::string key, Value value);
};

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> cells;  // row-major

  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), cells(r * c, 0.0) {}
  double& at(std::size_t r, std::size_t c) { return cells[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return cells[r * cols + c]; }
};

/// Result of a spawned wrapper call.
struct HandleState {
  std::string wrapper;
  std::shared_future<Value> result;
};

Value make_array(Array items = {});
Value make_object(Object obj = {});

const char* kind_name(const Value& v);
bool truthy(const Value& v);
/// Same-kind structural equality; mixed kinds are unequal; handles compare
/// by identity.
bool equals(const Value& a, const Value& b);
/// Text as-is, numbers in shortest round-trip form, containers JSON-like.
std::string to_display(const Value& v);
/// Copy with no storage shared with the original (handles stay shared).
Value deep_copy(const Value& v);

}  // namespace wpsenv::script
