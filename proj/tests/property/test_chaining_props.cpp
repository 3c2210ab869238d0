#include <gtest/gtest.h>

#include <algorithm>

#include "generators.hpp"
#include "oracles.hpp"
#include "wpsenv/chaining.hpp"

using namespace wpsenv;
using namespace wpsenv::chaining;

namespace {

catalog::BoundParam param(const std::string& id, wps::DataTypeSpec t, bool output) {
  catalog::BoundParam p;
  p.decl = {id, id, 1, 1, std::move(t)};
  p.widget.kind = catalog::default_widget(p.decl.dtype, output);
  return p;
}

std::vector<catalog::ProcessDescriptor> random_catalog(test::Gen& g) {
  std::vector<catalog::ProcessDescriptor> cat;
  int n = g.range(0, 10);
  for (int s = 0; s < n; ++s) {
    catalog::ProcessDescriptor d;
    d.local_id = "p" + std::to_string(s);
    for (int k = g.range(0, 4); k > 0; --k) d.inputs.push_back(param("i" + std::to_string(k), g.dtype(), false));
    for (int k = g.range(0, 3); k > 0; --k) d.outputs.push_back(param("o" + std::to_string(k), g.dtype(), true));
    cat.push_back(std::move(d));
  }
  return cat;
}

}  // namespace

TEST(Property, ChainablePairsEqualsBruteForce) {
  test::Gen g(2024);
  for (int round = 0; round < 300; ++round) {
    auto cat = random_catalog(g);
    std::vector<test::OraclePair> got;
    for (const auto& p : chainable_pairs(cat)) {
      ASSERT_EQ(p.producer.direction, Direction::Out);
      ASSERT_EQ(p.consumer.direction, Direction::In);
      got.push_back({p.producer.owner_process, p.producer.param_id, p.consumer.owner_process, p.consumer.param_id});
    }
    auto want = test::oracle_pairs(cat);
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    ASSERT_EQ(got, want) << "round " << round;
  }
}

TEST(Property, CanChainAgreesWithOracle) {
  test::Gen g(77);
  for (int i = 0; i < 5000; ++i) {
    auto a = g.dtype(), b = g.dtype();
    ASSERT_EQ(types_chain(a, b), test::oracle_chain(a, b)) << wps::describe(a) << " -> " << wps::describe(b);
  }
}

TEST(Property, WildcardMonotonicity1000) {
  test::Gen g(1000);
  int checked = 0, true_before = 0;
  while (checked < 1000) {
    auto a = g.dtype(), b = g.dtype();
    // bias toward complex pairs, where wildcards matter
    if (!std::holds_alternative<wps::ComplexType>(b)) continue;
    if (g.range(0, 3) && std::holds_alternative<wps::ComplexType>(a))
      std::get<wps::ComplexType>(b).mime = std::get<wps::ComplexType>(a).mime;
    TypedSlot p{"x", "o", Direction::Out, a}, c{"y", "i", Direction::In, b};
    bool before = can_chain(p, c);
    true_before += before;
    auto relax = [&](auto&& edit) {
      TypedSlot r = c;
      edit(std::get<wps::ComplexType>(r.dtype));
      if (before) {
        EXPECT_TRUE(can_chain(p, r)) << wps::describe(a) << " -> " << wps::describe(b);
      }
    };
    relax([](wps::ComplexType& t) { t.encoding.reset(); });
    relax([](wps::ComplexType& t) { t.schema.reset(); });
    relax([](wps::ComplexType& t) {
      t.encoding.reset();
      t.schema.reset();
    });
    ++checked;
  }
  EXPECT_GT(true_before, 50);
}

TEST(Property, ReflexiveOnIdenticalTypes) {
  test::Gen g(5);
  for (int i = 0; i < 1000; ++i) {
    auto t = g.dtype();
    EXPECT_TRUE(can_chain({"a", "o", Direction::Out, t}, {"a", "i", Direction::In, t})) << wps::describe(t);
  }
}
