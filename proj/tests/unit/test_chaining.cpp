#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wpsenv/catalog/catalog.hpp"
#include "wpsenv/chaining.hpp"
#include "wpsenv/error.hpp"
#include "wpsenv/mock/services.hpp"

using namespace wpsenv;
using namespace wpsenv::chaining;
using wps::BBoxType;
using wps::ComplexType;
using wps::LiteralType;

namespace {

TypedSlot out(wps::DataTypeSpec t) { return {"p1", "o", Direction::Out, std::move(t)}; }
TypedSlot in(wps::DataTypeSpec t) { return {"p2", "i", Direction::In, std::move(t)}; }
ComplexType cx(std::string mime, std::optional<std::string> enc = {}, std::optional<std::string> schema = {}) {
  return {std::move(mime), std::move(enc), std::move(schema)};
}

std::vector<catalog::ProcessDescriptor> mock_catalog() {
  catalog::Catalog cat;
  mock::register_builtins(cat);
  return cat.all();
}

}  // namespace

TEST(CanChain, Identity) { EXPECT_TRUE(can_chain(out(cx("text/plain")), in(cx("text/plain")))); }

TEST(CanChain, MimeMismatch) { EXPECT_FALSE(can_chain(out(cx("image/tiff")), in(cx("text/xml")))); }

TEST(CanChain, CaseInsensitiveMimeAndConsumerWildcard) {
  EXPECT_TRUE(can_chain(out(cx("Text/Plain", "UTF-8")), in(cx("text/plain"))));
}

TEST(CanChain, MimeCaseByEncodingTable) {
  // rows: consumer mime; columns: (producer enc, consumer enc)
  const std::vector<std::string> consumer_mimes = {"text/plain", "TEXT/PLAIN", "text/xml"};
  using Enc = std::optional<std::string>;
  const std::vector<std::pair<Enc, Enc>> encodings = {{{}, {}}, {"UTF-8", {}}, {{}, "UTF-8"}};
  const bool expected[3][3] = {
      {true, true, false},
      {true, true, false},
      {false, false, false},
  };
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      EXPECT_EQ(can_chain(out(cx("text/plain", encodings[c].first)), in(cx(consumer_mimes[r], encodings[c].second))),
                expected[r][c])
          << "row " << r << " col " << c;
}

TEST(CanChain, Literals) {
  EXPECT_TRUE(can_chain(out(LiteralType{"Double"}), in(LiteralType{"double"})));
  EXPECT_FALSE(can_chain(out(LiteralType{"double"}), in(LiteralType{"string"})));
  EXPECT_FALSE(can_chain(out(LiteralType{"string"}), in(cx("text/plain"))));
}

TEST(CanChain, BBoxIgnoresCrs) {
  EXPECT_TRUE(can_chain(out(BBoxType{"EPSG:4326"}), in(BBoxType{"EPSG:3857"})));
  EXPECT_FALSE(can_chain(out(BBoxType{"EPSG:4326"}), in(LiteralType{"string"})));
}

TEST(CanChain, SchemaRules) {
  EXPECT_TRUE(can_chain(out(cx("text/xml", {}, "http://s/a.xsd")), in(cx("text/xml"))));
  EXPECT_FALSE(can_chain(out(cx("text/xml")), in(cx("text/xml", {}, "http://s/a.xsd"))));
  EXPECT_FALSE(can_chain(out(cx("text/xml", {}, "http://s/b.xsd")), in(cx("text/xml", {}, "http://s/a.xsd"))));
}

TEST(CanChain, WrongDirectionsArePreconditionErrors) {
  EXPECT_THROW(can_chain(in(cx("a/b")), in(cx("a/b"))), PreconditionError);
  EXPECT_THROW(can_chain(out(cx("a/b")), out(cx("a/b"))), PreconditionError);
}

TEST(ChainablePairs, MockCatalogContainsScenarioEdges) {
  auto cat = mock_catalog();
  auto id_of = [&](const std::string& wrapper) {
    for (const auto& d : cat)
      if (d.wrapper_name == wrapper) return d.local_id;
    return std::string();
  };
  auto pairs = chainable_pairs(cat);
  auto has = [&](const std::string& ps, const std::string& pp, const std::string& cs, const std::string& cp) {
    for (const auto& p : pairs)
      if (p.producer.owner_process == id_of(ps) && p.producer.param_id == pp && p.consumer.owner_process == id_of(cs) &&
          p.consumer.param_id == cp)
        return true;
    return false;
  };
  EXPECT_TRUE(has("vector2grid", "result", "g_sum", "a"));
  EXPECT_TRUE(has("road2grid", "result", "g_sum", "b"));
  EXPECT_TRUE(has("g_sum", "result", "g_sum", "a"));
  // a text/plain grid cannot feed a numeric literal
  EXPECT_FALSE(has("g_sum", "result", "road2grid", "sumpol"));
}

TEST(ChainablePairs, EmptyCatalog) { EXPECT_TRUE(chainable_pairs({}).empty()); }

TEST(ChainablePairs, DisjointTypes) {
  catalog::ProcessDescriptor d;
  d.local_id = "p1";
  d.inputs.push_back({{"i", "i", 1, 1, LiteralType{"string"}}, {}, "", ""});
  d.outputs.push_back({{"o", "o", 1, 1, BBoxType{"EPSG:4326"}}, {catalog::WidgetKind::Rectangle, {}, {}, {}}, "", ""});
  EXPECT_TRUE(chainable_pairs({d}).empty());
}

TEST(ChainablePairs, MockCatalogEqualsOracle) {
  auto cat = mock_catalog();
  std::vector<test::OraclePair> got;
  for (const auto& p : chainable_pairs(cat))
    got.push_back({p.producer.owner_process, p.producer.param_id, p.consumer.owner_process, p.consumer.param_id});
  EXPECT_EQ(got, test::oracle_pairs(cat));
}

TEST(Slots, DirectionsAndOrder) {
  auto cat = mock_catalog();
  for (const auto& d : cat) {
    auto slots = slots_of(d);
    ASSERT_EQ(slots.size(), d.inputs.size() + d.outputs.size());
    for (std::size_t i = 0; i < d.inputs.size(); ++i) {
      EXPECT_EQ(slots[i].direction, Direction::In);
      EXPECT_EQ(slots[i].param_id, d.inputs[i].decl.identifier);
    }
    for (std::size_t i = 0; i < d.outputs.size(); ++i)
      EXPECT_EQ(slots[d.inputs.size() + i].direction, Direction::Out);
  }
}
