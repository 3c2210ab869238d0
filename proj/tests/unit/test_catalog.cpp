#include <gtest/gtest.h>

#include <fstream>

#include "support.hpp"
#include "wpsenv/catalog/catalog.hpp"
#include "wpsenv/catalog/validation.hpp"
#include "wpsenv/mock/services.hpp"
#include "wpsenv/store/datastore.hpp"

using namespace wpsenv;
using namespace wpsenv::catalog;

namespace {

WidgetDescriptor widget(WidgetKind k, std::optional<double> min = {}, std::optional<double> max = {}) {
  return {k, min, max, std::nullopt};
}

ProcessDescriptor remote_stub(std::string wrapper) {
  ProcessDescriptor d;
  d.display_name = "Stub " + wrapper;
  d.description = "a stub";
  d.endpoint = "http://example.org/wps";
  d.remote_identifier = "stub";
  d.wrapper_name = std::move(wrapper);
  BoundParam p;
  p.decl = {"x", "X", 1, 1, wps::LiteralType{"double"}};
  p.widget = widget(WidgetKind::Number, 0, 10);
  d.inputs.push_back(p);
  return d;
}

class ValidationTest : public ::testing::Test {
 protected:
  test::TempDir dir;
  store::Datastore store{dir.path()};
  void SetUp() override { store.put_file("alice", "in/a.csv", "x"); }
  ValidatedValue v(WidgetDescriptor w, std::string_view raw) { return validate_input(w, raw, "alice", store); }
  std::string rejected_widget(WidgetDescriptor w, std::string_view raw) {
    try {
      validate_input(w, raw, "alice", store);
    } catch (const ValidationError& e) {
      return e.widget();
    }
    return "<accepted>";
  }
};

}  // namespace

TEST_F(ValidationTest, Edit) { EXPECT_EQ(v(widget(WidgetKind::Edit), " any <text> "), ValidatedValue(Text{" any <text> "})); }

TEST_F(ValidationTest, NumberRangeAndFormat) {
  auto w = widget(WidgetKind::Number, 0, 10);
  EXPECT_EQ(v(w, "2.5"), ValidatedValue(Number{2.5}));
  EXPECT_EQ(v(w, "1e1"), ValidatedValue(Number{10}));
  EXPECT_EQ(v(w, "0"), ValidatedValue(Number{0}));
  EXPECT_EQ(rejected_widget(w, "-0.1"), "number");
  EXPECT_EQ(rejected_widget(w, "10.0001"), "number");
  EXPECT_EQ(rejected_widget(w, "abc"), "number");
  EXPECT_EQ(rejected_widget(w, "nan"), "number");
  EXPECT_EQ(rejected_widget(w, "inf"), "number");
  EXPECT_EQ(rejected_widget(w, ""), "number");
}

TEST_F(ValidationTest, Checkbox) {
  auto w = widget(WidgetKind::Checkbox);
  EXPECT_EQ(v(w, "true"), ValidatedValue(Flag{true}));
  EXPECT_EQ(v(w, "false"), ValidatedValue(Flag{false}));
  EXPECT_EQ(rejected_widget(w, "TRUE"), "checkbox");
  EXPECT_EQ(rejected_widget(w, "1"), "checkbox");
}

TEST_F(ValidationTest, Rectangle) {
  auto w = widget(WidgetKind::Rectangle);
  EXPECT_EQ(v(w, "0,1,2,3"), ValidatedValue(Extent{0, 1, 2, 3}));
  EXPECT_EQ(v(w, "POLYGON((0 0, 4 0, 4 3, 0 3, 0 0))"), ValidatedValue(Extent{0, 0, 4, 3}));
  EXPECT_EQ(v(w, "polygon((1 1, 2 5, -1 2))"), ValidatedValue(Extent{-1, 1, 2, 5}));
  EXPECT_EQ(rejected_widget(w, "2,0,1,1"), "rectangle");
  EXPECT_EQ(rejected_widget(w, "0,0,1"), "rectangle");
  EXPECT_EQ(rejected_widget(w, "POLYGON((0 0, 1 1))"), "rectangle");
  EXPECT_EQ(rejected_widget(w, "POLYGON((0 0 0, 1 1 1, 2 2 2))"), "rectangle");
}

TEST_F(ValidationTest, Files) {
  EXPECT_EQ(v(widget(WidgetKind::File), "in/a.csv"), ValidatedValue(FilePath{"in/a.csv"}));
  EXPECT_EQ(v(widget(WidgetKind::File), "/in/./a.csv"), ValidatedValue(FilePath{"in/a.csv"}));
  EXPECT_EQ(rejected_widget(widget(WidgetKind::File), "in/missing.csv"), "file");
  EXPECT_EQ(rejected_widget(widget(WidgetKind::File), "../bob/x"), "file");
  EXPECT_EQ(v(widget(WidgetKind::FileSave), "out/new.asc"), ValidatedValue(SavePath{"out/new.asc"}));
  EXPECT_EQ(rejected_widget(widget(WidgetKind::FileSave), "a/../../b"), "file_save");
}

TEST_F(ValidationTest, Tables) {
  EXPECT_EQ(v(widget(WidgetKind::SelectTable), "roads"), ValidatedValue(TableRef{"roads", std::nullopt}));
  EXPECT_EQ(v(widget(WidgetKind::SelectTableAttr), "roads.q"), ValidatedValue(TableRef{"roads", "q"}));
  EXPECT_EQ(rejected_widget(widget(WidgetKind::SelectTable), "1roads"), "select_table");
  EXPECT_EQ(rejected_widget(widget(WidgetKind::SelectTableAttr), "roads"), "select_table_attr");
}

TEST(Widgets, CompatibilityTable) {
  EXPECT_TRUE(widget_compatible(WidgetKind::Number, wps::LiteralType{"integer"}));
  EXPECT_FALSE(widget_compatible(WidgetKind::Number, wps::LiteralType{"string"}));
  EXPECT_TRUE(widget_compatible(WidgetKind::File, wps::ComplexType{"text/plain", {}, {}}));
  EXPECT_FALSE(widget_compatible(WidgetKind::Edit, wps::ComplexType{"text/plain", {}, {}}));
  EXPECT_TRUE(widget_compatible(WidgetKind::Rectangle, wps::BBoxType{"EPSG:4326"}));
  EXPECT_THROW(check(widget(WidgetKind::Edit, 0, 1)), ValidationError);
  EXPECT_THROW(check(widget(WidgetKind::Number, 2, 1)), ValidationError);
}

TEST(Catalog, AddAssignsIdsAndRejectsDuplicates) {
  Catalog cat;
  auto a = cat.add(remote_stub("alpha"));
  auto b = cat.add(remote_stub("beta"));
  EXPECT_EQ(a.local_id, "p0001");
  EXPECT_EQ(b.local_id, "p0002");
  EXPECT_THROW(cat.add(remote_stub("alpha")), DuplicateWrapper);
  EXPECT_THROW(cat.add(remote_stub("9lives")), ValidationError);
  EXPECT_EQ(cat.all().size(), 2u);
  EXPECT_EQ(cat.resolve("beta")->local_id, "p0002");
  EXPECT_EQ(cat.resolve("p0001")->wrapper_name, "alpha");
  EXPECT_FALSE(cat.resolve("gamma"));
}

TEST(Catalog, RejectsIncompatibleWidget) {
  Catalog cat;
  auto d = remote_stub("bad");
  d.inputs[0].widget = widget(WidgetKind::File);
  EXPECT_THROW(cat.add(d), ValidationError);
  EXPECT_TRUE(cat.all().empty());
}

TEST(Catalog, SearchIsCaseInsensitiveAndSorted) {
  Catalog cat;
  mock::register_builtins(cat);
  auto hits = cat.search("grid");
  std::vector<std::string> names;
  for (const auto& h : hits) names.push_back(h.wrapper_name);
  // display names: "Grid sum", "Point sources to grid", "Road sources to grid"
  EXPECT_EQ(names, (std::vector<std::string>{"g_sum", "vector2grid", "road2grid"}));
  EXPECT_EQ(cat.search("").size(), 4u);
  EXPECT_EQ(cat.search("DELAY").size(), 1u);
  EXPECT_TRUE(cat.search("zzz").empty());
}

TEST(Catalog, PersistenceRoundTrip) {
  test::TempDir dir;
  auto file = dir.path() / "catalog.json";
  std::vector<ProcessDescriptor> before;
  {
    Catalog cat(file);
    mock::register_builtins(cat);
    cat.add(remote_stub("alpha"));
    ProcessDescriptor s = remote_stub("scen");
    s.kind = ProcessKind::Scenario;
    s.endpoint = std::string(kLocalEndpoint);
    s.scenario = ScenarioSource{"function scen(x) { return x; }", "scen", "alice"};
    cat.add(s);
    before = cat.all();
  }
  Catalog again(file);
  EXPECT_EQ(again.all(), before);
  EXPECT_TRUE(again.remove(before[0].local_id));
  EXPECT_EQ(Catalog(file).all().size(), before.size() - 1);
}

TEST(Catalog, CorruptFileIsRejected) {
  test::TempDir dir;
  auto file = dir.path() / "catalog.json";
  std::ofstream(file) << "{not json";
  EXPECT_THROW(Catalog{file}, ValidationError);
}

TEST(Catalog, DefaultWrapperNames) {
  Catalog cat;
  EXPECT_EQ(cat.default_wrapper_name("Buffer.Polygon"), "buffer_polygon");
  EXPECT_EQ(cat.default_wrapper_name("3d-view"), "_3d_view");
  cat.add(remote_stub("buffer_polygon"));
  EXPECT_EQ(cat.default_wrapper_name("Buffer.Polygon"), "buffer_polygon_2");
}

TEST(Registration, BeginValidatesFields) {
  EXPECT_THROW(begin_registration("x", "", "ftp://host/wps"), ValidationError);
  EXPECT_THROW(begin_registration("", "", "http://host/wps"), ValidationError);
  auto d = begin_registration("Name", "Desc", "http://host:9/wps");
  EXPECT_EQ(d.endpoint, "http://host:9/wps");
  EXPECT_FALSE(d.selected);
}

TEST(Registration, UnreachableEndpointIsNetworkError) {
  auto d = begin_registration("Name", "", "http://127.0.0.1:" + std::to_string(test::free_port()) + "/wps");
  EXPECT_THROW(list_remote_processes(d), NetworkError);
}

TEST(Registration, FourStepsAgainstLiveEndpoint) {
  test::LiveServer srv;
  Catalog cat;
  auto draft = begin_registration("Remote sum", "sum via WPS", srv.wps_url());
  auto listed = list_remote_processes(draft);
  std::vector<std::string> ids;
  for (const auto& b : listed) ids.push_back(b.identifier);
  EXPECT_NE(std::find(ids.begin(), ids.end(), "g_sum"), ids.end());

  EXPECT_THROW(select_remote_process(draft, "not_offered"), ValidationError);
  select_remote_process(draft, "g_sum");
  ASSERT_TRUE(draft.selected);
  ASSERT_EQ(draft.selected->inputs.size(), 2u);

  // an input without a binding fails and registers nothing
  EXPECT_THROW(cat.finalize_registration(draft, {{"a", widget(WidgetKind::File), "", ""}}, ""), ValidationError);
  // wrong widget for a complex parameter
  EXPECT_THROW(cat.finalize_registration(draft,
                                         {{"a", widget(WidgetKind::Number), "", ""},
                                          {"b", widget(WidgetKind::File), "", ""}},
                                         ""),
               ValidationError);
  EXPECT_THROW(cat.finalize_registration(draft, {{"zz", widget(WidgetKind::File), "", ""}}, ""), ValidationError);
  EXPECT_TRUE(cat.all().empty());

  auto d = cat.finalize_registration(
      draft, {{"a", widget(WidgetKind::File), "Grid A", "first"}, {"b", widget(WidgetKind::File), "", ""}}, "");
  EXPECT_EQ(d.kind, ProcessKind::Remote);
  EXPECT_EQ(d.wrapper_name, "g_sum");
  EXPECT_EQ(d.remote_identifier, "g_sum");
  EXPECT_EQ(d.inputs[0].human_name, "Grid A");
  EXPECT_EQ(d.outputs[0].widget.kind, WidgetKind::FileSave);
  EXPECT_TRUE(d.store_supported);
  EXPECT_EQ(cat.all().size(), 1u);
  EXPECT_THROW(cat.finalize_registration(
                   draft, {{"a", widget(WidgetKind::File), "", ""}, {"b", widget(WidgetKind::File), "", ""}}, "g_sum"),
               DuplicateWrapper);
  EXPECT_EQ(cat.default_wrapper_name("g_sum"), "g_sum_2");
}

TEST(Registration, FailedSaveLeavesCatalogUntouched) {
  test::TempDir dir;
  auto file = dir.path() / "catalog.json";
  Catalog cat(file);
  cat.add(remote_stub("alpha"));
  // a non-empty directory where the file was makes the final rename fail
  std::filesystem::remove(file);
  std::filesystem::create_directories(file / "blocker");
  EXPECT_THROW(cat.add(remote_stub("beta")), std::exception);
  EXPECT_EQ(cat.all().size(), 1u);
  EXPECT_FALSE(cat.find_by_wrapper("beta"));
}
