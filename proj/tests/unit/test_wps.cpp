#include <gtest/gtest.h>

#include "generators.hpp"
#include "wpsenv/error.hpp"
#include "wpsenv/wps/codec.hpp"

using namespace wpsenv;
using namespace wpsenv::wps;

namespace {

const char* kCapabilities = R"(<?xml version="1.0" encoding="UTF-8"?>
<wps:Capabilities service="WPS" version="1.0.0" xml:lang="en-US"
    xmlns:wps="http://www.opengis.net/wps/1.0.0" xmlns:ows="http://www.opengis.net/ows/1.1"
    xmlns:xlink="http://www.w3.org/1999/xlink">
  <ows:ServiceIdentification>
    <ows:Title>Mock grid services</ows:Title>
    <ows:ServiceType>WPS</ows:ServiceType>
    <ows:ServiceTypeVersion>1.0.0</ows:ServiceTypeVersion>
  </ows:ServiceIdentification>
  <wps:ProcessOfferings>
    <wps:Process wps:processVersion="1">
      <ows:Identifier>vector2grid</ows:Identifier>
      <ows:Title>Point sources to grid</ows:Title>
    </wps:Process>
    <wps:Process wps:processVersion="1">
      <ows:Identifier>g_sum</ows:Identifier>
      <ows:Title>Grid sum</ows:Title>
      <ows:Abstract>Cell-wise sum; combines grids</ows:Abstract>
    </wps:Process>
  </wps:ProcessOfferings>
</wps:Capabilities>)";

const char* kGsumDescription = R"(<?xml version="1.0" encoding="UTF-8"?>
<wps:ProcessDescriptions service="WPS" version="1.0.0" xml:lang="en-US"
    xmlns:wps="http://www.opengis.net/wps/1.0.0" xmlns:ows="http://www.opengis.net/ows/1.1">
  <ProcessDescription wps:processVersion="1" storeSupported="true" statusSupported="true">
    <ows:Identifier>g_sum</ows:Identifier>
    <ows:Title>Grid sum</ows:Title>
    <DataInputs>
      <Input minOccurs="1" maxOccurs="1">
        <ows:Identifier>a</ows:Identifier>
        <ows:Title>First grid</ows:Title>
        <ComplexData><Default><Format><MimeType>text/plain</MimeType></Format></Default>
          <Supported><Format><MimeType>text/plain</MimeType></Format></Supported></ComplexData>
      </Input>
      <Input minOccurs="1" maxOccurs="1">
        <ows:Identifier>b</ows:Identifier>
        <ows:Title>Second grid</ows:Title>
        <ComplexData><Default><Format><MimeType>text/plain</MimeType></Format></Default>
          <Supported><Format><MimeType>text/plain</MimeType></Format></Supported></ComplexData>
      </Input>
      <Input minOccurs="0" maxOccurs="1">
        <ows:Identifier>scale</ows:Identifier>
        <ows:Title>Scale</ows:Title>
        <LiteralData><ows:DataType ows:reference="xs:double">double</ows:DataType><ows:AnyValue/></LiteralData>
      </Input>
      <Input minOccurs="0" maxOccurs="1">
        <ows:Identifier>extent</ows:Identifier>
        <ows:Title>Extent</ows:Title>
        <BoundingBoxData><Default><CRS>EPSG:4326</CRS></Default><Supported><CRS>EPSG:4326</CRS></Supported></BoundingBoxData>
      </Input>
    </DataInputs>
    <ProcessOutputs>
      <Output>
        <ows:Identifier>result</ows:Identifier>
        <ows:Title>Sum</ows:Title>
        <ComplexOutput><Default><Format><MimeType>text/plain</MimeType></Format></Default>
          <Supported><Format><MimeType>text/plain</MimeType></Format></Supported></ComplexOutput>
      </Output>
    </ProcessOutputs>
  </ProcessDescription>
</wps:ProcessDescriptions>)";

std::string response_doc(const std::string& status_inner) {
  return R"(<?xml version="1.0" encoding="UTF-8"?>
<wps:ExecuteResponse service="WPS" version="1.0.0" xml:lang="en-US"
    xmlns:wps="http://www.opengis.net/wps/1.0.0" xmlns:ows="http://www.opengis.net/ows/1.1"
    xmlns:xlink="http://www.w3.org/1999/xlink" serviceInstance="http://h/wps">
  <wps:Process><ows:Identifier>slow_echo</ows:Identifier><ows:Title>Slow echo</ows:Title></wps:Process>
  <wps:Status creationTime="2026-10-15T08:30:00.125Z">)" +
         status_inner + R"(</wps:Status>
</wps:ExecuteResponse>)";
}

}  // namespace

TEST(Capabilities, TwoProcessesInDocumentOrder) {
  auto doc = parse_capabilities(kCapabilities);
  ASSERT_EQ(doc.process_briefs.size(), 2u);
  EXPECT_EQ(doc.process_briefs[0].identifier, "vector2grid");
  EXPECT_EQ(doc.process_briefs[1].identifier, "g_sum");
  EXPECT_FALSE(doc.process_briefs[0].abstract.has_value());
  EXPECT_EQ(doc.process_briefs[1].abstract, "Cell-wise sum; combines grids");
  EXPECT_EQ(doc.service_title, "Mock grid services");
}

TEST(Capabilities, EmptyOfferings) {
  std::string xml = kCapabilities;
  auto a = xml.find("<wps:ProcessOfferings>"), b = xml.find("</wps:ProcessOfferings>");
  xml = xml.substr(0, a) + "<wps:ProcessOfferings/>" + xml.substr(b + std::string("</wps:ProcessOfferings>").size());
  EXPECT_TRUE(parse_capabilities(xml).process_briefs.empty());
}

TEST(Capabilities, MissingOfferingsIsProtocolError) {
  std::string xml = kCapabilities;
  auto a = xml.find("<wps:ProcessOfferings>"), b = xml.find("</wps:ProcessOfferings>");
  xml = xml.substr(0, a) + xml.substr(b + std::string("</wps:ProcessOfferings>").size());
  EXPECT_THROW(parse_capabilities(xml), ProtocolError);
}

TEST(Capabilities, TruncatedIsProtocolError) {
  std::string xml = kCapabilities;
  EXPECT_THROW(parse_capabilities(xml.substr(0, xml.size() / 2)), ProtocolError);
  EXPECT_THROW(parse_capabilities("<html><body>nope</body></html>"), ProtocolError);
}

TEST(Capabilities, WrongVersionIsProtocolError) {
  std::string xml = kCapabilities;
  xml.replace(xml.find("version=\"1.0.0\""), 15, "version=\"2.0.0\"");
  EXPECT_THROW(parse_capabilities(xml), ProtocolError);
}

TEST(Capabilities, EncodeParseRoundTrip) {
  CapabilitiesDoc doc{"svc & co", {{"a", "A <1>", std::nullopt}, {"b", "B", "about b"}}};
  auto back = parse_capabilities(encode_capabilities(doc, "http://h:1/wps"));
  EXPECT_EQ(back, doc);
}

TEST(ProcessDescription, GsumShape) {
  auto d = parse_process_description(kGsumDescription);
  EXPECT_EQ(d.identifier, "g_sum");
  ASSERT_EQ(d.inputs.size(), 4u);
  ASSERT_EQ(d.outputs.size(), 1u);
  EXPECT_EQ(d.inputs[0].identifier, "a");
  EXPECT_EQ(d.inputs[1].identifier, "b");
  auto* c = std::get_if<ComplexType>(&d.inputs[0].dtype);
  ASSERT_NE(c, nullptr);
  EXPECT_EQ(c->mime, "text/plain");
  EXPECT_FALSE(c->encoding.has_value());
  EXPECT_FALSE(c->schema.has_value());
  EXPECT_EQ(d.inputs[2].dtype, DataTypeSpec(LiteralType{"double"}));
  EXPECT_EQ(d.inputs[2].min_occurs, 0u);
  EXPECT_EQ(d.inputs[3].dtype, DataTypeSpec(BBoxType{"EPSG:4326"}));
  EXPECT_TRUE(d.store_supported);
  EXPECT_TRUE(d.status_supported);
}

TEST(ProcessDescription, MissingIdentifierIsProtocolError) {
  std::string xml = kGsumDescription;
  auto a = xml.find("<ows:Identifier>g_sum</ows:Identifier>");
  xml.erase(a, std::string("<ows:Identifier>g_sum</ows:Identifier>").size());
  EXPECT_THROW(parse_process_description(xml), ProtocolError);
}

TEST(ProcessDescription, UnsupportedDataFormIsProtocolError) {
  std::string xml = kGsumDescription;
  auto a = xml.find("<LiteralData>");
  auto b = xml.find("</LiteralData>") + std::string("</LiteralData>").size();
  xml.replace(a, b - a, "<Mystery/>");
  EXPECT_THROW(parse_process_description(xml), ProtocolError);
}

TEST(ProcessDescription, EncodeParseRoundTripKeepsOrder) {
  test::Gen g(7);
  for (int i = 0; i < 50; ++i) {
    ProcessDescription d;
    d.identifier = g.identifier();
    d.title = g.text(10);
    if (g.coin()) d.abstract = g.text(20);
    std::set<std::string> used;
    for (int k = g.range(0, 5); k > 0; --k) {
      ParamDecl p{g.identifier(), g.text(8), static_cast<unsigned>(g.range(0, 1)), 1, g.dtype()};
      if (used.insert(p.identifier).second) d.inputs.push_back(p);
    }
    for (int k = g.range(0, 3); k > 0; --k) {
      ParamDecl p{g.identifier(), g.text(8), 1, 1, g.dtype()};
      if (used.insert(p.identifier).second) d.outputs.push_back(p);
    }
    d.store_supported = g.coin();
    d.status_supported = g.coin();
    auto back = parse_process_description(encode_process_descriptions({d}));
    EXPECT_EQ(back, d) << encode_process_descriptions({d});
  }
}

TEST(Execute, SingleLiteral) {
  ExecuteRequest r{"g", {{"n", LiteralVal{"42"}}}, {}};
  auto xml = encode_execute(r);
  EXPECT_NE(xml.find("<ows:Identifier>n</ows:Identifier>"), std::string::npos);
  EXPECT_NE(xml.find(">42</wps:LiteralData>"), std::string::npos);
  EXPECT_EQ(decode_execute(xml), r);
}

TEST(Execute, ReferenceCarriesHref) {
  ExecuteRequest r{"g", {{"a", ComplexRef{"http://h/files/abc?x=1&y=2", "text/plain"}}}, {}};
  auto xml = encode_execute(r);
  EXPECT_NE(xml.find("<wps:Reference"), std::string::npos);
  EXPECT_NE(xml.find("xlink:href=\"http://h/files/abc?x=1&amp;y=2\""), std::string::npos);
  EXPECT_EQ(decode_execute(xml), r);
}

TEST(Execute, BBoxCorners) {
  ExecuteRequest r{"g", {{"ext", BBoxVal{0, 0, 10, 10, "EPSG:4326"}}}, {}};
  auto xml = encode_execute(r);
  EXPECT_NE(xml.find("<ows:LowerCorner>0 0</ows:LowerCorner>"), std::string::npos);
  EXPECT_NE(xml.find("<ows:UpperCorner>10 10</ows:UpperCorner>"), std::string::npos);
  EXPECT_EQ(decode_execute(xml), r);
}

TEST(Execute, UnknownProcessAndEmptyInputs) {
  ExecuteRequest r{"no_such_process", {}, {true, true, {"out"}}};
  EXPECT_EQ(decode_execute(encode_execute(r)), r);
}

TEST(Execute, FiftyRandomRequestsRoundTrip) {
  test::Gen g(50);
  for (int i = 0; i < 50; ++i) {
    auto r = g.request();
    EXPECT_EQ(decode_execute(encode_execute(r)), r) << encode_execute(r);
  }
}

TEST(Execute, WhitespaceInLiteralsSurvives) {
  ExecuteRequest r{"g", {{"a", LiteralVal{"  padded  "}}, {"b", LiteralVal{""}}, {"c", ComplexInline{"\n x \n", "text/plain"}}}, {}};
  EXPECT_EQ(decode_execute(encode_execute(r)), r);
}

TEST(ExecuteResponse, StartedPercent) {
  auto r = parse_execute_response(response_doc(R"(<wps:ProcessStarted percentCompleted="42">busy</wps:ProcessStarted>)"));
  EXPECT_EQ(r.status.state, StatusState(Started{42}));
  EXPECT_EQ(r.process_id, "slow_echo");
}

TEST(ExecuteResponse, StartedWithoutPercentIsZero) {
  auto r = parse_execute_response(response_doc(R"(<wps:ProcessStarted>busy</wps:ProcessStarted>)"));
  EXPECT_EQ(r.status.state, StatusState(Started{0}));
}

TEST(ExecuteResponse, PercentClamped) {
  auto hi = parse_execute_response(response_doc(R"(<wps:ProcessStarted percentCompleted="150"/>)"));
  EXPECT_EQ(hi.status.state, StatusState(Started{99}));
  auto lo = parse_execute_response(response_doc(R"(<wps:ProcessStarted percentCompleted="-3"/>)"));
  EXPECT_EQ(lo.status.state, StatusState(Started{0}));
}

TEST(ExecuteResponse, FailedText) {
  auto r = parse_execute_response(response_doc(
      R"(<wps:ProcessFailed><ows:ExceptionReport version="1.0.0"><ows:Exception exceptionCode="NoApplicableCode"><ows:ExceptionText>disk full</ows:ExceptionText></ows:Exception></ows:ExceptionReport></wps:ProcessFailed>)"));
  EXPECT_EQ(r.status.state, StatusState(Failed{"disk full"}));
}

TEST(ExecuteResponse, SucceededWithReference) {
  std::string doc = response_doc("<wps:ProcessSucceeded>done</wps:ProcessSucceeded>");
  doc.replace(doc.find("</wps:ExecuteResponse>"), 0,
              R"(<wps:ProcessOutputs><wps:Output><ows:Identifier>echo</ows:Identifier><ows:Title>Echo</ows:Title>
<wps:Reference href="http://h/wps/outputs/i1/echo" mimeType="text/plain"/></wps:Output></wps:ProcessOutputs>)");
  auto r = parse_execute_response(doc);
  EXPECT_EQ(r.status.state, StatusState(Succeeded{}));
  ASSERT_EQ(r.outputs.size(), 1u);
  EXPECT_EQ(r.outputs[0].first, "echo");
  EXPECT_EQ(r.outputs[0].second, InputValue(ComplexRef{"http://h/wps/outputs/i1/echo", "text/plain"}));
  EXPECT_EQ(format_instant(r.status.timestamp), "2026-10-15T08:30:00.125Z");
}

TEST(ExecuteResponse, EncodedForms) {
  ExecuteResponse ok{"p", {Succeeded{}, {}}, std::nullopt, {{"out", LiteralVal{"ok"}}}};
  auto xml = encode_execute_response(ok);
  EXPECT_NE(xml.find("<wps:ProcessSucceeded"), std::string::npos);
  EXPECT_NE(xml.find(">ok</wps:LiteralData>"), std::string::npos);

  ExecuteResponse acc{"p", {Accepted{}, {}}, "http://h/wps/status/i1", {}};
  xml = encode_execute_response(acc);
  EXPECT_NE(xml.find("statusLocation=\"http://h/wps/status/i1\""), std::string::npos);

  ExecuteResponse failed{"p", {Failed{"x"}, {}}, std::nullopt, {}};
  xml = encode_execute_response(failed);
  EXPECT_NE(xml.find("<ows:ExceptionText>x</ows:ExceptionText>"), std::string::npos);
}

TEST(ExecuteResponse, RandomRoundTrip) {
  test::Gen g(99);
  for (int i = 0; i < 200; ++i) {
    auto r = g.response();
    EXPECT_EQ(parse_execute_response(encode_execute_response(r)), r) << encode_execute_response(r);
  }
}

TEST(ExceptionReport, RoundTripAndNonReports) {
  ExceptionReport rep{"InvalidParameterValue", "no such process", "identifier"};
  auto back = parse_exception_report(encode_exception_report(rep));
  ASSERT_TRUE(back);
  EXPECT_EQ(back->code, rep.code);
  EXPECT_EQ(back->text, rep.text);
  EXPECT_EQ(back->locator, rep.locator);
  EXPECT_FALSE(parse_exception_report(kCapabilities).has_value());
  EXPECT_THROW(parse_exception_report("<a>"), ProtocolError);
}

TEST(Decoders, UnknownElementsAreIgnored) {
  std::string xml = kCapabilities;
  xml.replace(xml.find("<wps:ProcessOfferings>"), 0, "<vendor:Extra xmlns:vendor=\"urn:v\"><x/></vendor:Extra>");
  EXPECT_EQ(parse_capabilities(xml).process_briefs.size(), 2u);
}

TEST(Decoders, ForeignNamespaceIsNotWps) {
  std::string xml = kCapabilities;
  // same local names, different namespace: not a WPS document
  auto pos = xml.find("http://www.opengis.net/wps/1.0.0");
  xml.replace(pos, std::string("http://www.opengis.net/wps/1.0.0").size(), "urn:other");
  EXPECT_THROW(parse_capabilities(xml), ProtocolError);
}
