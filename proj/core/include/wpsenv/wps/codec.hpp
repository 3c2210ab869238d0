#pragma once

#include <string>
#include <string_view>

#include "wpsenv/wps/types.hpp"

namespace wpsenv::wps {

// Decoders throw ProtocolError on malformed or non-1.0.0 documents and
// never abort on arbitrary input.

CapabilitiesDoc parse_capabilities(std::string_view xml);
ProcessDescription parse_process_description(std::string_view xml);
ExecuteRequest decode_execute(std::string_view xml);
ExecuteResponse parse_execute_response(std::string_view xml);

/// Returns the report if `xml` is an ows:ExceptionReport, nullopt for any
/// other well-formed document. Throws ProtocolError on malformed XML.
std::optional<ExceptionReport> parse_exception_report(std::string_view xml);

std::string encode_capabilities(const CapabilitiesDoc& doc, std::string_view service_url);
std::string encode_process_descriptions(const std::vector<ProcessDescription>& descs);
std::string encode_execute(const ExecuteRequest& req);
std::string encode_execute_response(const ExecuteResponse& resp);
std::string encode_exception_report(const ExceptionReport& report);

}  // namespace wpsenv::wps
