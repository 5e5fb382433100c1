#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "lpoa/analysis.hpp"
#include "lpoa/driver.hpp"
#include "lpoa/lp_checks.hpp"

namespace lpoa {

using Json = nlohmann::json;

inline constexpr int kTraceSchemaVersion = 1;

/// A trace document that cannot be read back (syntax, schema or value error).
class MalformedTrace : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json polytope_to_json(const Polytope& poly);

/// Schema v1. Everything that depends on timing or the machine (wall clock
/// times, thread count) lives under "metadata"; the rest is a pure function
/// of the configuration.
Json trace_to_json(const RunTrace& trace);
std::string serialize_trace(const RunTrace& trace);

RunTrace trace_from_json(const Json& doc);
RunTrace parse_trace(const std::string& text);
RunTrace load_trace(const std::string& path);

Json report_to_json(const LemmaReport& r);
Json verification_to_json(const TraceVerification& v);
Json property_check_to_json(const PropertyCheck& c);

/// Writes to a temporary file next to path and renames it into place.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace lpoa
