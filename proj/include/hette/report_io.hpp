#pragma once

#include <cstddef>
#include <string>

#include <json.hpp>

#include "hette/core.hpp"

namespace hette {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kReportSchemaVersion = 1;

struct ReportContext {
  std::string input;          // file name as given
  std::string preset;
  std::size_t dropped_rows = 0;
};

/// Self-describing report. Every tuning value that affected the result is
/// echoed; nothing time- or host-dependent is written.
nlohmann::ordered_json report_to_json(const TestReport& report, const TestConfig& config,
                                      const ReportContext& context);

std::string report_summary(const TestReport& report);

}  // namespace hette
