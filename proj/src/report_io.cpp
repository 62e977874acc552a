#include "hette/report_io.hpp"

#include <cmath>
#include <cstdio>

namespace hette {

namespace {

nlohmann::ordered_json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

nlohmann::ordered_json report_to_json(const TestReport& report, const TestConfig& config,
                                      const ReportContext& context) {
  using json = nlohmann::ordered_json;
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["tool"] = "hette";
  j["tool_version"] = kToolVersion;
  j["mode"] = to_string(report.mode);
  j["statistic"] = report.statistic;
  j["p_value"] = report.p_value;
  j["critical_value"] = finite_or_null(report.critical_value);
  j["reject"] = report.reject;
  j["alpha"] = report.alpha;
  j["bandwidth"] = report.bandwidth_used;
  j["n"] = report.n;
  j["n_bootstrap"] = report.n_bootstrap;
  j["seed"] = report.seed;
  j["argmax"] = {{"w", report.argmax.first}, {"x", report.argmax.second}};

  json diags = json::array();
  for (const auto& [name, message] : report.diagnostics) diags.push_back({{"name", name}, {"message", message}});
  j["diagnostics"] = diags;

  json cfg;
  cfg["preset"] = context.preset;
  cfg["kernel"] = config.kernel.name;
  cfg["bandwidth_rule"] = to_string(config.bandwidth_rule.kind);
  if (config.bandwidth_rule.kind == BandwidthRuleKind::Fixed)
    cfg["bandwidth_fixed"] = config.bandwidth_rule.fixed_h;
  else
    cfg["bandwidth_constant"] = config.bandwidth_constant;
  cfg["bandwidth_source"] = report.mode == TestMode::Discrete ? "std(w_hat)" : "std(covariate)";
  cfg["grid_kind"] = to_string(config.grid_kind);
  cfg["grid_w_points"] = report.grid_w_used.size();
  if (report.mode == TestMode::Continuous) cfg["grid_x_points"] = report.grid_x_used.size();
  if (report.mode == TestMode::Continuous) cfg["influence_form"] = to_string(config.influence_form);
  cfg["multiplier"] = to_string(config.multiplier);
  cfg["denominator_floor"] = config.denominator_floor;
  cfg["max_floored_fraction"] = config.max_floored_fraction;
  j["config"] = cfg;

  j["input"] = {{"file", context.input}, {"rows_used", report.n}, {"dropped_rows", context.dropped_rows}};
  j["grid_w"] = report.grid_w_used;
  if (report.mode == TestMode::Continuous) j["grid_x"] = report.grid_x_used;
  return j;
}

std::string report_summary(const TestReport& report) {
  char buf[512];
  const std::string crit = std::isfinite(report.critical_value) ? std::to_string(report.critical_value) : "n/a";
  std::snprintf(buf, sizeof buf,
                "mode        %s\n"
                "n           %zu\n"
                "statistic   %.6f\n"
                "p-value     %.4f  (B = %d)\n"
                "critical    %s  (alpha = %.3g)\n"
                "decision    %s\n"
                "bandwidth   %.6g\n",
                to_string(report.mode), report.n, report.statistic, report.p_value, report.n_bootstrap, crit.c_str(),
                report.alpha, report.reject ? "reject homogeneity" : "do not reject", report.bandwidth_used);
  std::string out = buf;
  for (const auto& [name, message] : report.diagnostics) out += "warning     " + name + ": " + message + "\n";
  return out;
}

}  // namespace hette
