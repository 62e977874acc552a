#include "hette/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <string_view>
#include <vector>

namespace hette {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '"')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(delim, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool is_missing(std::string_view s) { return s.empty() || s == "NA" || s == "NaN" || s == "nan" || s == "."; }

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

double parse_number(std::string_view s, std::size_t line, const std::string& column) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw InputError(at_line(line) + "cannot parse '" + std::string(s) + "' in column " + column);
  return v;
}

}  // namespace

Dataset read_dataset(std::istream& in, const DatasetOptions& options) {
  Dataset ds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw InputError("input is empty");
  ds.delimiter = line.find('\t') != std::string::npos ? '\t' : ',';
  const auto header = split(line, ds.delimiter);

  const ColumnNames& names = options.columns;
  const std::string* wanted[4] = {&names.outcome, &names.treatment, &names.instrument, &names.covariate};
  std::size_t index[4];
  for (int k = 0; k < 4; ++k) {
    const auto it = std::find(header.begin(), header.end(), std::string_view(*wanted[k]));
    if (it == header.end()) throw InputError("missing column '" + *wanted[k] + "'");
    index[k] = static_cast<std::size_t>(it - header.begin());
  }

  Sample& s = ds.sample;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ds.delimiter);
    if (fields.size() != header.size())
      throw InputError(at_line(line_no) + "expected " + std::to_string(header.size()) + " fields, found " +
                       std::to_string(fields.size()));
    ++ds.rows_read;
    if (std::any_of(std::begin(index), std::end(index), [&](std::size_t k) { return is_missing(fields[k]); })) {
      ++ds.dropped_rows;
      continue;
    }
    double v[4];
    for (int k = 0; k < 4; ++k) v[k] = parse_number(fields[index[k]], line_no, *wanted[k]);
    for (int k : {1, 2})
      if (v[k] != 0.0 && v[k] != 1.0)
        throw InputError(at_line(line_no) + "column " + *wanted[k] + " must be 0 or 1");
    s.outcome.push_back(v[0]);
    s.treatment.push_back(static_cast<int>(v[1]));
    s.instrument.push_back(static_cast<int>(v[2]));
    s.covariate.push_back(v[3]);
  }

  const std::set<double> distinct(s.covariate.begin(), s.covariate.end());
  ds.distinct_covariate_values = distinct.size();
  s.covariate_kind = options.kind.value_or(distinct.size() <= options.max_discrete_levels ? CovariateKind::Discrete
                                                                                            : CovariateKind::Continuous);
  return ds;
}

Dataset read_dataset_file(const std::string& path, const DatasetOptions& options) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return read_dataset(in, options);
}

void write_dataset(std::ostream& out, const Sample& sample, const ColumnNames& columns) {
  out << columns.outcome << ',' << columns.treatment << ',' << columns.instrument << ',' << columns.covariate << '\n';
  // shortest text that reads back to the same double
  char buf[32];
  const auto put = [&](double v) { out.write(buf, std::to_chars(buf, buf + sizeof buf, v).ptr - buf); };
  for (std::size_t i = 0; i < sample.size(); ++i) {
    put(sample.outcome[i]);
    out << ',' << sample.treatment[i] << ',' << sample.instrument[i] << ',';
    put(sample.covariate[i]);
    out << '\n';
  }
}

}  // namespace hette
