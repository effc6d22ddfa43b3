#include "cmpp/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "cmpp/errors.hpp"

namespace cmpp::report {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_number(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

std::string json_number(const std::optional<double>& v) {
  if (!v) return "null";
  if (!std::isfinite(*v)) return json_string(format_double(*v));
  return format_double(*v);
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const std::vector<Row>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << csv_field(r.scenario) << ',' << csv_field(r.job) << ',' << csv_field(r.quantity) << ','
        << csv_number(r.estimate) << ',' << csv_number(r.std_error) << ',' << csv_number(r.oracle) << ','
        << csv_number(r.paper_value) << ',' << csv_field(r.verdict) << ',' << r.seed << ',' << csv_field(r.detail)
        << '\n';
  }
}

void write_json_lines(std::ostream& out, const std::vector<Row>& rows) {
  for (const auto& r : rows) {
    out << "{\"scenario\":" << json_string(r.scenario) << ",\"job\":" << json_string(r.job)
        << ",\"quantity\":" << json_string(r.quantity) << ",\"estimate\":" << json_number(r.estimate)
        << ",\"stderr\":" << json_number(r.std_error) << ",\"oracle\":" << json_number(r.oracle)
        << ",\"paper_value\":" << json_number(r.paper_value) << ",\"verdict\":" << json_string(r.verdict)
        << ",\"seed\":" << r.seed << ",\"detail\":" << json_string(r.detail) << "}\n";
  }
}

void write(const std::vector<Row>& rows, const std::string& format, const std::string& destination) {
  auto emit = [&](std::ostream& out) {
    if (format == "csv") {
      write_csv(out, rows);
    } else if (format == "json-lines") {
      write_json_lines(out, rows);
    } else {
      throw Error("unknown report format '" + format + "'");
    }
  };
  if (destination == "-") {
    emit(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(destination, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open report destination '" + destination + "'");
  emit(out);
  out.flush();
  if (!out) throw Error("failed writing report to '" + destination + "'");
}

}  // namespace cmpp::report
