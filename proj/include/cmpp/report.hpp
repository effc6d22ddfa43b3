#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cmpp::report {

// One result line. `verdict` is "pass", "fail", "inconclusive" or "info";
// only "fail" affects the exit code.
struct Row {
  std::string scenario;
  std::string job;
  std::string quantity;
  std::optional<double> estimate;
  std::optional<double> std_error;
  std::optional<double> oracle;
  std::optional<double> paper_value;
  std::string verdict = "info";
  std::uint64_t seed = 0;
  std::string detail;
};

// Column order of the CSV header.
inline constexpr const char* kCsvHeader = "scenario,job,quantity,estimate,stderr,oracle,paper_value,verdict,seed,detail";

// %.17g; non-finite values print as inf, -inf, nan.
std::string format_double(double v);

void write_csv(std::ostream& out, const std::vector<Row>& rows);
void write_json_lines(std::ostream& out, const std::vector<Row>& rows);

// format is "csv" or "json-lines"; destination "-" is standard output.
// Throws cmpp::Error naming the destination on IO failure.
void write(const std::vector<Row>& rows, const std::string& format, const std::string& destination);

}  // namespace cmpp::report
