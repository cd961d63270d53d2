#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

namespace fasbeam::harness {

// %.9g
std::string format_double(double v);
// Quotes fields holding a comma, quote, CR or LF; doubles embedded quotes.
std::string csv_field(const std::string& s);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);
  void row(std::initializer_list<std::string> fields) { row(std::vector<std::string>(fields)); }

 private:
  std::ostream& out_;
};

}  // namespace fasbeam::harness
