#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace conclab {

// Fixed-format float serialization (17 significant digits, round-trip exact).
std::string format_double(double x);

// Streaming JSON writer with fixed key order and the float format above, so
// one report serializes to identical bytes on every run. Non-finite doubles
// are emitted as strings ("inf", "-inf", "nan").
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(std::string_view name);
  JsonWriter& value(double x);
  JsonWriter& value(long x);
  JsonWriter& value(int x) { return value(static_cast<long>(x)); }
  JsonWriter& value(unsigned long long x);
  JsonWriter& value(bool b);
  JsonWriter& value(std::string_view s);
  JsonWriter& value(const char* s) { return value(std::string_view(s)); }
  JsonWriter& value_raw(std::string_view already_json);

  std::string str() const { return out_; }

 private:
  void comma();
  std::string out_;
  std::vector<bool> needs_comma_;
  bool after_key_ = false;
};

std::string escape_json(std::string_view s);

// CSV with a header row; every numeric cell uses format_double.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string str() const;
};

// Whitespace-separated two-column plot data.
std::string plotdata(const std::vector<std::pair<double, double>>& series);

// Writes via a temp file in the same directory plus rename, so readers never
// observe a partial file.
void atomic_write_file(const std::string& path, std::string_view content);

}  // namespace conclab
