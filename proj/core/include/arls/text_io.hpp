#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace arls {

/// Formats a double with %.17g, which round-trips every finite value exactly.
/// Non-finite values print as inf/-inf/nan.
std::string format_double(double value);

/// Strict full-token parses; throw std::runtime_error on trailing junk,
/// empty input, or range errors.
double parse_double(const std::string& token);
long long parse_int(const std::string& token);

/// Writes content verbatim in binary mode (LF line endings are preserved
/// as written). Throws std::runtime_error on I/O failure.
void write_file(const std::string& path, const std::string& content);

/// Reads a whole file; throws std::runtime_error if it cannot be opened.
std::string read_file(const std::string& path);

/// Splits a string on any amount of blank/tab whitespace.
std::vector<std::string> split_tokens(const std::string& line);

/// Minimal deterministic JSON emitter. Keys keep insertion order and all
/// numbers are printed with %.17g; non-finite doubles become null (JSON has
/// no inf/nan). Enough for the report/estimate payloads this project emits —
/// parsing (in tests) is done with a real JSON library.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array(const std::string& key = "");
  JsonWriter& end_array();
  JsonWriter& key(const std::string& name);
  JsonWriter& value(double v);
  JsonWriter& value(int v);
  JsonWriter& value(long long v);
  JsonWriter& value(std::uint64_t v);
  JsonWriter& value(bool v);
  JsonWriter& value(const std::string& v);
  JsonWriter& value(const char* v);
  JsonWriter& null_value();

  /// Convenience: key(name).value(v).
  template <typename T>
  JsonWriter& field(const std::string& name, const T& v) {
    key(name);
    return value(v);
  }

  const std::string& str() const { return out_; }

 private:
  void separate();
  static std::string escape(const std::string& s);

  std::string out_;
  std::vector<bool> needs_comma_;
  bool pending_key_ = false;
};

}  // namespace arls
