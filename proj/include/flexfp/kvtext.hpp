#pragma once

// Line-oriented "key = value" text used for every machine-readable report and
// for the cost tables. Reports start with a versioned header line.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace flexfp {

inline constexpr std::string_view kReportHeader = "flexfp-report 1";

/// Shortest decimal that parses back to the same double.
std::string format_number(double x);
double parse_number(std::string_view text);

class KvDocument {
 public:
  KvDocument() = default;

  /// Replaces an existing key in place, otherwise appends.
  void set(const std::string& key, std::string value);
  void set(const std::string& key, double value) { set(key, format_number(value)); }
  void set(const std::string& key, std::uint64_t value) { set(key, std::to_string(value)); }
  void set(const std::string& key, int value) { set(key, std::to_string(value)); }

  std::optional<std::string> get(const std::string& key) const;
  /// ParseError naming the key when absent.
  std::string require(const std::string& key) const;
  double require_number(const std::string& key) const;
  bool contains(const std::string& key) const { return get(key).has_value(); }

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  /// With header line; `parse` insists on it.
  std::string to_report_text() const;
  static KvDocument parse_report(std::string_view text);
  /// Header-less variant for configuration files. '#' starts a comment.
  static KvDocument parse(std::string_view text);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace flexfp
