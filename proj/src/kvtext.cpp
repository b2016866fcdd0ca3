#include "flexfp/kvtext.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "flexfp/error.hpp"

namespace flexfp {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view text) {
  const std::string_view t = trim(text);
  if (t == "nan") return std::nan("");
  if (t == "inf" || t == "+inf") return HUGE_VAL;
  if (t == "-inf") return -HUGE_VAL;
  double value = 0.0;
  const char* begin = t.data();
  if (!t.empty() && t.front() == '+') ++begin;
  const auto res = std::from_chars(begin, t.data() + t.size(), value);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size() || t.empty()) {
    throw Error(ErrorCode::ParseError, "not a number: '" + std::string(t) + "'");
  }
  return value;
}

void KvDocument::set(const std::string& key, std::string value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  entries_.emplace_back(key, std::move(value));
}

std::optional<std::string> KvDocument::get(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string KvDocument::require(const std::string& key) const {
  auto v = get(key);
  if (!v) throw Error(ErrorCode::ParseError, "missing key '" + key + "'");
  return *v;
}

double KvDocument::require_number(const std::string& key) const { return parse_number(require(key)); }

std::string KvDocument::to_report_text() const {
  std::string out(kReportHeader);
  out += '\n';
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

KvDocument KvDocument::parse(std::string_view text) {
  KvDocument doc;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string_view key = trim(body.substr(0, eq));
    if (key.empty()) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": empty key");
    doc.set(std::string(key), std::string(trim(body.substr(eq + 1))));
  }
  return doc;
}

KvDocument KvDocument::parse_report(std::string_view text) {
  const auto newline = text.find('\n');
  const std::string_view first = trim(text.substr(0, newline));
  if (first != kReportHeader) {
    throw Error(ErrorCode::ParseError, "expected report header '" + std::string(kReportHeader) + "'");
  }
  return parse(newline == std::string_view::npos ? std::string_view{} : text.substr(newline + 1));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
}

}  // namespace flexfp
