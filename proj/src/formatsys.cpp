#include "flexfp/formatsys.hpp"

#include <fstream>
#include <sstream>

namespace flexfp {

FloatFormat format_of(NamedFormat n) {
  switch (n) {
    case NamedFormat::binary8: return formats::binary8;
    case NamedFormat::binary16: return formats::binary16;
    case NamedFormat::binary16alt: return formats::binary16alt;
    case NamedFormat::binary32: return formats::binary32;
  }
  return formats::binary32;
}

std::string_view to_string(NamedFormat n) {
  switch (n) {
    case NamedFormat::binary8: return "binary8";
    case NamedFormat::binary16: return "binary16";
    case NamedFormat::binary16alt: return "binary16alt";
    case NamedFormat::binary32: return "binary32";
  }
  return "binary32";
}

std::optional<NamedFormat> named_format(FloatFormat f) {
  for (NamedFormat n : kNamedFormats) {
    if (format_of(n) == f) return n;
  }
  return std::nullopt;
}

int storage_width(NamedFormat n) { return format_of(n).width(); }

FormatMap::FormatMap(std::vector<FormatMapEntry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw Error(ErrorCode::OutOfRange, "format map has no entries");
  int previous = 0;
  for (const FormatMapEntry& e : entries_) {
    if (e.p_max <= previous) {
      throw Error(ErrorCode::OutOfRange, "format map bounds must be strictly increasing (got " +
                                             std::to_string(e.p_max) + " after " +
                                             std::to_string(previous) + ")");
    }
    if (e.exp_bits < FloatFormat::kMinExpBits || e.exp_bits > FloatFormat::kMaxExpBits) {
      throw Error(ErrorCode::OutOfRange,
                  "exponent width " + std::to_string(e.exp_bits) + " outside [2,11]");
    }
    previous = e.p_max;
  }
  if (previous != kMaxPrecision) {
    throw Error(ErrorCode::OutOfRange, "format map must end at precision 24");
  }
}

FormatMap FormatMap::parse(std::string_view text) {
  std::vector<FormatMapEntry> entries;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    FormatMapEntry e{};
    if (!(fields >> e.p_max)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw Error(ErrorCode::ParseError, "format map line " + std::to_string(line_no));
    }
    std::string rest;
    if (!(fields >> e.exp_bits) || (fields >> rest)) {
      throw Error(ErrorCode::ParseError, "format map line " + std::to_string(line_no) +
                                             ": expected 'p_max exp_bits'");
    }
    entries.push_back(e);
  }
  return FormatMap(std::move(entries));
}

FormatMap FormatMap::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open format map '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str());
}

std::string FormatMap::to_text() const {
  std::string out;
  for (const FormatMapEntry& e : entries_) {
    out += std::to_string(e.p_max) + " " + std::to_string(e.exp_bits) + "\n";
  }
  return out;
}

int FormatMap::exp_bits_for(int precision) const {
  if (precision < kMinPrecision || precision > kMaxPrecision) {
    throw Error(ErrorCode::OutOfRange, "precision " + std::to_string(precision) + " outside [1,24]");
  }
  for (const FormatMapEntry& e : entries_) {
    if (precision <= e.p_max) return e.exp_bits;
  }
  return entries_.back().exp_bits;
}

TypeSystem TypeSystem::v1() { return {"V1", FormatMap({{3, 5}, {11, 5}, {24, 8}})}; }

TypeSystem TypeSystem::v2() { return {"V2", FormatMap({{3, 5}, {8, 8}, {11, 5}, {24, 8}})}; }

TypeSystem TypeSystem::from_spec(const std::string& spec) {
  if (spec == "v1" || spec == "V1") return v1();
  if (spec == "v2" || spec == "V2") return v2();
  constexpr std::string_view kCustom = "custom:";
  if (spec.rfind(kCustom, 0) == 0) return {"custom", FormatMap::load(spec.substr(kCustom.size()))};
  throw Error(ErrorCode::ParseError, "unknown type system '" + spec + "'");
}

FloatFormat map_precision(const TypeSystem& ts, int precision) {
  const int exp_bits = ts.map.exp_bits_for(precision);
  return make_format(exp_bits, std::max(precision - 1, FloatFormat::kMinManBits));
}

NamedFormat classify_precision(const TypeSystem& ts, int precision) {
  const FloatFormat mapped = map_precision(ts, precision);
  for (NamedFormat n : kNamedFormats) {
    const FloatFormat f = format_of(n);
    if (f.exp_bits() == mapped.exp_bits() && f.man_bits() >= precision - 1) return n;
  }
  throw Error(ErrorCode::OutOfRange, "no named format covers " + format_token(mapped));
}

}  // namespace flexfp
