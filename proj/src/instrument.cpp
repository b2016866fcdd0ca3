#include "flexfp/instrument.hpp"

namespace flexfp {

std::string_view to_string(OpKind k) {
  switch (k) {
    case OpKind::Add: return "add";
    case OpKind::Sub: return "sub";
    case OpKind::Mul: return "mul";
    case OpKind::Div: return "div";
    case OpKind::Sqrt: return "sqrt";
    case OpKind::Cmp: return "cmp";
    case OpKind::CastFp: return "cast_fp";
    case OpKind::CastToInt: return "cast_to_int";
    case OpKind::CastFromInt: return "cast_from_int";
    case OpKind::Load: return "load";
    case OpKind::Store: return "store";
  }
  return "?";
}

OpKind parse_op_kind(std::string_view s) {
  for (OpKind k : kAllOpKinds) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorCode::ParseError, "unknown operation kind '" + std::string(s) + "'");
}

std::string_view to_string(RegionTag t) { return t == RegionTag::Scalar ? "scalar" : "vector"; }

void StatsReport::add(const EventKey& key, std::uint64_t n) {
  if (n != 0) counts_[key] += n;
}

std::uint64_t StatsReport::count(const EventKey& key) const {
  const auto it = counts_.find(key);
  return it == counts_.end() ? 0 : it->second;
}

std::uint64_t StatsReport::total() const {
  return total_if([](const EventKey&) { return true; });
}

void StatsReport::write_to(KvDocument& doc) const {
  for (const auto& [key, n] : counts_) {
    std::string name = "count." + std::string(to_string(key.region)) + "." +
                       std::string(to_string(key.kind)) + "." + format_token(key.format);
    if (key.kind == OpKind::CastFp) name += "<" + format_token(key.source);
    doc.set(name, n);
  }
}

StatsReport StatsReport::read_from(const KvDocument& doc) {
  StatsReport r;
  for (const auto& [name, value] : doc.entries()) {
    if (name.rfind("count.", 0) != 0) continue;
    const auto d1 = name.find('.', 6);
    const auto d2 = d1 == std::string::npos ? d1 : name.find('.', d1 + 1);
    if (d2 == std::string::npos) throw Error(ErrorCode::ParseError, "bad count key '" + name + "'");
    const std::string region = name.substr(6, d1 - 6);
    const OpKind kind = parse_op_kind(name.substr(d1 + 1, d2 - d1 - 1));
    std::string fmt = name.substr(d2 + 1);
    RegionTag tag;
    if (region == "scalar") {
      tag = RegionTag::Scalar;
    } else if (region == "vector") {
      tag = RegionTag::Vectorizable;
    } else {
      throw Error(ErrorCode::ParseError, "bad region in '" + name + "'");
    }
    const double n = parse_number(value);
    if (n < 0 || n != static_cast<double>(static_cast<std::uint64_t>(n))) {
      throw Error(ErrorCode::ParseError, "bad count for '" + name + "'");
    }
    if (kind == OpKind::CastFp) {
      const auto lt = fmt.find('<');
      if (lt == std::string::npos) throw Error(ErrorCode::ParseError, "cast key without source: " + name);
      r.add(EventKey::cast(parse_format_token(fmt.substr(lt + 1)), parse_format_token(fmt.substr(0, lt)),
                           tag),
            static_cast<std::uint64_t>(n));
    } else {
      r.add(EventKey::op(kind, parse_format_token(fmt), tag), static_cast<std::uint64_t>(n));
    }
  }
  return r;
}

StatsReport merge(const StatsReport& a, const StatsReport& b) {
  StatsReport out = a;
  for (const auto& [key, n] : b.counts()) out.add(key, n);
  return out;
}

void StatsContext::bump(const EventKey& key) {
  for (auto& [k, n] : tally_) {
    if (k == key) {
      ++n;
      return;
    }
  }
  tally_.emplace_back(key, 1);
}

void StatsContext::record(OpKind kind, FloatFormat f) { bump(EventKey::op(kind, f, region())); }

void StatsContext::record_cast(FloatFormat from, FloatFormat to) {
  bump(EventKey::cast(from, to, region()));
}

void StatsContext::enter_region(RegionTag tag) {
  if (open_) throw Error(ErrorCode::RegionImbalance, "regions may not nest");
  open_ = tag;
}

void StatsContext::exit_region() {
  if (!open_) throw Error(ErrorCode::RegionImbalance, "exit without matching enter");
  open_.reset();
}

StatsReport StatsContext::report() const {
  StatsReport r;
  for (const auto& [key, n] : tally_) r.add(key, n);
  return r;
}

}  // namespace flexfp
