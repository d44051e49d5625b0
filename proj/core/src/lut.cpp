#include "capsfx/lut.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace capsfx {

namespace {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Lut::Lut(double domain_lo, double domain_hi, int index_bits, const QFormat& fmt,
         std::vector<FxValue> entries)
    : lo_(domain_lo),
      hi_(domain_hi),
      step_((domain_hi - domain_lo) / std::exp2(index_bits)),
      index_bits_(index_bits),
      fmt_(fmt),
      entries_(std::move(entries)) {
  if (!(domain_lo < domain_hi) || !std::isfinite(domain_lo) || !std::isfinite(domain_hi)) {
    throw std::invalid_argument("Lut: domain must satisfy lo < hi and be finite");
  }
  if (index_bits < 1 || index_bits > 12) {
    throw std::invalid_argument("Lut: index_bits must be in 1..12");
  }
  if (entries_.size() != (std::size_t{1} << index_bits)) {
    throw std::invalid_argument("Lut: entry count must be 2^index_bits");
  }
  for (const FxValue& e : entries_) {
    if (!(e.format() == fmt_)) {
      throw std::invalid_argument("Lut: entry format mismatch");
    }
  }
}

Lut Lut::build(const Oracle& oracle, double domain_lo, double domain_hi,
               int index_bits, const QFormat& fmt) {
  if (!(domain_lo < domain_hi)) {
    throw std::invalid_argument("Lut::build: domain must satisfy lo < hi");
  }
  if (index_bits < 1 || index_bits > 12) {
    throw std::invalid_argument("Lut::build: index_bits must be in 1..12");
  }
  const std::size_t count = std::size_t{1} << index_bits;
  const double step = (domain_hi - domain_lo) / static_cast<double>(count);
  std::vector<FxValue> entries;
  entries.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double node = domain_lo + static_cast<double>(i) * step;
    const double y = oracle(node);
    if (!std::isfinite(y)) {
      throw std::domain_error("Lut::build: oracle non-finite at node " + format_real(node));
    }
    entries.push_back(FxValue::from_real(y, fmt));
  }
  return Lut(domain_lo, domain_hi, index_bits, fmt, std::move(entries));
}

FxValue Lut::lookup(const FxValue& x) const {
  const double v = x.to_real();
  const std::int64_t last = static_cast<std::int64_t>(entries_.size()) - 1;
  std::int64_t idx = static_cast<std::int64_t>(std::floor((v - lo_) / step_));
  if (idx < 0) idx = 0;
  if (idx > last) idx = last;
  return entries_[static_cast<std::size_t>(idx)];
}

double Lut::max_error_bound(const Oracle& oracle, int samples_per_segment) const {
  double worst_variation = 0.0;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const double left = node(i);
    double lo_val = oracle(left);
    double hi_val = lo_val;
    for (int s = 1; s < samples_per_segment; ++s) {
      const double t = left + step_ * static_cast<double>(s) / samples_per_segment;
      const double y = oracle(t);
      lo_val = std::min(lo_val, y);
      hi_val = std::max(hi_val, y);
    }
    worst_variation = std::max(worst_variation, hi_val - lo_val);
  }
  return worst_variation + fmt_.resolution() / 2.0;
}

std::string Lut::dump() const {
  std::string out = "LUT v1 " + std::to_string(index_bits_) + " " +
                    std::to_string(fmt_.total_bits()) + " " +
                    std::to_string(fmt_.frac_bits()) + " " + format_real(lo_) + " " +
                    format_real(hi_) + "\n";
  const std::uint32_t mask =
      fmt_.total_bits() == 32 ? 0xFFFFFFFFu
                              : ((std::uint32_t{1} << fmt_.total_bits()) - 1);
  const int width = (fmt_.total_bits() + 3) / 4;
  char buf[16];
  for (const FxValue& e : entries_) {
    std::snprintf(buf, sizeof(buf), "%0*x", width,
                  static_cast<std::uint32_t>(e.raw()) & mask);
    out += buf;
    out += '\n';
  }
  return out;
}

Lut Lut::load(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header)) {
    throw LutParseError(1, "missing header");
  }
  std::istringstream hs(header);
  std::string magic, version;
  int index_bits = 0, total = 0, frac = 0;
  double lo = 0.0, hi = 0.0;
  if (!(hs >> magic >> version >> index_bits >> total >> frac >> lo >> hi) ||
      magic != "LUT" || version != "v1") {
    throw LutParseError(1, "bad header, expected 'LUT v1 <index_bits> <total> <frac> <lo> <hi>'");
  }
  std::string trailing;
  if (hs >> trailing) {
    throw LutParseError(1, "unexpected trailing token '" + trailing + "'");
  }
  QFormat fmt(4, 0);
  try {
    fmt = QFormat(total, frac);
    if (index_bits < 1 || index_bits > 12) {
      throw std::invalid_argument("index_bits out of range");
    }
  } catch (const std::invalid_argument& e) {
    throw LutParseError(1, e.what());
  }

  const std::size_t count = std::size_t{1} << index_bits;
  const std::uint32_t mask =
      total == 32 ? 0xFFFFFFFFu : ((std::uint32_t{1} << total) - 1);
  std::vector<FxValue> entries;
  entries.reserve(count);
  std::string line;
  int line_no = 1;
  while (entries.size() < count) {
    if (!std::getline(in, line)) {
      throw LutParseError(line_no + 1, "truncated table, expected " +
                                           std::to_string(count) + " entries, got " +
                                           std::to_string(entries.size()));
    }
    ++line_no;
    if (line.empty()) {
      throw LutParseError(line_no, "empty entry line");
    }
    std::size_t pos = 0;
    unsigned long parsed = 0;
    try {
      parsed = std::stoul(line, &pos, 16);
    } catch (const std::exception&) {
      throw LutParseError(line_no, "not a hex value: '" + line + "'");
    }
    if (pos != line.size()) {
      throw LutParseError(line_no, "trailing characters in '" + line + "'");
    }
    if (parsed > mask) {
      throw LutParseError(line_no, "raw value wider than " + std::to_string(total) + " bits");
    }
    std::uint32_t bits = static_cast<std::uint32_t>(parsed);
    std::int64_t raw = bits;
    if (total < 32 && (bits & (std::uint32_t{1} << (total - 1)))) {
      raw -= std::int64_t{1} << total;  // sign extension
    } else if (total == 32) {
      raw = static_cast<std::int32_t>(bits);
    }
    entries.push_back(FxValue::from_raw(static_cast<std::int32_t>(raw), fmt));
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty()) {
      throw LutParseError(line_no, "unexpected extra line");
    }
  }
  return Lut(lo, hi, index_bits, fmt, std::move(entries));
}

void Lut::dump_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("Lut::dump_file: cannot open '" + path + "'");
  }
  out << dump();
}

Lut Lut::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("Lut::load_file: cannot open '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return load(buf.str());
}

}  // namespace capsfx
