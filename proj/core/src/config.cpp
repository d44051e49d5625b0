#include "capsfx/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace capsfx {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
  throw std::invalid_argument(origin + ":" + std::to_string(line) + ": " + what);
}

double parse_real(const std::string& origin, int line, const std::string& v) {
  std::size_t pos = 0;
  double r = 0.0;
  try {
    r = std::stod(v, &pos);
  } catch (const std::exception&) {
    fail(origin, line, "expected a number, got '" + v + "'");
  }
  if (pos != v.size()) fail(origin, line, "trailing characters in '" + v + "'");
  return r;
}

long long parse_int(const std::string& origin, int line, const std::string& v) {
  std::size_t pos = 0;
  long long r = 0;
  try {
    r = std::stoll(v, &pos);
  } catch (const std::exception&) {
    fail(origin, line, "expected an integer, got '" + v + "'");
  }
  if (pos != v.size()) fail(origin, line, "trailing characters in '" + v + "'");
  return r;
}

bool parse_bool(const std::string& origin, int line, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail(origin, line, "expected true/false, got '" + v + "'");
}

}  // namespace

void RunConfig::merge_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open config file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  merge_text(buf.str(), path);
}

void RunConfig::merge_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']') fail(origin, line_no, "unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) fail(origin, line_no, "expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty() || value.empty()) fail(origin, line_no, "expected 'key = value'");

    if (section == "fixedpoint") {
      if (key == "format") {
        format = QFormat::parse(value);
      } else {
        fail(origin, line_no, "unknown key '" + key + "' in [fixedpoint]");
      }
    } else if (section == "softmax") {
      if (key == "variant") softmax_variant = parse_softmax_variant(value);
      else if (key == "scale_inputs") scale_inputs = parse_bool(origin, line_no, value);
      else if (key == "taylor_frac_bits") taylor.frac_high_bits = static_cast<int>(parse_int(origin, line_no, value));
      else if (key == "taylor_int_min") taylor.int_min = static_cast<int>(parse_int(origin, line_no, value));
      else if (key == "taylor_int_max") taylor.int_max = static_cast<int>(parse_int(origin, line_no, value));
      else if (key == "n") softmax_n = static_cast<int>(parse_int(origin, line_no, value));
      else if (key == "range_lo") softmax_lo = parse_real(origin, line_no, value);
      else if (key == "range_hi") softmax_hi = parse_real(origin, line_no, value);
      else fail(origin, line_no, "unknown key '" + key + "' in [softmax]");
    } else if (section == "squash") {
      if (key == "variant") squash_variant = parse_squash_variant(value);
      else if (key == "breakpoint") breakpoint = parse_real(origin, line_no, value);
      else if (key.rfind("lambda.", 0) == 0) {
        const int len = static_cast<int>(parse_int(origin, line_no, key.substr(7)));
        lambda.values[len] = parse_real(origin, line_no, value);
      }
      else if (key == "coeff_index_bits") coeff_index_bits = static_cast<int>(parse_int(origin, line_no, value));
      else if (key == "coeff_domain_hi") coeff_domain_hi = parse_real(origin, line_no, value);
      else if (key == "sqrt_index_bits") sqrt_index_bits = static_cast<int>(parse_int(origin, line_no, value));
      else if (key == "sqrt_domain_hi") sqrt_domain_hi = parse_real(origin, line_no, value);
      else if (key == "n") squash_n = static_cast<int>(parse_int(origin, line_no, value));
      else if (key == "range_lo") squash_lo = parse_real(origin, line_no, value);
      else if (key == "range_hi") squash_hi = parse_real(origin, line_no, value);
      else fail(origin, line_no, "unknown key '" + key + "' in [squash]");
    } else if (section == "analysis") {
      if (key == "count") count = static_cast<int>(parse_int(origin, line_no, value));
      else if (key == "seed") seed = static_cast<std::uint64_t>(parse_int(origin, line_no, value));
      else fail(origin, line_no, "unknown key '" + key + "' in [analysis]");
    } else if (section == "routing") {
      if (key == "num_lower") num_lower = static_cast<int>(parse_int(origin, line_no, value));
      else if (key == "num_upper") num_upper = static_cast<int>(parse_int(origin, line_no, value));
      else if (key == "dim") dim = static_cast<int>(parse_int(origin, line_no, value));
      else if (key == "iterations") iterations = static_cast<int>(parse_int(origin, line_no, value));
      else if (key == "trials") trials = static_cast<int>(parse_int(origin, line_no, value));
      else fail(origin, line_no, "unknown key '" + key + "' in [routing]");
    } else if (section.empty()) {
      fail(origin, line_no, "key '" + key + "' before any [section]");
    } else {
      fail(origin, line_no, "unknown section [" + section + "]");
    }
  }
}

std::string RunConfig::to_text() const {
  std::string out;
  out += "[fixedpoint]\n";
  out += "format = " + format.to_string() + "\n";
  out += "\n[softmax]\n";
  out += "variant = " + std::string(to_string(softmax_variant)) + "\n";
  out += "scale_inputs = " + std::string(scale_inputs ? "true" : "false") + "\n";
  out += "taylor_frac_bits = " + std::to_string(taylor.frac_high_bits) + "\n";
  out += "taylor_int_min = " + std::to_string(taylor.int_min) + "\n";
  out += "taylor_int_max = " + std::to_string(taylor.int_max) + "\n";
  out += "n = " + std::to_string(softmax_n) + "\n";
  out += "range_lo = " + format_real(softmax_lo) + "\n";
  out += "range_hi = " + format_real(softmax_hi) + "\n";
  out += "# tested lengths: 10, 32, 128\n";
  out += "\n[squash]\n";
  out += "variant = " + std::string(to_string(squash_variant)) + "\n";
  out += "breakpoint = " + format_real(breakpoint) + "\n";
  for (const auto& [len, l] : lambda.values) {
    out += "lambda." + std::to_string(len) + " = " + format_real(l) + "\n";
  }
  out += "coeff_index_bits = " + std::to_string(coeff_index_bits) + "\n";
  out += "coeff_domain_hi = " + format_real(coeff_domain_hi) + "\n";
  out += "sqrt_index_bits = " + std::to_string(sqrt_index_bits) + "\n";
  out += "sqrt_domain_hi = " + format_real(sqrt_domain_hi) + "\n";
  out += "n = " + std::to_string(squash_n) + "\n";
  out += "range_lo = " + format_real(squash_lo) + "\n";
  out += "range_hi = " + format_real(squash_hi) + "\n";
  out += "# tested lengths: 4, 8, 16, 32\n";
  out += "\n[analysis]\n";
  out += "count = " + std::to_string(count) + "\n";
  out += "seed = " + std::to_string(seed) + "\n";
  out += "\n[routing]\n";
  out += "num_lower = " + std::to_string(num_lower) + "\n";
  out += "num_upper = " + std::to_string(num_upper) + "\n";
  out += "dim = " + std::to_string(dim) + "\n";
  out += "iterations = " + std::to_string(iterations) + "\n";
  out += "trials = " + std::to_string(trials) + "\n";
  return out;
}

void RunConfig::validate() const {
  // Construction of the impls runs every structural precondition (formats,
  // table shapes, breakpoint bound).
  (void)make_softmax();
  (void)make_squash();
  if (softmax_n < 2) throw std::invalid_argument("softmax n must be >= 2");
  if (squash_n < 1) throw std::invalid_argument("squash n must be >= 1");
  if (squash_n > 32) throw std::invalid_argument("squash n must be <= 32");
  if (count < 1) throw std::invalid_argument("count must be >= 1");
  if (!(softmax_lo < softmax_hi)) throw std::invalid_argument("softmax range needs lo < hi");
  if (!(squash_lo < squash_hi)) throw std::invalid_argument("squash range needs lo < hi");
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (num_lower < 1 || num_upper < 2 || dim < 1) {
    throw std::invalid_argument("routing shapes need num_lower >= 1, num_upper >= 2, dim >= 1");
  }
  if (squash_variant == SquashVariant::kNorm) {
    (void)lambda.at(squash_n);  // throws when the length is uncovered
  }
  if (dim > 32) throw std::invalid_argument("routing dim must be <= 32");
}

SoftmaxOptions RunConfig::softmax_options() const {
  SoftmaxOptions o;
  o.format = format;
  o.scale_inputs = scale_inputs;
  o.taylor = taylor;
  // The default clamp window is sized for wide formats; narrow formats keep
  // only their representable integers.
  o.taylor.int_min = std::max(o.taylor.int_min,
                              static_cast<int>(std::ceil(format.min_value())));
  o.taylor.int_max = std::min(o.taylor.int_max,
                              static_cast<int>(std::floor(format.max_value())));
  return o;
}

SquashOptions RunConfig::squash_options() const {
  SquashOptions o;
  o.format = format;
  o.breakpoint = breakpoint;
  o.lambda = lambda;
  o.coeff_index_bits = coeff_index_bits;
  o.coeff_domain_hi = coeff_domain_hi;
  o.sqrt_index_bits = sqrt_index_bits;
  o.sqrt_domain_hi = sqrt_domain_hi;
  return o;
}

SoftmaxImpl RunConfig::make_softmax(SoftmaxVariant v) const {
  return SoftmaxImpl(v, softmax_options());
}

SquashImpl RunConfig::make_squash(SquashVariant v) const {
  return SquashImpl(v, squash_options());
}

SweepSpec RunConfig::softmax_sweep() const {
  return SweepSpec{softmax_n, count, softmax_lo, softmax_hi, seed, format};
}

SweepSpec RunConfig::squash_sweep() const {
  return SweepSpec{squash_n, count, squash_lo, squash_hi, seed, format};
}

RoutingConfig RunConfig::routing_config(SoftmaxVariant sv, SquashVariant qv) const {
  RoutingConfig rc{num_lower, num_upper, dim, iterations, make_softmax(sv), make_squash(qv)};
  return rc;
}

}  // namespace capsfx
