#include "capsfx/fixed_point.hpp"

#include <cstdio>

namespace capsfx {

std::string QFormat::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "Q%d.%d", total_bits(), frac_bits());
  return buf;
}

QFormat QFormat::parse(const std::string& text) {
  int total = 0;
  int frac = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "Q%d.%d%c", &total, &frac, &tail) != 2) {
    throw std::invalid_argument("QFormat::parse: expected 'Qtotal.frac', got '" + text + "'");
  }
  return QFormat(total, frac);
}

}  // namespace capsfx
