#include <cstdio>
#include <stdexcept>
#include <string>

#include "sbh/bound.hpp"
#include "sbh/ext_real.hpp"

namespace sbh {

std::string ExtReal::to_string() const {
  if (is_pos_inf()) return "inf";
  if (is_neg_inf()) return "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v_);
  return buf;
}

std::string_view to_string(Side s) {
  switch (s) {
    case Side::exact:
      return "exact";
    case Side::lower:
      return "lower";
    case Side::upper:
      return "upper";
    case Side::estimate:
      return "estimate";
  }
  return "?";
}

Side side_from_string(std::string_view s) {
  if (s == "exact") return Side::exact;
  if (s == "lower") return Side::lower;
  if (s == "upper") return Side::upper;
  if (s == "estimate" || s == "mc") return Side::estimate;
  throw std::invalid_argument("unknown side '" + std::string(s) + "'");
}

}  // namespace sbh
