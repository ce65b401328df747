#pragma once

#include <charconv>
#include <ostream>

namespace climb {

/// Shortest round-trip decimal form of `v`.
inline void put_number(std::ostream& out, double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, r.ptr - buf);
}

}  // namespace climb
