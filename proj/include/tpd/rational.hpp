#ifndef TPD_RATIONAL_HPP
#define TPD_RATIONAL_HPP

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tpd {

/* Exact rational scalar used for every time, speed, offset and distance in the
 * library.  Nothing in the core ever rounds; decimal rendering exists only for
 * plot-friendly CSV columns. */
using Rat = mpq_class;

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

class PolicyContractError : public std::runtime_error {
 public:
  explicit PolicyContractError(const std::string& what) : std::runtime_error(what) {}
};

class InvariantError : public std::logic_error {
 public:
  explicit InvariantError(const std::string& what) : std::logic_error(what) {}
};

/* Parses "p/q" or a bare integer "p".  Rejects anything else (including
 * decimals: callers that want exactness must say what they mean). */
Rat parse_rat(const std::string& text);

inline std::string rat_str(const Rat& q) { return q.get_str(); }

/* Decimal rendering with `digits` significant digits, for CSV plot columns. */
std::string rat_decimal(const Rat& q, int digits = 12);

inline Rat rat_of(std::int64_t n) { return Rat(static_cast<long>(n)); }

}  // namespace tpd

#endif
