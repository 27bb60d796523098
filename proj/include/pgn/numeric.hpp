#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "pgn/errors.hpp"

namespace pgn {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

// log of a positive big integer, accurate to a few ulp.
inline double log_mpz(const mpz_class& t) {
  if (t <= 0) fail(ErrorCode::invalid_param, "log of non-positive integer");
  long e = 0;
  double d = mpz_get_d_2exp(&e, t.get_mpz_t());
  return std::log(d) + static_cast<double>(e) * M_LN2;
}

inline double log_mpf(const mpf_class& x) {
  if (x <= 0) {
    if (x == 0) return kNegInf;
    fail(ErrorCode::invalid_param, "log of negative value");
  }
  long e = 0;
  double d = mpf_get_d_2exp(&e, x.get_mpf_t());
  return std::log(d) + static_cast<double>(e) * M_LN2;
}

// e^x as an mpf at the requested precision (x is an exact double).
inline mpf_class exp_mpf(double x, mp_bitcnt_t prec) {
  mpfr_t r;
  mpfr_init2(r, prec + 8);
  mpfr_set_d(r, x, MPFR_RNDN);
  mpfr_exp(r, r, MPFR_RNDN);
  mpf_class out(0, prec + 8);
  mpfr_get_f(out.get_mpf_t(), r, MPFR_RNDN);
  mpfr_clear(r);
  return out;
}

// Parses a plain decimal string ("-0.6180339887", "2", "1e-3" is rejected).
inline mpf_class parse_decimal(const std::string& text, mp_bitcnt_t prec) {
  if (text.empty()) fail(ErrorCode::invalid_param, "empty decimal string");
  std::size_t i = 0;
  if (text[i] == '+' || text[i] == '-') ++i;
  bool digits = false, dot = false;
  for (; i < text.size(); ++i) {
    if (text[i] == '.') {
      if (dot) fail(ErrorCode::invalid_param, "malformed decimal: " + text);
      dot = true;
    } else if (text[i] >= '0' && text[i] <= '9') {
      digits = true;
    } else {
      fail(ErrorCode::invalid_param, "malformed decimal: " + text);
    }
  }
  if (!digits) fail(ErrorCode::invalid_param, "malformed decimal: " + text);
  mpf_class out(0, prec);
  if (out.set_str(text, 10) != 0) fail(ErrorCode::invalid_param, "unparsable decimal: " + text);
  return out;
}

inline mpz_class round_to_mpz(const mpf_class& x) {
  mpf_class t(x, mpf_get_prec(x.get_mpf_t()) + 8);
  if (t >= 0)
    t += 0.5;
  else
    t -= 0.5;
  mpf_class f = floor(t);
  mpz_class out;
  mpz_set_f(out.get_mpz_t(), f.get_mpf_t());
  return out;
}

// gmpxx has no long long constructors; on this ABI long is 64-bit.
inline mpz_class to_mpz(long long v) { return mpz_class(static_cast<long>(v)); }

// 12 significant digits; the stable textual form used by every artifact.
inline std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::string(buf);
}

inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

// Deterministic 64-bit generator (splitmix64); identical streams on every
// platform, unlike <random> distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in (-1, 1), as an exact dyadic rational k/2^20
  double next_entry() {
    std::int64_t k = static_cast<std::int64_t>(next_u64() % (2 * 1048576 - 1)) - (1048576 - 1);
    return static_cast<double>(k) / 1048576.0;
  }

  std::uint64_t next_below(std::uint64_t bound) { return next_u64() % bound; }

 private:
  std::uint64_t state_;
};

// FNV-1a over a string; used to stamp artifacts with their config.
inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace pgn
