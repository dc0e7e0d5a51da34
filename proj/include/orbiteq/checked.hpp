#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace orbiteq {

using Int = std::int64_t;

// Overflow-checked integer arithmetic. All exact algebra in this library goes
// through these helpers; an overflow is reported, never wrapped.
inline Int add_checked(Int a, Int b) {
  Int r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("integer overflow in addition");
  return r;
}

inline Int sub_checked(Int a, Int b) {
  Int r;
  if (__builtin_sub_overflow(a, b, &r)) throw std::overflow_error("integer overflow in subtraction");
  return r;
}

inline Int mul_checked(Int a, Int b) {
  Int r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("integer overflow in multiplication");
  return r;
}

inline Int gcd_abs(Int a, Int b) { return std::gcd(a, b); }

// Floor-style modulus with a nonnegative result for m > 0.
inline Int mod_floor(Int a, Int m) {
  Int r = a % m;
  return r < 0 ? r + m : r;
}

// Extended gcd: returns g = gcd(a, b) >= 0 with s*a + t*b = g.
inline Int extended_gcd(Int a, Int b, Int &s, Int &t) {
  Int old_r = a, r = b, old_s = 1, cur_s = 0, old_t = 0, cur_t = 1;
  while (r != 0) {
    Int q = old_r / r;
    Int tmp = sub_checked(old_r, mul_checked(q, r));
    old_r = r;
    r = tmp;
    tmp = sub_checked(old_s, mul_checked(q, cur_s));
    old_s = cur_s;
    cur_s = tmp;
    tmp = sub_checked(old_t, mul_checked(q, cur_t));
    old_t = cur_t;
    cur_t = tmp;
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  s = old_s;
  t = old_t;
  return old_r;
}

} // namespace orbiteq
