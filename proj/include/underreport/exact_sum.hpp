#pragma once

#include <cassert>
#include <cmath>

namespace underreport {

// Order-independent accumulator for doubles.  Terms are quantized onto a
// fixed 2^-92 grid and summed in a 128-bit integer, so the result depends
// only on the multiset of added values, never on the order they arrive in
// or on how work was split across threads.  Quantization error is at most
// 2^-92 per term, far below double round-off for the magnitudes we sum
// (per-row log likelihoods and probability contrasts).
//
// Precondition: the running sum of |value| stays below 2^34.
class ExactSum {
 public:
  void add(double value) {
    if (value == 0.0) return;
    assert(std::isfinite(value));
    int exponent = 0;
    double mantissa = std::frexp(value, &exponent);  // value = mantissa * 2^exponent
    auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));  // exact 53-bit integer
    int shift = exponent - 53 + 92;  // move onto the 2^-92 grid
    __int128 term = scaled;
    if (shift >= 0) {
      assert(shift < 75);  // implied by the 2^34 magnitude bound
      term <<= shift;
    } else if (shift > -127) {
      term >>= -shift;  // truncation toward -inf; deterministic per term
    } else {
      term = 0;
    }
    accumulator_ += term;
  }

  void merge(const ExactSum& other) { accumulator_ += other.accumulator_; }

  double value() const {
    // int128 -> double is a single correct rounding, and the 2^-92 scale is
    // exact, so the result is the correctly rounded grid sum.
    return static_cast<double>(accumulator_) * 0x1.0p-92;
  }

 private:
  __int128 accumulator_ = 0;
};

}  // namespace underreport
