#pragma once

#include <cmath>
#include <stdexcept>

namespace fqm {

// Exact probability of the form 2^-k (k >= 0), or exactly zero. Closed under
// multiplication, which is all the symbolic backend ever needs: membership
// projections of coset states accept with dyadic probability.
class DyadicProb {
 public:
  constexpr DyadicProb() : zero_(true), k_(0) {}

  static constexpr DyadicProb zero() { return DyadicProb(); }
  static constexpr DyadicProb one() { return pow2(0); }
  // 2^-k.
  static constexpr DyadicProb pow2(unsigned k) {
    DyadicProb p;
    p.zero_ = false;
    p.k_ = k;
    return p;
  }

  constexpr bool is_zero() const { return zero_; }
  constexpr bool is_one() const { return !zero_ && k_ == 0; }

  // k such that the value is 2^-k. Invalid for zero.
  constexpr unsigned neg_log2() const {
    if (zero_) throw std::logic_error("DyadicProb: neg_log2 of zero");
    return k_;
  }

  double to_double() const { return zero_ ? 0.0 : std::ldexp(1.0, -static_cast<int>(k_)); }

  constexpr DyadicProb operator*(const DyadicProb& o) const {
    if (zero_ || o.zero_) return zero();
    return pow2(k_ + o.k_);
  }

  friend constexpr bool operator==(const DyadicProb&, const DyadicProb&) = default;

 private:
  bool zero_;
  unsigned k_;
};

}  // namespace fqm
