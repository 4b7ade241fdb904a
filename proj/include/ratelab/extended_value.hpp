#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ratelab {

// Real value extended with -inf and +inf. The infinities are tagged states,
// not IEEE specials, so that the two conventions the rest of the library
// leans on are enforced deliberately:
//   * scaled(0, v) == 0 even for v == -inf  (masking convention),
//   * (-inf) + (+inf) throws instead of silently producing anything.
class ExtendedValue {
 public:
  ExtendedValue() : kind_(Kind::finite), v_(0.0) {}

  // Implicit on purpose: finite doubles promote freely.
  ExtendedValue(double v) : kind_(Kind::finite), v_(v) {
    if (!std::isfinite(v))
      throw std::invalid_argument("ExtendedValue: non-finite double; use from_double()");
  }

  static ExtendedValue neg_inf() { return ExtendedValue(Kind::neg, 0.0); }
  static ExtendedValue pos_inf() { return ExtendedValue(Kind::pos, 0.0); }

  // Maps IEEE +/-inf onto the tagged states; NaN is always rejected.
  static ExtendedValue from_double(double v) {
    if (std::isnan(v)) throw std::invalid_argument("ExtendedValue: NaN");
    if (v == std::numeric_limits<double>::infinity()) return pos_inf();
    if (v == -std::numeric_limits<double>::infinity()) return neg_inf();
    return ExtendedValue(v);
  }

  bool is_finite() const { return kind_ == Kind::finite; }
  bool is_neg_inf() const { return kind_ == Kind::neg; }
  bool is_pos_inf() const { return kind_ == Kind::pos; }

  double value() const {
    if (kind_ != Kind::finite)
      throw std::logic_error("ExtendedValue: value() called on infinity");
    return v_;
  }

  double as_double() const {
    switch (kind_) {
      case Kind::neg: return -std::numeric_limits<double>::infinity();
      case Kind::pos: return std::numeric_limits<double>::infinity();
      default: return v_;
    }
  }

  friend ExtendedValue operator-(ExtendedValue a) {
    switch (a.kind_) {
      case Kind::neg: return pos_inf();
      case Kind::pos: return neg_inf();
      default: return ExtendedValue(-a.v_);
    }
  }

  friend ExtendedValue operator+(ExtendedValue a, ExtendedValue b) {
    if (a.is_finite() && b.is_finite()) {
      const double s = a.v_ + b.v_;
      if (!std::isfinite(s)) throw std::domain_error("ExtendedValue: finite sum overflowed");
      return ExtendedValue(s);
    }
    if ((a.is_neg_inf() && b.is_pos_inf()) || (a.is_pos_inf() && b.is_neg_inf()))
      throw std::domain_error("ExtendedValue: (-inf) + (+inf) is undefined");
    return a.is_finite() ? b : a;
  }

  friend ExtendedValue operator-(ExtendedValue a, ExtendedValue b) { return a + (-b); }

  friend bool operator==(ExtendedValue a, ExtendedValue b) {
    if (a.kind_ != b.kind_) return false;
    return a.kind_ != Kind::finite || a.v_ == b.v_;
  }
  friend bool operator!=(ExtendedValue a, ExtendedValue b) { return !(a == b); }

  friend bool operator<(ExtendedValue a, ExtendedValue b) {
    if (a.rank() != b.rank()) return a.rank() < b.rank();
    return a.kind_ == Kind::finite && a.v_ < b.v_;
  }
  friend bool operator>(ExtendedValue a, ExtendedValue b) { return b < a; }
  friend bool operator<=(ExtendedValue a, ExtendedValue b) { return !(b < a); }
  friend bool operator>=(ExtendedValue a, ExtendedValue b) { return !(a < b); }

  std::string str() const {
    if (is_neg_inf()) return "-inf";
    if (is_pos_inf()) return "inf";
    return std::to_string(v_);
  }

 private:
  enum class Kind { neg, finite, pos };
  ExtendedValue(Kind k, double v) : kind_(k), v_(v) {}
  int rank() const { return kind_ == Kind::neg ? 0 : (kind_ == Kind::finite ? 1 : 2); }

  Kind kind_;
  double v_;
};

// lambda * v for lambda >= 0 with the masking convention 0 * (+-inf) == 0.
inline ExtendedValue scaled(double lambda, ExtendedValue v) {
  if (!(lambda >= 0.0))
    throw std::invalid_argument("scaled: negative or NaN coefficient");
  if (lambda == 0.0) return ExtendedValue(0.0);
  if (!v.is_finite()) return v;
  return ExtendedValue(lambda * v.value());
}

inline ExtendedValue vmax(ExtendedValue a, ExtendedValue b) { return a < b ? b : a; }
inline ExtendedValue vmin(ExtendedValue a, ExtendedValue b) { return b < a ? b : a; }

}  // namespace ratelab
