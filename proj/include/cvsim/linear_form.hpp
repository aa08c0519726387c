#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "cvsim/modes.hpp"

namespace cvsim {

/// Real linear combination of quadratures plus a constant offset.
///
/// Coefficients are keyed by (mode, quadrature), so a form written once can
/// be evaluated against any state that contains the referenced modes,
/// regardless of mode order. Used for nullifiers, Bell observables and
/// entanglement witnesses.
class LinearForm {
 public:
  LinearForm() = default;

  static LinearForm x(const ModeLabel& mode, double coeff = 1.0);
  static LinearForm p(const ModeLabel& mode, double coeff = 1.0);

  double coefficient(const QuadratureIndex& q) const;
  double offset() const { return offset_; }
  LinearForm& set_offset(double value) {
    offset_ = value;
    return *this;
  }

  /// True when every coefficient vanishes (offset ignored).
  bool empty() const;

  /// Dense coefficient vector in the interleaved ordering of `modes`.
  /// Throws std::invalid_argument if the form references a mode not listed.
  Eigen::VectorXd dense(const std::vector<ModeLabel>& modes) const;

  const std::map<QuadratureIndex, double>& terms() const { return terms_; }

  LinearForm& operator+=(const LinearForm& other);
  LinearForm& operator-=(const LinearForm& other);
  LinearForm& operator*=(double scale);

  friend LinearForm operator+(LinearForm a, const LinearForm& b) { return a += b; }
  friend LinearForm operator-(LinearForm a, const LinearForm& b) { return a -= b; }
  friend LinearForm operator*(double scale, LinearForm f) { return f *= scale; }
  friend LinearForm operator*(LinearForm f, double scale) { return f *= scale; }
  friend LinearForm operator-(LinearForm f) { return f *= -1.0; }

 private:
  std::map<QuadratureIndex, double> terms_;
  double offset_ = 0.0;
};

}  // namespace cvsim
