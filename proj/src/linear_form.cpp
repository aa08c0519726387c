#include "cvsim/linear_form.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

namespace cvsim {

LinearForm LinearForm::x(const ModeLabel& mode, double coeff) {
  LinearForm f;
  f.terms_[{mode, Quadrature::X}] = coeff;
  return f;
}

LinearForm LinearForm::p(const ModeLabel& mode, double coeff) {
  LinearForm f;
  f.terms_[{mode, Quadrature::P}] = coeff;
  return f;
}

double LinearForm::coefficient(const QuadratureIndex& q) const {
  auto it = terms_.find(q);
  return it == terms_.end() ? 0.0 : it->second;
}

bool LinearForm::empty() const {
  for (const auto& [q, c] : terms_) {
    if (c != 0.0) {
      return false;
    }
  }
  return true;
}

Eigen::VectorXd LinearForm::dense(const std::vector<ModeLabel>& modes) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(2 * modes.size());
  for (const auto& [q, c] : terms_) {
    bool found = false;
    for (size_t i = 0; i < modes.size(); ++i) {
      if (modes[i] == q.mode) {
        v(2 * i + (q.quadrature == Quadrature::P ? 1 : 0)) = c;
        found = true;
        break;
      }
    }
    if (!found && c != 0.0) {
      throw std::invalid_argument(
          fmt::format("linear form references unknown mode '{}'", q.mode.name));
    }
  }
  return v;
}

LinearForm& LinearForm::operator+=(const LinearForm& other) {
  for (const auto& [q, c] : other.terms_) {
    terms_[q] += c;
  }
  offset_ += other.offset_;
  return *this;
}

LinearForm& LinearForm::operator-=(const LinearForm& other) {
  for (const auto& [q, c] : other.terms_) {
    terms_[q] -= c;
  }
  offset_ -= other.offset_;
  return *this;
}

LinearForm& LinearForm::operator*=(double scale) {
  for (auto& [q, c] : terms_) {
    c *= scale;
  }
  offset_ *= scale;
  return *this;
}

}  // namespace cvsim
