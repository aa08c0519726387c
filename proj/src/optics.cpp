#include "cvsim/optics.hpp"

#include <fmt/format.h>

#include <cmath>
#include <complex>
#include <stdexcept>

namespace cvsim {

namespace {

constexpr double kFeasibilityTol = 1e-9;
constexpr double kRankTol = 1e-10;

Eigen::MatrixXd lift(const SymplecticTransform& t,
                     const std::vector<ModeLabel>& modes) {
  const auto n = static_cast<Eigen::Index>(modes.size());
  Eigen::MatrixXd full = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  std::vector<Eigen::Index> row(t.num_modes());
  for (int i = 0; i < t.num_modes(); ++i) {
    auto it = std::find(modes.begin(), modes.end(), t.modes()[i]);
    if (it == modes.end()) {
      throw std::invalid_argument(
          fmt::format("element references mode '{}' outside the mode list",
                      t.modes()[i].name));
    }
    row[i] = 2 * (it - modes.begin());
  }
  for (int i = 0; i < t.num_modes(); ++i) {
    for (int j = 0; j < t.num_modes(); ++j) {
      full.block<2, 2>(row[i], row[j]) = t.matrix().block<2, 2>(2 * i, 2 * j);
    }
  }
  return full;
}

Eigen::VectorXd lift_displacement(const SymplecticTransform& t,
                                  const std::vector<ModeLabel>& modes) {
  const auto n = static_cast<Eigen::Index>(modes.size());
  Eigen::VectorXd d = Eigen::VectorXd::Zero(2 * n);
  for (int i = 0; i < t.num_modes(); ++i) {
    auto it = std::find(modes.begin(), modes.end(), t.modes()[i]);
    d.segment<2>(2 * (it - modes.begin())) = t.displacement().segment<2>(2 * i);
  }
  return d;
}

/// Realify a unitary U = A + iB into the interleaved passive symplectic
/// x' = A x - B p, p' = B x + A p.
Eigen::MatrixXd realify(const Eigen::MatrixXcd& u) {
  const Eigen::Index n = u.rows();
  Eigen::MatrixXd m(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = u(i, j).real();
      const double b = u(i, j).imag();
      m(2 * i, 2 * j) = a;
      m(2 * i, 2 * j + 1) = -b;
      m(2 * i + 1, 2 * j) = b;
      m(2 * i + 1, 2 * j + 1) = a;
    }
  }
  return m;
}

/// Interleaved real vector -> complex vector z_j = x_j + i p_j.
Eigen::VectorXcd complexify(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size() / 2;
  Eigen::VectorXcd z(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    z(j) = std::complex<double>(v(2 * j), v(2 * j + 1));
  }
  return z;
}

}  // namespace

SymplecticTransform beamsplitter_matrix(const ModeLabel& mode_a,
                                        const ModeLabel& mode_b,
                                        double transmittance) {
  if (mode_a == mode_b) {
    throw std::invalid_argument("beamsplitter modes must be distinct");
  }
  if (!(transmittance > 0.0 && transmittance < 1.0)) {
    throw std::invalid_argument(
        fmt::format("transmittance {} outside (0, 1)", transmittance));
  }
  const double t = std::sqrt(transmittance);
  const double r = std::sqrt(1.0 - transmittance);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
  for (int q = 0; q < 2; ++q) {
    m(q, q) = t;
    m(q, 2 + q) = r;
    m(2 + q, q) = r;
    m(2 + q, 2 + q) = -t;
  }
  return SymplecticTransform({mode_a, mode_b}, m, Eigen::VectorXd::Zero(4));
}

SymplecticTransform phase_rotation_matrix(const ModeLabel& mode, double theta) {
  if (!std::isfinite(theta)) {
    throw std::invalid_argument("rotation angle must be finite");
  }
  Eigen::MatrixXd m(2, 2);
  m << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return SymplecticTransform({mode}, m, Eigen::VectorXd::Zero(2));
}

SymplecticTransform squeezer_matrix(const ModeLabel& mode, double r) {
  if (!std::isfinite(r)) {
    throw std::invalid_argument("squeezing parameter must be finite");
  }
  Eigen::MatrixXd m(2, 2);
  m << std::exp(r), 0.0, 0.0, std::exp(-r);
  return SymplecticTransform({mode}, m, Eigen::VectorXd::Zero(2));
}

SymplecticTransform displacement_matrix(const ModeLabel& mode, double dx,
                                        double dp) {
  if (!std::isfinite(dx) || !std::isfinite(dp)) {
    throw std::invalid_argument("displacement must be finite");
  }
  Eigen::VectorXd d(2);
  d << dx, dp;
  return SymplecticTransform::pure_displacement({mode}, d);
}

SymplecticTransform compose(const std::vector<ElementSpec>& elements,
                            const std::vector<ModeLabel>& modes) {
  const auto n = static_cast<Eigen::Index>(modes.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(2 * n);
  for (const auto& element : elements) {
    SymplecticTransform t = std::visit(
        [](const auto& e) -> SymplecticTransform {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, Beamsplitter>) {
            return beamsplitter_matrix(e.mode_a, e.mode_b, e.transmittance);
          } else if constexpr (std::is_same_v<T, PhaseRotation>) {
            return phase_rotation_matrix(e.mode, e.theta);
          } else if constexpr (std::is_same_v<T, Squeezer>) {
            return squeezer_matrix(e.mode, e.r);
          } else {
            return displacement_matrix(e.mode, e.dx, e.dp);
          }
        },
        element);
    Eigen::MatrixXd full = lift(t, modes);
    m = (full * m).eval();
    d = (full * d + lift_displacement(t, modes)).eval();
  }
  return SymplecticTransform(modes, std::move(m), std::move(d));
}

SymplecticTransform complete_passive_map(
    const std::vector<ModeLabel>& modes,
    const std::vector<NullifierConstraint>& constraints) {
  const auto n = static_cast<Eigen::Index>(modes.size());
  const auto k = static_cast<Eigen::Index>(constraints.size());
  if (n == 0) {
    throw std::invalid_argument("mode list is empty");
  }

  // Complex form of the constraints: the map must send each source vector
  // w_j = i * source_coeffs onto the target vector of its nullifier form.
  Eigen::MatrixXcd w(n, k);
  Eigen::MatrixXcd target(n, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto& c = constraints[j];
    if (c.source_coeffs.size() != n) {
      throw std::invalid_argument(fmt::format(
          "constraint {} has {} source coefficients for {} modes", j,
          c.source_coeffs.size(), n));
    }
    if (std::abs(c.nullifier_form.offset()) > 0.0) {
      throw std::invalid_argument("nullifier form must have zero offset");
    }
    w.col(j) = std::complex<double>(0.0, 1.0) *
               c.source_coeffs.cast<std::complex<double>>();
    target.col(j) = complexify(c.nullifier_form.dense(modes));
  }

  // A unitary sending w_j -> target_j exists iff the Hermitian Gram
  // matrices agree; this is exactly the condition that no constraint needs
  // weight on an antisqueezed source quadrature.
  Eigen::MatrixXcd gram_gap = w.adjoint() * w - target.adjoint() * target;
  if (k > 0 && gram_gap.cwiseAbs().maxCoeff() > kFeasibilityTol) {
    throw std::invalid_argument(
        fmt::format("constraints admit no passive completion "
                    "(gram mismatch {:.3e})",
                    gram_gap.cwiseAbs().maxCoeff()));
  }

  // Rank-revealing Gram-Schmidt over the source vectors, with the same
  // combinations applied to the targets. Dependent constraints must be
  // consistent; both orthonormal families are then completed with canonical
  // basis vectors, which keeps the construction deterministic.
  std::vector<Eigen::VectorXcd> q_src;
  std::vector<Eigen::VectorXcd> q_dst;
  auto project_out = [](const std::vector<Eigen::VectorXcd>& basis,
                        const Eigen::VectorXcd& v,
                        const std::vector<Eigen::VectorXcd>& partner,
                        Eigen::VectorXcd& v_partner) {
    Eigen::VectorXcd u = v;
    for (size_t i = 0; i < basis.size(); ++i) {
      const std::complex<double> coeff = basis[i].dot(u);
      u -= coeff * basis[i];
      v_partner -= coeff * partner[i];
    }
    return u;
  };

  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::VectorXcd residual_dst = target.col(j);
    Eigen::VectorXcd residual_src =
        project_out(q_src, w.col(j), q_dst, residual_dst);
    const double norm = residual_src.norm();
    if (norm > kRankTol) {
      q_src.push_back(residual_src / norm);
      q_dst.push_back(residual_dst / norm);
    } else if (residual_dst.norm() > kFeasibilityTol) {
      throw std::invalid_argument(
          "constraints are mutually inconsistent: dependent source rows map "
          "to independent nullifiers");
    }
  }

  // Complete each family with whichever canonical vector keeps the largest
  // residual, greedily; with n <= 8 the quadratic scan is immaterial.
  auto complete_basis = [n](std::vector<Eigen::VectorXcd>& basis) {
    while (static_cast<Eigen::Index>(basis.size()) < n) {
      Eigen::VectorXcd best;
      double best_norm = -1.0;
      for (Eigen::Index e = 0; e < n; ++e) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
        v(e) = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
          for (const auto& q : basis) {
            v -= q.dot(v) * q;
          }
        }
        if (v.norm() > best_norm) {
          best_norm = v.norm();
          best = v;
        }
      }
      if (best_norm < 1e-6) {
        throw std::runtime_error("failed to complete orthonormal basis");
      }
      basis.push_back(best.normalized());
    }
  };
  complete_basis(q_src);
  complete_basis(q_dst);

  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    u += q_dst[i] * q_src[i].adjoint();
  }

  SymplecticTransform map(modes, realify(u), Eigen::VectorXd::Zero(2 * n));
  if ((map.matrix() * map.matrix().transpose() -
       Eigen::MatrixXd::Identity(2 * n, 2 * n))
          .cwiseAbs()
          .maxCoeff() > kFeasibilityTol) {
    throw std::runtime_error("completed map is not orthogonal");
  }
  if (verify_nullifier_map(map, constraints).max_residual() > kFeasibilityTol) {
    throw std::invalid_argument(
        "constraints admit no passive completion within tolerance");
  }
  return map;
}

double NullifierMapReport::max_residual() const {
  double worst = 0.0;
  for (const auto& r : residuals) {
    worst = std::max(worst, std::max(r.squeezed, r.antisqueezed));
  }
  return worst;
}

NullifierMapReport verify_nullifier_map(
    const SymplecticTransform& map,
    const std::vector<NullifierConstraint>& constraints) {
  NullifierMapReport report;
  for (const auto& c : constraints) {
    Eigen::VectorXd pullback =
        map.matrix().transpose() * c.nullifier_form.dense(map.modes());
    ConstraintResidual residual{0.0, 0.0};
    for (int j = 0; j < map.num_modes(); ++j) {
      residual.antisqueezed =
          std::max(residual.antisqueezed, std::abs(pullback(2 * j)));
      residual.squeezed = std::max(
          residual.squeezed, std::abs(pullback(2 * j + 1) - c.source_coeffs(j)));
    }
    report.residuals.push_back(residual);
  }
  return report;
}

}  // namespace cvsim
