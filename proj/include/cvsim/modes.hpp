#pragma once

#include <compare>
#include <string>
#include <vector>

namespace cvsim {

/// Opaque name of an optical mode. Labels must be unique within a state.
struct ModeLabel {
  std::string name;

  auto operator<=>(const ModeLabel&) const = default;
};

enum class Quadrature { X, P };

/// Addresses one entry of the interleaved quadrature ordering
/// (x1, p1, x2, p2, ...) that every state and transform follows.
struct QuadratureIndex {
  ModeLabel mode;
  Quadrature quadrature;

  auto operator<=>(const QuadratureIndex&) const = default;
};

/// Conventional mode names used by the gate protocol.
namespace labels {
inline const ModeLabel alpha{"alpha"};
inline const ModeLabel beta{"beta"};
inline const ModeLabel c1{"C1"};
inline const ModeLabel c2{"C2"};
inline const ModeLabel c3{"C3"};
inline const ModeLabel c4{"C4"};
inline const ModeLabel mu{"mu"};
inline const ModeLabel nu{"nu"};

inline std::vector<ModeLabel> cluster_chain() { return {c1, c2, c3, c4}; }
}  // namespace labels

}  // namespace cvsim
