#pragma once

#include <variant>

namespace jjchain {

/// Junction inductance known independently (e.g. from DC resistance).
struct InductanceAnchor {
  double l_j;  // H
};

/// Ground capacitance known independently (e.g. from electrostatics).
struct CapacitanceAnchor {
  double c_g;  // F
};

using ImpedanceAnchor = std::variant<InductanceAnchor, CapacitanceAnchor>;

}  // namespace jjchain
