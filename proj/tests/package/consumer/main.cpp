#include <cmath>
#include <iostream>

#include "gsf/state.hpp"

int main() {
  const gsf::GroundState g = gsf::solve_ground_state(gsf::VectorField{gsf::RadialPowerField{1.0, 0.0, 3}});
  const double k = gsf::kinetic_energy(g).value;
  std::cout << k << "\n";
  return std::abs(k - 1.5) < 1e-9 ? 0 : 1;
}
