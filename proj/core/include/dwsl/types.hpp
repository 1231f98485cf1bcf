// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <numbers>

namespace dwsl {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

enum class Domain { Torus, Square };
enum class Boundary { Periodic, Dirichlet, Neumann };
enum class Parity { Even, Odd };

struct Geometry {
  Domain domain = Domain::Torus;
  Boundary boundary = Boundary::Periodic;

  static Geometry torus() { return {Domain::Torus, Boundary::Periodic}; }
  static Geometry dirichlet_square() { return {Domain::Square, Boundary::Dirichlet}; }
  static Geometry neumann_square() { return {Domain::Square, Boundary::Neumann}; }

  bool valid() const {
    return domain == Domain::Torus ? boundary == Boundary::Periodic
                                   : boundary != Boundary::Periodic;
  }
};

// n is an integer on the torus and a half-integer on the square.
struct ModeIndex {
  double n = 0.0;
  int m = 0;
  Parity parity = Parity::Even;
};

// Principal root with the sign chosen so that Re >= 0; on the cut (negative
// reals) the root is +i|w|^{1/2} for +0 imaginary part.
inline Complex principal_sqrt(Complex w) {
  Complex r = std::sqrt(w);
  if (r.real() < 0.0) r = -r;
  return r;
}

const char* to_string(Parity p);
const char* to_string(Boundary b);
const char* to_string(Domain d);

}  // namespace dwsl
