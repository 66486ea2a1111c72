#pragma once

// Dense statevector simulation with the small gate set used by the
// embedding circuits.
//
// Bit ordering: qubit 0 is the most significant bit of the amplitude index,
// so on two qubits |10> has index 2.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qkge/errors.hpp"

namespace qkge {

using Complex = std::complex<double>;

inline constexpr int kMaxQubits = 24;

class StateVector {
 public:
  /// |0...0> on n qubits.
  explicit StateVector(int n_qubits) : n_qubits_(checked_qubits(n_qubits)), amps_(std::size_t{1} << n_qubits_) {
    amps_[0] = Complex{1.0, 0.0};
  }

  /// Takes ownership of raw amplitudes; they are not renormalized.
  StateVector(int n_qubits, std::vector<Complex> amps) : n_qubits_(checked_qubits(n_qubits)), amps_(std::move(amps)) {
    if (amps_.size() != (std::size_t{1} << n_qubits_)) {
      throw UsageError("amplitude count " + std::to_string(amps_.size()) + " does not match 2^" +
                       std::to_string(n_qubits_));
    }
  }

  static StateVector basis(int n_qubits, std::size_t index) {
    StateVector s(n_qubits);
    if (index >= s.dim()) throw UsageError("basis index out of range");
    s.amps_[0] = 0.0;
    s.amps_[index] = 1.0;
    return s;
  }

  int n_qubits() const noexcept { return n_qubits_; }
  std::size_t dim() const noexcept { return amps_.size(); }
  std::span<const Complex> amplitudes() const noexcept { return amps_; }
  std::span<Complex> amplitudes() noexcept { return amps_; }
  const Complex& operator[](std::size_t i) const noexcept { return amps_[i]; }

  double squared_norm() const noexcept {
    double acc = 0.0;
    for (const auto& a : amps_) acc += std::norm(a);
    return acc;
  }

  /// Bit mask selecting `qubit` within an amplitude index.
  std::size_t mask_of(int qubit) const {
    check_qubit(qubit);
    return std::size_t{1} << (n_qubits_ - 1 - qubit);
  }

  void check_qubit(int qubit) const {
    if (qubit < 0 || qubit >= n_qubits_) {
      throw UsageError("qubit " + std::to_string(qubit) + " out of range for " + std::to_string(n_qubits_) +
                       "-qubit state");
    }
  }

  friend bool operator==(const StateVector&, const StateVector&) = default;

 private:
  static int checked_qubits(int n) {
    if (n < 1 || n > kMaxQubits) {
      throw ConfigError("qubit count " + std::to_string(n) + " outside [1, " + std::to_string(kMaxQubits) + "]");
    }
    return n;
  }

  int n_qubits_;
  std::vector<Complex> amps_;
};

inline StateVector zero_state(int n_qubits) { return StateVector(n_qubits); }

/// Row-major 2x2 matrix {m00, m01, m10, m11}.
struct Gate2 {
  Complex m00, m01, m10, m11;
};

inline StateVector apply_gate(StateVector s, int qubit, const Gate2& g) {
  const std::size_t mask = s.mask_of(qubit);
  auto amps = s.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (i & mask) continue;
    const Complex a0 = amps[i];
    const Complex a1 = amps[i | mask];
    amps[i] = g.m00 * a0 + g.m01 * a1;
    amps[i | mask] = g.m10 * a0 + g.m11 * a1;
  }
  return s;
}

inline StateVector apply_hadamard(StateVector s, int qubit) {
  const std::size_t mask = s.mask_of(qubit);
  constexpr double r = std::numbers::sqrt2 / 2.0;
  auto amps = s.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (i & mask) continue;
    const Complex a0 = amps[i];
    const Complex a1 = amps[i | mask];
    amps[i] = (a0 + a1) * r;
    amps[i | mask] = (a0 - a1) * r;
  }
  return s;
}

inline StateVector apply_hadamard_all(StateVector s) {
  for (int q = 0; q < s.n_qubits(); ++q) s = apply_hadamard(std::move(s), q);
  return s;
}

/// RZ(a) = diag(e^{-ia/2}, e^{ia/2}).
inline StateVector apply_rz(StateVector s, int qubit, double angle) {
  const std::size_t mask = s.mask_of(qubit);
  const Complex lo = std::polar(1.0, -angle / 2.0);
  const Complex hi = std::polar(1.0, angle / 2.0);
  for (std::size_t i = 0; auto& a : s.amplitudes()) {
    a *= (i++ & mask) ? hi : lo;
  }
  return s;
}

/// RY(b) = [[cos b/2, -sin b/2], [sin b/2, cos b/2]].
inline StateVector apply_ry(StateVector s, int qubit, double angle) {
  const std::size_t mask = s.mask_of(qubit);
  const double c = std::cos(angle / 2.0);
  const double sn = std::sin(angle / 2.0);
  auto amps = s.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (i & mask) continue;
    const Complex a0 = amps[i];
    const Complex a1 = amps[i | mask];
    amps[i] = c * a0 - sn * a1;
    amps[i | mask] = sn * a0 + c * a1;
  }
  return s;
}

/// General rotation: RZ(phi), then RY(theta), then RZ(omega), in time order.
inline StateVector apply_rot(StateVector s, int qubit, double phi, double theta, double omega) {
  s = apply_rz(std::move(s), qubit, phi);
  s = apply_ry(std::move(s), qubit, theta);
  return apply_rz(std::move(s), qubit, omega);
}

inline StateVector apply_cnot(StateVector s, int control, int target) {
  if (control == target) throw UsageError("CNOT control and target must differ");
  const std::size_t cmask = s.mask_of(control);
  const std::size_t tmask = s.mask_of(target);
  auto amps = s.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if ((i & cmask) && !(i & tmask)) std::swap(amps[i], amps[i | tmask]);
  }
  return s;
}

/// <a|b> = sum conj(a_i) b_i.
inline Complex inner_product(const StateVector& a, const StateVector& b) {
  if (a.n_qubits() != b.n_qubits()) {
    throw UsageError("inner product of " + std::to_string(a.n_qubits()) + "- and " + std::to_string(b.n_qubits()) +
                     "-qubit states");
  }
  Complex acc{0.0, 0.0};
  const auto x = a.amplitudes();
  const auto y = b.amplitudes();
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::conj(x[i]) * y[i];
  return acc;
}

/// |<a|b>|^2.
inline double fidelity(const StateVector& a, const StateVector& b) { return std::norm(inner_product(a, b)); }

}  // namespace qkge
