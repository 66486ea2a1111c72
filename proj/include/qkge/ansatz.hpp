#pragma once

// Layered strongly-entangling circuit: per layer a general rotation on every
// qubit, then a ring of CNOTs (q -> (q + r_l) mod n) with r_l = (l mod (n-1)) + 1.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qkge/errors.hpp"
#include "qkge/simulator.hpp"

namespace qkge {

struct AnsatzShape {
  int n_qubits = 2;
  int n_layers = 2;  // zero layers is the identity circuit

  std::size_t parameter_count() const noexcept {
    return 3 * static_cast<std::size_t>(n_layers) * static_cast<std::size_t>(n_qubits);
  }

  void validate() const {
    if (n_qubits < 1 || n_qubits > kMaxQubits) throw ConfigError("ansatz qubit count out of range");
    if (n_layers < 0) throw ConfigError("ansatz layer count must be non-negative");
  }

  friend bool operator==(const AnsatzShape&, const AnsatzShape&) = default;
};

/// Entangler range used by layer `layer` on `n_qubits` qubits.
inline int entangler_range(int layer, int n_qubits) { return n_qubits < 2 ? 0 : (layer % (n_qubits - 1)) + 1; }

/// Rotation angles laid out as [layer][qubit][phi, theta, omega].
class ParameterTensor {
 public:
  ParameterTensor() = default;
  explicit ParameterTensor(AnsatzShape shape) : shape_(shape), values_(shape.parameter_count(), 0.0) {
    shape_.validate();
  }
  ParameterTensor(AnsatzShape shape, std::vector<double> values) : shape_(shape), values_(std::move(values)) {
    shape_.validate();
    if (values_.size() != shape_.parameter_count()) {
      throw UsageError("parameter count " + std::to_string(values_.size()) + " does not match shape (" +
                       std::to_string(shape_.parameter_count()) + ")");
    }
  }

  const AnsatzShape& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  static std::size_t index(const AnsatzShape& shape, int layer, int qubit, int angle) noexcept {
    return (static_cast<std::size_t>(layer) * shape.n_qubits + qubit) * 3 + angle;
  }
  double at(int layer, int qubit, int angle) const { return values_[index(shape_, layer, qubit, angle)]; }
  double& at(int layer, int qubit, int angle) { return values_[index(shape_, layer, qubit, angle)]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  bool all_finite() const noexcept {
    for (double v : values_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  friend bool operator==(const ParameterTensor&, const ParameterTensor&) = default;

 private:
  AnsatzShape shape_{};
  std::vector<double> values_;
};

namespace detail {
inline void check_match(const StateVector& s, const ParameterTensor& p) {
  if (s.n_qubits() != p.shape().n_qubits) {
    throw UsageError("state has " + std::to_string(s.n_qubits()) + " qubits but ansatz expects " +
                     std::to_string(p.shape().n_qubits));
  }
}
}  // namespace detail

inline StateVector apply_ansatz(StateVector s, const ParameterTensor& p) {
  detail::check_match(s, p);
  const int n = p.shape().n_qubits;
  for (int l = 0; l < p.shape().n_layers; ++l) {
    for (int q = 0; q < n; ++q) s = apply_rot(std::move(s), q, p.at(l, q, 0), p.at(l, q, 1), p.at(l, q, 2));
    if (n < 2) continue;
    const int r = entangler_range(l, n);
    for (int q = 0; q < n; ++q) s = apply_cnot(std::move(s), q, (q + r) % n);
  }
  return s;
}

inline StateVector apply_ansatz_inverse(StateVector s, const ParameterTensor& p) {
  detail::check_match(s, p);
  const int n = p.shape().n_qubits;
  for (int l = p.shape().n_layers - 1; l >= 0; --l) {
    if (n >= 2) {
      const int r = entangler_range(l, n);
      for (int q = n - 1; q >= 0; --q) s = apply_cnot(std::move(s), q, (q + r) % n);
    }
    for (int q = n - 1; q >= 0; --q) s = apply_rot(std::move(s), q, -p.at(l, q, 2), -p.at(l, q, 1), -p.at(l, q, 0));
  }
  return s;
}

/// The reference state H^n |0...0> that every entity circuit starts from.
inline StateVector uniform_superposition(int n_qubits) { return apply_hadamard_all(zero_state(n_qubits)); }

/// Entity state U(params) H^n |0...0>, shared by the head and tail roles.
inline StateVector embed_entity(const ParameterTensor& p) {
  return apply_ansatz(uniform_superposition(p.shape().n_qubits), p);
}

}  // namespace qkge
