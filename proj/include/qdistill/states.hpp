// Copyright (c) 2026 qdistill developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdistill/matrix.hpp"

namespace qdistill {

// Basis convention, the single source of truth for ordering:
// one qubit (H, V); two qubits (HH, HV, VH, VV). H is the first basis
// vector, V the second, so Z = diag(1, -1) assigns +1 to H.
namespace basis {
inline constexpr std::size_t kHH = 0;
inline constexpr std::size_t kHV = 1;
inline constexpr std::size_t kVH = 2;
inline constexpr std::size_t kVV = 3;
inline constexpr const char* kOneQubit = "H,V";
inline constexpr const char* kTwoQubit = "HH,HV,VH,VV";
inline constexpr const char* kPauli = "I,X,Y,Z";
}  // namespace basis

/// Which Bell-like family a two-qubit state belongs to: Phi lives on the
/// HH/VV subspace, Psi on HV/VH (the image of Phi under X on the second
/// qubit).
enum class StateFamily { Phi, Psi };

inline const char* to_string(StateFamily f) {
  return f == StateFamily::Phi ? "phi" : "psi";
}

/// Normalized pure state; dim 2 or 4.
class PureKet {
 public:
  PureKet(std::vector<Complex> amplitudes) : amps_(std::move(amplitudes)) {
    double n2 = 0.0;
    for (const auto& a : amps_) n2 += std::norm(a);
    if (std::abs(n2 - 1.0) > 1e-12) {
      std::ostringstream ss;
      ss << "PureKet: amplitudes not normalized (|a|^2 = " << n2 << ")";
      throw std::invalid_argument(ss.str());
    }
  }

  std::size_t dim() const { return amps_.size(); }
  const Complex& operator[](std::size_t i) const { return amps_[i]; }
  const std::vector<Complex>& amplitudes() const { return amps_; }

 private:
  std::vector<Complex> amps_;
};

/// Hermitian, unit-trace, PSD (to tolerance) matrix.
class DensityMatrix {
 public:
  explicit DensityMatrix(const ComplexMatrix& m, std::string label = "")
      : matrix_(m.hermitized()), label_(std::move(label)) {
    const double asym = m.max_asymmetry();
    if (asym > 1e-10) {
      std::ostringstream ss;
      ss << "DensityMatrix: not Hermitian (max asymmetry " << asym << ")";
      throw std::invalid_argument(ss.str());
    }
    const double tr = matrix_.trace().real();
    if (std::abs(tr - 1.0) > 1e-10) {
      std::ostringstream ss;
      ss << "DensityMatrix: trace " << tr << " != 1";
      throw std::invalid_argument(ss.str());
    }
    const auto es = herm_eig(matrix_);
    if (es.values.back() < -1e-9) {
      std::ostringstream ss;
      ss << "DensityMatrix: negative eigenvalue " << es.values.back();
      throw std::invalid_argument(ss.str());
    }
  }

  std::size_t dim() const { return matrix_.dim(); }
  const ComplexMatrix& matrix() const { return matrix_; }
  const std::string& label() const { return label_; }

  Complex operator()(std::size_t i, std::size_t j) const {
    return matrix_(i, j);
  }

 private:
  ComplexMatrix matrix_;
  std::string label_;
};

/// Preparation knobs for the partially dephased families. epsilon is the
/// H/V amplitude ratio, lambda the dephasing degree, theta the wave-plate
/// angle of the exact preparation (radians; irrelevant for the approximate
/// form).
struct MixedPrepParams {
  double epsilon = 1.0;
  double lambda = 0.0;
  double theta = 0.0;
  StateFamily family = StateFamily::Phi;
};

namespace detail {

inline void check_unit_range(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    std::ostringstream ss;
    ss << name << " = " << v << " outside [0, 1]";
    throw std::invalid_argument(ss.str());
  }
}

/// X on the second qubit: relabels HH<->HV and VH<->VV, turning the Phi
/// family into the Psi family.
inline ComplexMatrix second_qubit_flip() {
  ComplexMatrix x(4);
  x(basis::kHH, basis::kHV) = 1.0;
  x(basis::kHV, basis::kHH) = 1.0;
  x(basis::kVH, basis::kVV) = 1.0;
  x(basis::kVV, basis::kVH) = 1.0;
  return x;
}

}  // namespace detail

/// |Phi_eps> = (eps|HH> + |VV>) / sqrt(1 + eps^2).
inline PureKet make_phi(double epsilon) {
  if (epsilon < 0.0)
    throw std::invalid_argument("make_phi: epsilon must be >= 0");
  const double n = std::sqrt(1.0 + epsilon * epsilon);
  return PureKet({epsilon / n, 0.0, 0.0, 1.0 / n});
}

/// |Psi_eps> = (eps|HV> + |VH>) / sqrt(1 + eps^2).
inline PureKet make_psi(double epsilon) {
  if (epsilon < 0.0)
    throw std::invalid_argument("make_psi: epsilon must be >= 0");
  const double n = std::sqrt(1.0 + epsilon * epsilon);
  return PureKet({0.0, epsilon / n, 1.0 / n, 0.0});
}

inline PureKet make_family_ket(StateFamily family, double epsilon) {
  return family == StateFamily::Phi ? make_phi(epsilon) : make_psi(epsilon);
}

inline DensityMatrix density_from_ket(const PureKet& k, std::string label = "") {
  ComplexMatrix m(k.dim());
  for (std::size_t i = 0; i < k.dim(); ++i)
    for (std::size_t j = 0; j < k.dim(); ++j)
      m(i, j) = k[i] * std::conj(k[j]);
  return DensityMatrix(m, std::move(label));
}

/// Exact dephased preparation: the wave-plate/retarder stage applied to the
/// pure family state, written out element by element. With c = cos(theta),
/// s = sin(theta), r = sqrt(1 - lambda) the independent entries are
///   a1  = eps^2 (1 - 2 c^2 s^2 (1-r))        (HH,HH)
///   a2  = (eps/4) sin(4 theta) (1-r)         (HH,HV)
///   a3  = 2 c^2 s^2 (1-r)                    (HV,HV)
///   a4  = (eps^2/4) sin(4 theta) (1-r)       (HH,VH)
///   a5  = 2 eps c^2 s^2 (1-r)                (HV,VH)
///   a6  = (eps^2/2) sin^2(2 theta) (1-r)     (VH,VH)
///   a7  = (eps/4) (1 + 3r - (1-r) cos(4 theta))   (HH,VV)
///   a8  = -(1/4) sin(4 theta) (1-r)          (HV,VV)
///   a9  = -(eps/4) sin(4 theta) (1-r)        (VH,VV)
///   a10 = 1 - 2 c^2 s^2 (1-r)                (VV,VV)
/// all divided by (1 + eps^2). The Psi form is the same matrix conjugated
/// by X on the second qubit.
inline DensityMatrix make_mixed_exact(const MixedPrepParams& p) {
  detail::check_unit_range(p.epsilon, "epsilon");
  detail::check_unit_range(p.lambda, "lambda");

  const double e = p.epsilon;
  const double r = std::sqrt(1.0 - p.lambda);
  const double c = std::cos(p.theta);
  const double s = std::sin(p.theta);
  const double cs2 = c * c * s * s;
  const double s4 = std::sin(4.0 * p.theta);
  const double c4 = std::cos(4.0 * p.theta);
  const double d = 1.0 - r;

  const double a1 = e * e * (1.0 - 2.0 * cs2 * d);
  const double a2 = e / 4.0 * s4 * d;
  const double a3 = 2.0 * cs2 * d;
  const double a4 = e * e / 4.0 * s4 * d;
  const double a5 = 2.0 * e * cs2 * d;
  const double a6 = e * e / 2.0 * (4.0 * cs2) * d;  // sin^2(2 theta) = 4 c^2 s^2
  const double a7 = e / 4.0 * (1.0 + 3.0 * r - d * c4);
  const double a8 = -0.25 * s4 * d;
  const double a9 = -e / 4.0 * s4 * d;
  const double a10 = 1.0 - 2.0 * cs2 * d;

  ComplexMatrix m = ComplexMatrix::from_rows({{a1, a2, a4, a7},
                                              {a2, a3, a5, a8},
                                              {a4, a5, a6, a9},
                                              {a7, a8, a9, a10}});
  m *= 1.0 / (1.0 + e * e);

  if (p.family == StateFamily::Psi) {
    const ComplexMatrix x2 = detail::second_qubit_flip();
    m = x2 * m * x2;
  }
  return DensityMatrix(m, "mixed_exact");
}

/// Approximate dephased family (the canonical X-state form): populations
/// eps^2 and 1 on the family's diagonal pair, real coherence
/// eps (1 - lambda/2) between them, everything over (1 + eps^2).
inline DensityMatrix make_mixed_approx(double epsilon, double lambda,
                                       StateFamily family = StateFamily::Phi) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    std::ostringstream ss;
    ss << "make_mixed_approx: epsilon = " << epsilon << " outside (0, 1]";
    throw std::invalid_argument(ss.str());
  }
  detail::check_unit_range(lambda, "lambda");

  const double norm = 1.0 + epsilon * epsilon;
  const double coh = epsilon * (1.0 - lambda / 2.0) / norm;
  ComplexMatrix m(4);
  const std::size_t hi = family == StateFamily::Phi ? basis::kHH : basis::kHV;
  const std::size_t lo = family == StateFamily::Phi ? basis::kVV : basis::kVH;
  m(hi, hi) = epsilon * epsilon / norm;
  m(lo, lo) = 1.0 / norm;
  m(hi, lo) = coh;
  m(lo, hi) = coh;
  return DensityMatrix(m, "mixed_approx");
}

}  // namespace qdistill
