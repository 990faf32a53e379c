// Copyright (c) 2026 qdistill developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qdistill/matrix.hpp"
#include "qdistill/states.hpp"

namespace qdistill {

/// Single-qubit Pauli basis in the fixed convention: H is the +1
/// eigenvector of Z, X = [[0,1],[1,0]], Y = [[0,-i],[i,0]].
inline const ComplexMatrix& pauli(std::size_t i) {
  static const std::array<ComplexMatrix, 4> ps = {
      ComplexMatrix::identity(2),
      ComplexMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}}),
      ComplexMatrix::from_rows({{0.0, Complex(0.0, -1.0)},
                                {Complex(0.0, 1.0), 0.0}}),
      ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, -1.0}})};
  return ps.at(i);
}

/// Ordered Kraus operators; sum K^dagger K <= I, with equality iff the
/// channel is trace preserving (probabilistic transmission otherwise).
class KrausChannel {
 public:
  explicit KrausChannel(std::vector<ComplexMatrix> operators)
      : ops_(std::move(operators)) {
    if (ops_.empty())
      throw std::invalid_argument("KrausChannel: no operators");
    const std::size_t d = ops_.front().dim();
    ComplexMatrix sum(d);
    for (const auto& k : ops_) {
      if (k.dim() != d)
        throw std::invalid_argument("KrausChannel: mixed operator dimensions");
      sum += k.adjoint() * k;
    }
    const ComplexMatrix defect = ComplexMatrix::identity(d) - sum;
    const auto es = herm_eig(defect.hermitized());
    if (es.values.back() < -1e-10) {
      std::ostringstream ss;
      ss << "KrausChannel: sum K^dagger K exceeds identity by "
         << -es.values.back();
      throw std::invalid_argument(ss.str());
    }
    trace_preserving_ = defect.frobenius_norm() <= 1e-10;
  }

  const std::vector<ComplexMatrix>& operators() const { return ops_; }
  std::size_t dim() const { return ops_.front().dim(); }
  bool trace_preserving() const { return trace_preserving_; }

 private:
  std::vector<ComplexMatrix> ops_;
  bool trace_preserving_ = false;
};

/// Intensity transmissions of the polarization-dependent filter. t_h
/// defaults to 1 (ideal transparent H axis) but is carried through so an
/// imperfect H transmission can be modeled.
struct PartialPolarizerParams {
  double t_v = 1.0;
  double t_h = 1.0;
};

/// 4x4 Hermitian process matrix in the Pauli basis (I, X, Y, Z);
/// trace <= 1, strictly below 1 for lossy channels.
class ChiMatrix {
 public:
  explicit ChiMatrix(const ComplexMatrix& m) : matrix_(m.hermitized()) {
    if (m.dim() != 4)
      throw std::invalid_argument("ChiMatrix: must be 4x4");
    const double asym = m.max_asymmetry();
    if (asym > 1e-10) {
      std::ostringstream ss;
      ss << "ChiMatrix: not Hermitian (max asymmetry " << asym << ")";
      throw std::invalid_argument(ss.str());
    }
    const double tr = matrix_.trace().real();
    if (!(tr > 0.0 && tr <= 1.0 + 1e-10)) {
      std::ostringstream ss;
      ss << "ChiMatrix: trace " << tr << " outside (0, 1]";
      throw std::invalid_argument(ss.str());
    }
  }

  const ComplexMatrix& matrix() const { return matrix_; }
  double trace() const { return matrix_.trace().real(); }

  /// Same matrix with negative eigenvalues zeroed (no renormalization);
  /// this is the variant fidelity computations consume.
  ChiMatrix clipped() const {
    auto es = herm_eig(matrix_);
    ComplexMatrix m(4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        Complex s{};
        for (std::size_t k = 0; k < 4; ++k)
          if (es.values[k] > 0.0)
            s += es.vectors(i, k) * es.values[k] * std::conj(es.vectors(j, k));
        m(i, j) = s;
      }
    return ChiMatrix(m.hermitized());
  }

 private:
  ComplexMatrix matrix_;
};

/// Which photon of the pair a local channel acts on.
enum class Arm { First, Second };

namespace detail {
inline void check_polarizer(const PartialPolarizerParams& p) {
  check_unit_range(p.t_v, "t_v");
  check_unit_range(p.t_h, "t_h");
}
}  // namespace detail

/// K0 = diag(sqrt(t_h), sqrt(t_v)): transmits H with probability t_h and V
/// with t_v. Non trace preserving unless both are 1.
inline KrausChannel partial_polarizer(const PartialPolarizerParams& p) {
  detail::check_polarizer(p);
  return KrausChannel({ComplexMatrix::diagonal(
      {std::sqrt(p.t_h), std::sqrt(p.t_v)})});
}

/// Dephasing stage: a retarder of strength lambda between two wave-plate
/// rotations U(theta) = [[cos, sin], [sin, -cos]] (self-inverse). Trace
/// preserving for every (theta, lambda).
inline KrausChannel phase_damping(double theta, double lambda) {
  detail::check_unit_range(lambda, "lambda");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const ComplexMatrix u = ComplexMatrix::from_rows({{c, s}, {s, -c}});
  const ComplexMatrix e1 =
      u * ComplexMatrix::diagonal({1.0, std::sqrt(1.0 - lambda)}) * u;
  const ComplexMatrix e2 =
      u * ComplexMatrix::diagonal({0.0, std::sqrt(lambda)}) * u;
  return KrausChannel({e1, e2});
}

/// Applies a single-qubit channel to one arm of a two-qubit state:
/// sum_k (K kron I) rho (K kron I)^dagger, renormalized. Returns the
/// heralded state and the pre-normalization trace (the success
/// probability of the filter).
inline std::pair<DensityMatrix, double> apply_local(const KrausChannel& ch,
                                                    const DensityMatrix& rho,
                                                    Arm arm = Arm::First) {
  if (ch.dim() != 2 || rho.dim() != 4)
    throw std::invalid_argument(
        "apply_local: expects a single-qubit channel and a two-qubit state");
  const ComplexMatrix eye = ComplexMatrix::identity(2);
  ComplexMatrix out(4);
  for (const auto& k : ch.operators()) {
    const ComplexMatrix big = arm == Arm::First ? kron(k, eye) : kron(eye, k);
    out += big * rho.matrix() * big.adjoint();
  }
  const double p = out.trace().real();
  if (p <= 1e-12)
    throw std::invalid_argument(
        "apply_local: state fully filtered (transmission probability ~ 0)");
  out *= 1.0 / p;
  return {DensityMatrix(out.hermitized(), rho.label()),
          std::min(p, 1.0)};
}

/// Closed-form heralded output of the filter on the approximate dephased
/// family: populations eps^2 t_h and t_v on the family pair, coherence
/// eps sqrt(t_h t_v) (1 - lambda/2), normalized by t_v + t_h eps^2.
inline DensityMatrix distilled_analytic(double epsilon, double lambda,
                                        const PartialPolarizerParams& p,
                                        StateFamily family = StateFamily::Phi) {
  detail::check_unit_range(epsilon, "epsilon");
  detail::check_unit_range(lambda, "lambda");
  detail::check_polarizer(p);
  const double denom = p.t_v + p.t_h * epsilon * epsilon;
  if (denom <= 1e-12)
    throw std::invalid_argument(
        "distilled_analytic: vanishing output trace (t_v + t_h eps^2 ~ 0)");

  const std::size_t hi = family == StateFamily::Phi ? basis::kHH : basis::kHV;
  const std::size_t lo = family == StateFamily::Phi ? basis::kVV : basis::kVH;
  const double coh =
      epsilon * std::sqrt(p.t_h * p.t_v) * (1.0 - lambda / 2.0) / denom;
  ComplexMatrix m(4);
  m(hi, hi) = epsilon * epsilon * p.t_h / denom;
  m(lo, lo) = p.t_v / denom;
  m(hi, lo) = coh;
  m(lo, hi) = coh;
  return DensityMatrix(m, "distilled_analytic");
}

/// Ideal partial-polarizer process matrix: nonzero only at (I,I), (I,Z),
/// (Z,I), (Z,Z), with trace (1 + t_v)/2.
inline ChiMatrix chi_ideal(double t_v) {
  detail::check_unit_range(t_v, "t_v");
  const double rt = std::sqrt(t_v);
  ComplexMatrix m(4);
  m(0, 0) = (1.0 + 2.0 * rt + t_v) / 4.0;
  m(0, 3) = (1.0 - t_v) / 4.0;
  m(3, 0) = (1.0 - t_v) / 4.0;
  m(3, 3) = (1.0 - 2.0 * rt + t_v) / 4.0;
  return ChiMatrix(m);
}

/// Pauli-basis chi matrix of a single-qubit channel: expand each Kraus
/// operator as K = sum_i c_i E_i with c_i = Tr(E_i K)/2, then
/// chi_ij = sum_k c_ki conj(c_kj).
inline ChiMatrix channel_to_chi(const KrausChannel& ch) {
  if (ch.dim() != 2)
    throw std::invalid_argument("channel_to_chi: single-qubit channels only");
  ComplexMatrix m(4);
  for (const auto& k : ch.operators()) {
    std::array<Complex, 4> c;
    for (std::size_t i = 0; i < 4; ++i) c[i] = (pauli(i) * k).trace() * 0.5;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) m(i, j) += c[i] * std::conj(c[j]);
  }
  return ChiMatrix(m);
}

}  // namespace qdistill
