// Copyright (c) 2026 qdistill developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qdistill/channels.hpp"
#include "qdistill/matrix.hpp"
#include "qdistill/states.hpp"

namespace qdistill {

/// Tr(rho^2); 1 for pure states, 1/d for the maximally mixed state.
inline double purity(const DensityMatrix& rho) {
  const double p = (rho.matrix() * rho.matrix()).trace().real();
  const double lo = 1.0 / static_cast<double>(rho.dim());
  if (p < lo - 1e-10 || p > 1.0 + 1e-10) {
    std::ostringstream ss;
    ss << "purity: Tr(rho^2) = " << p << " outside [1/d, 1]";
    throw std::domain_error(ss.str());
  }
  return p;
}

/// <target| rho |target>.
inline double fidelity_pure(const DensityMatrix& rho, const PureKet& target) {
  if (rho.dim() != target.dim())
    throw std::invalid_argument("fidelity_pure: dimension mismatch");
  Complex f{};
  for (std::size_t i = 0; i < rho.dim(); ++i)
    for (std::size_t j = 0; j < rho.dim(); ++j)
      f += std::conj(target[i]) * rho(i, j) * target[j];
  return std::clamp(f.real(), 0.0, 1.0 + 1e-10);
}

/// Process fidelity Tr(sqrt(sqrt(chi) chi_ref sqrt(chi)))^2 normalized by
/// Tr(chi) Tr(chi_ref); invariant under positive rescaling of either
/// argument and symmetric under swap.
inline double process_fidelity(const ChiMatrix& chi, const ChiMatrix& chi_ref) {
  const ComplexMatrix s = psd_sqrt(chi.matrix());
  const ComplexMatrix inner = (s * chi_ref.matrix() * s).hermitized();
  const double tr = psd_sqrt(inner).trace().real();
  const double denom = chi.trace() * chi_ref.trace();
  if (denom <= 0.0)
    throw std::invalid_argument("process_fidelity: non-positive trace");
  return tr * tr / denom;
}

/// Two-qubit concurrence from the spin-flip spectrum: descending square
/// roots w_i of the eigenvalues of rho (Y kron Y) rho* (Y kron Y), then
/// C = max(0, w1 - w2 - w3 - w4). The product is evaluated in the similar
/// Hermitian form sqrt(rho) rho_tilde sqrt(rho), which shares its nonzero
/// spectrum.
inline double concurrence(const DensityMatrix& rho) {
  if (rho.dim() != 4)
    throw std::invalid_argument("concurrence: two-qubit states only");
  const ComplexMatrix yy = kron(pauli(2), pauli(2));
  const ComplexMatrix tilde = yy * rho.matrix().conjugate() * yy;
  const ComplexMatrix s = psd_sqrt(rho.matrix());
  const ComplexMatrix r = (s * tilde * s).hermitized();
  auto es = herm_eig(r);
  // The square root amplifies eigenvalue noise near pure states; anything
  // this far below the leading eigenvalue is numerical dust.
  const double floor = 1e-13 * std::max(es.values[0], 0.0);
  double c = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double v = es.values[i] < floor ? 0.0 : es.values[i];
    const double w = std::sqrt(std::max(0.0, v));
    c += (i == 0 ? w : -w);
  }
  return std::max(0.0, c);
}

/// Binary entropy, base 2.
inline double binary_entropy(double x) {
  double h = 0.0;
  if (x > 0.0) h -= x * std::log2(x);
  if (x < 1.0) h -= (1.0 - x) * std::log2(1.0 - x);
  return h;
}

inline double eof_from_concurrence(double c) {
  c = std::clamp(c, 0.0, 1.0);
  return binary_entropy(0.5 * (1.0 + std::sqrt(1.0 - c * c)));
}

/// Entanglement of formation via the concurrence construction.
inline double eof(const DensityMatrix& rho) {
  return eof_from_concurrence(concurrence(rho));
}

/// sqrt of the population ratio on the family pair: for the Phi family
/// sqrt(<HH|rho|HH> / <VV|rho|VV>), Psi by relabeling HH->HV, VV->VH.
inline double estimate_epsilon(const DensityMatrix& rho,
                               StateFamily family = StateFamily::Phi) {
  const std::size_t hi = family == StateFamily::Phi ? basis::kHH : basis::kHV;
  const std::size_t lo = family == StateFamily::Phi ? basis::kVV : basis::kVH;
  const double denom = rho(lo, lo).real();
  if (denom <= 1e-12)
    throw std::domain_error(
        "estimate_epsilon: vanishing reference population");
  return std::sqrt(std::max(0.0, rho(hi, hi).real()) / denom);
}

/// 2 (1 - Re(coherence) * eps_exp / population), the dephasing-degree
/// estimator on the family pair. The real part is used so residual phase
/// errors register as extra dephasing.
inline double estimate_lambda(const DensityMatrix& rho,
                              StateFamily family = StateFamily::Phi) {
  const std::size_t hi = family == StateFamily::Phi ? basis::kHH : basis::kHV;
  const std::size_t lo = family == StateFamily::Phi ? basis::kVV : basis::kVH;
  const double pop = rho(hi, hi).real();
  if (pop <= 1e-12)
    throw std::domain_error("estimate_lambda: vanishing population");
  const double coh = rho(hi, lo).real();  // Re Tr[rho |hi><lo|], with
                                          // Tr[rho |hi><lo|] = <lo|rho|hi>
  const double eps = estimate_epsilon(rho, family);
  return 2.0 * (1.0 - coh * eps / pop);
}

/// All figures of merit for one state.
struct MetricsReport {
  double purity = 0.0;
  double fidelity_bell = 0.0;
  double concurrence = 0.0;
  double eof = 0.0;
  double epsilon_exp = 0.0;
  double lambda_exp = 0.0;
};

/// Evaluates everything against the family's maximally entangled target.
inline MetricsReport compute_metrics(const DensityMatrix& rho,
                                     StateFamily family = StateFamily::Phi) {
  MetricsReport r;
  r.purity = purity(rho);
  r.fidelity_bell = fidelity_pure(rho, make_family_ket(family, 1.0));
  r.concurrence = concurrence(rho);
  r.eof = eof_from_concurrence(r.concurrence);
  r.epsilon_exp = estimate_epsilon(rho, family);
  r.lambda_exp = estimate_lambda(rho, family);
  return r;
}

}  // namespace qdistill
