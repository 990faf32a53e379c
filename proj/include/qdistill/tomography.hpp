// Copyright (c) 2026 qdistill developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "qdistill/channels.hpp"
#include "qdistill/matrix.hpp"
#include "qdistill/metrics.hpp"
#include "qdistill/rng.hpp"
#include "qdistill/states.hpp"

namespace qdistill {

/// Polarization analyzer orientations: the four single-arm measurement
/// states H, V, D = (H+V)/sqrt(2), R = (H+iV)/sqrt(2).
enum class Analyzer : int { H = 0, V = 1, D = 2, R = 3 };

inline const char* analyzer_name(Analyzer a) {
  switch (a) {
    case Analyzer::H: return "H";
    case Analyzer::V: return "V";
    case Analyzer::D: return "D";
    case Analyzer::R: return "R";
  }
  throw std::invalid_argument("analyzer_name: bad analyzer");
}

inline Analyzer analyzer_from_name(const std::string& s) {
  if (s == "H") return Analyzer::H;
  if (s == "V") return Analyzer::V;
  if (s == "D") return Analyzer::D;
  if (s == "R") return Analyzer::R;
  throw std::invalid_argument("analyzer_from_name: unknown label '" + s + "'");
}

/// Rank-1 projector of a single analyzer.
inline const ComplexMatrix& analyzer_projector(Analyzer a) {
  static const std::array<ComplexMatrix, 4> ps = {
      ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, 0.0}}),
      ComplexMatrix::from_rows({{0.0, 0.0}, {0.0, 1.0}}),
      ComplexMatrix::from_rows({{0.5, 0.5}, {0.5, 0.5}}),
      ComplexMatrix::from_rows({{0.5, Complex(0.0, -0.5)},
                                {Complex(0.0, 0.5), 0.5}})};
  return ps[static_cast<int>(a)];
}

/// A measurement setting: one analyzer per arm, or a single analyzer for
/// one-qubit tomography.
struct Setting {
  Analyzer first = Analyzer::H;
  std::optional<Analyzer> second;

  static Setting single(Analyzer a) { return Setting{a, std::nullopt}; }
  static Setting pair(Analyzer a, Analyzer b) { return Setting{a, b}; }

  bool is_pair() const { return second.has_value(); }

  ComplexMatrix projector() const {
    if (!second) return analyzer_projector(first);
    return kron(analyzer_projector(first), analyzer_projector(*second));
  }

  std::string name() const {
    std::string s = analyzer_name(first);
    if (second) s += analyzer_name(*second);
    return s;
  }

  friend bool operator<(const Setting& a, const Setting& b) {
    const int a2 = a.second ? static_cast<int>(*a.second) : -1;
    const int b2 = b.second ? static_cast<int>(*b.second) : -1;
    return std::tie(a.first, a2) < std::tie(b.first, b2);
  }
  friend bool operator==(const Setting& a, const Setting& b) {
    return a.first == b.first && a.second == b.second;
  }
};

inline const std::array<Analyzer, 4>& analyzer_set() {
  static const std::array<Analyzer, 4> all = {Analyzer::H, Analyzer::V,
                                              Analyzer::D, Analyzer::R};
  return all;
}

/// The canonical 16 product settings {H,V,D,R} x {H,V,D,R}, row-major.
inline const std::vector<Setting>& two_qubit_settings() {
  static const std::vector<Setting> s = [] {
    std::vector<Setting> v;
    for (Analyzer a : analyzer_set())
      for (Analyzer b : analyzer_set()) v.push_back(Setting::pair(a, b));
    return v;
  }();
  return s;
}

inline const std::vector<Setting>& single_qubit_settings() {
  static const std::vector<Setting> s = [] {
    std::vector<Setting> v;
    for (Analyzer a : analyzer_set()) v.push_back(Setting::single(a));
    return v;
  }();
  return s;
}

/// Coincidence (or singles) counts per setting, plus the acquisition
/// scale: the expected count for a unit-probability setting.
struct CountTable {
  std::map<Setting, std::int64_t> entries;
  double acquisition_scale = 0.0;

  std::int64_t total() const {
    std::int64_t t = 0;
    for (const auto& [s, n] : entries) t += n;
    return t;
  }

  /// Total over the settings whose analyzers are all H or V; the
  /// transmission-normalization counter of process tomography.
  std::int64_t hv_total() const {
    std::int64_t t = 0;
    for (const auto& [s, n] : entries) {
      const bool f_ok = s.first == Analyzer::H || s.first == Analyzer::V;
      const bool s_ok = !s.second || *s.second == Analyzer::H ||
                        *s.second == Analyzer::V;
      if (f_ok && s_ok) t += n;
    }
    return t;
  }
};

/// Born rule Tr(rho P_setting), clipped to [0, 1].
inline double born_probability(const DensityMatrix& rho, const Setting& s) {
  const ComplexMatrix p = s.projector();
  if (p.dim() != rho.dim())
    throw std::invalid_argument("born_probability: dimension mismatch");
  double v = (rho.matrix() * p).trace().real();
  return std::clamp(v, 0.0, 1.0);
}

enum class Noise { None, Poisson };

namespace stream {
// Stream tags keep independent consumers of the same seed apart.
inline constexpr std::uint64_t kCounts = 1;
inline constexpr std::uint64_t kResample = 2;
}  // namespace stream

/// Simulates one tomography acquisition. Expected count at a setting is
/// acquisition_scale * weight * Tr(rho P); `weight` is the heralding
/// probability of the stage under test (1 for a direct measurement), and
/// the table records acquisition_scale * weight as its own scale, the
/// actual unit-probability rate of this acquisition. Noiseless mode
/// rounds the expectation to the nearest integer; Poisson mode draws each
/// setting from its own (seed, setting index) stream, so the table
/// depends only on the seed and the settings order.
inline CountTable simulate_counts(const DensityMatrix& rho,
                                  const std::vector<Setting>& settings,
                                  double acquisition_scale, Noise noise,
                                  std::uint64_t seed, double weight = 1.0) {
  if (!(acquisition_scale > 0.0))
    throw std::invalid_argument("simulate_counts: acquisition_scale must be > 0");
  if (!(weight > 0.0 && weight <= 1.0 + 1e-12))
    throw std::invalid_argument("simulate_counts: weight outside (0, 1]");
  CountTable table;
  table.acquisition_scale = acquisition_scale * weight;
  for (std::size_t idx = 0; idx < settings.size(); ++idx) {
    const double mean =
        acquisition_scale * weight * born_probability(rho, settings[idx]);
    std::int64_t n = 0;
    if (noise == Noise::None) {
      n = static_cast<std::int64_t>(std::llround(mean));
    } else {
      Rng rng(seed, stream::kCounts, idx);
      n = rng.next_poisson(mean);
    }
    table.entries[settings[idx]] = n;
  }
  return table;
}

/// All-zero table over the given settings (a fully filtered acquisition).
inline CountTable make_zero_table(const std::vector<Setting>& settings,
                                  double acquisition_scale) {
  CountTable t;
  t.acquisition_scale = acquisition_scale;
  for (const auto& s : settings) t.entries[s] = 0;
  return t;
}

struct TomoResult {
  DensityMatrix rho;
  enum class Method { Linear, Mle } method = Method::Linear;
  double log_likelihood = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  bool converged = true;
  double clipped_mass = 0.0;  // negative eigenvalue mass removed (linear)
};

namespace detail {

/// Hermitian operator basis the linear inversion works in: the Pauli
/// matrices for one qubit, their tensor products for two.
inline std::vector<ComplexMatrix> hermitian_basis(std::size_t dim) {
  std::vector<ComplexMatrix> b;
  if (dim == 2) {
    for (std::size_t i = 0; i < 4; ++i) b.push_back(pauli(i));
  } else if (dim == 4) {
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) b.push_back(kron(pauli(i), pauli(j)));
  } else {
    throw std::invalid_argument("hermitian_basis: dim must be 2 or 4");
  }
  return b;
}

/// Eigen-clips a Hermitian matrix to PSD, renormalizes to unit trace and
/// reports the removed negative mass.
inline std::pair<DensityMatrix, double> clip_to_density(
    const ComplexMatrix& m, const std::string& label = "") {
  auto es = herm_eig(m.hermitized());
  double removed = 0.0;
  double tr = 0.0;
  for (double& w : es.values) {
    if (w < 0.0) {
      removed += -w;
      w = 0.0;
    }
    tr += w;
  }
  if (tr <= 0.0)
    throw std::invalid_argument("clip_to_density: no positive mass left");
  const std::size_t n = m.dim();
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Complex s{};
      for (std::size_t k = 0; k < n; ++k)
        s += es.vectors(i, k) * (es.values[k] / tr) * std::conj(es.vectors(j, k));
      out(i, j) = s;
    }
  return {DensityMatrix(out.hermitized(), label), removed};
}

inline void require_canonical_settings(const CountTable& counts,
                                       std::size_t dim) {
  const auto& wanted =
      dim == 4 ? two_qubit_settings() : single_qubit_settings();
  for (const auto& s : wanted) {
    if (counts.entries.find(s) == counts.entries.end()) {
      throw std::invalid_argument(
          "tomography: count table is missing setting " + s.name());
    }
  }
  for (const auto& [s, n] : counts.entries) {
    if (n < 0)
      throw std::invalid_argument("tomography: negative count at " + s.name());
  }
}

inline std::size_t table_dim(const CountTable& counts) {
  if (counts.entries.empty())
    throw std::invalid_argument("tomography: empty count table");
  return counts.entries.begin()->first.is_pair() ? 4 : 2;
}

/// Poisson log-likelihood (up to the n! constant) of a state given a
/// table: sum_s [n_s log(mu_s) - mu_s], mu_s = scale * Tr(rho P_s).
inline double poisson_log_likelihood(const ComplexMatrix& rho,
                                     const CountTable& counts) {
  double ll = 0.0;
  for (const auto& [s, n] : counts.entries) {
    double p = (rho * s.projector()).trace().real();
    p = std::clamp(p, 1e-15, 1.0);
    const double mu = counts.acquisition_scale * p;
    ll += n > 0 ? static_cast<double>(n) * std::log(mu) - mu : -mu;
  }
  return ll;
}

}  // namespace detail

/// Linear-inversion state tomography: solve the Born-rule system on the
/// normalized frequencies, Hermitize, clip negative eigenvalues and
/// renormalize. The canonical 16 (or 4) settings make the system square
/// and well conditioned; anything else is rejected.
inline TomoResult qst_linear(const CountTable& counts) {
  if (!(counts.acquisition_scale > 0.0))
    throw std::invalid_argument("qst_linear: acquisition_scale must be > 0");
  const std::size_t dim = detail::table_dim(counts);
  detail::require_canonical_settings(counts, dim);
  if (counts.total() <= 0)
    throw std::invalid_argument("qst_linear: no counts in table");

  const auto& settings =
      dim == 4 ? two_qubit_settings() : single_qubit_settings();
  const auto basis_ops = detail::hermitian_basis(dim);
  const std::size_t n = settings.size();

  ComplexMatrix a(n);
  std::vector<Complex> f(n);
  for (std::size_t s = 0; s < n; ++s) {
    const ComplexMatrix proj = settings[s].projector();
    for (std::size_t k = 0; k < n; ++k)
      a(s, k) = (proj * basis_ops[k]).trace().real();
    f[s] = static_cast<double>(counts.entries.at(settings[s])) /
           counts.acquisition_scale;
  }
  const auto x = solve_linear(a, f);

  ComplexMatrix rho(dim);
  for (std::size_t k = 0; k < n; ++k) rho += x[k].real() * basis_ops[k];
  auto [clipped, removed] = detail::clip_to_density(rho, "qst_linear");

  TomoResult r{clipped, TomoResult::Method::Linear};
  r.clipped_mass = removed;
  r.log_likelihood =
      detail::poisson_log_likelihood(clipped.matrix(), counts);
  return r;
}

/// Maximum-likelihood tomography. The state is parametrized as
/// rho = T T^dagger / Tr(T T^dagger) with T lower triangular, which keeps
/// the iterate exactly PSD and unit trace, and the Poisson log-likelihood
/// is ascended by a deterministic coordinate-wise line search seeded from
/// the linear-inversion estimate. Convergence: sweep improvement below
/// 1e-10 (capped at 5000 sweeps; a miss is flagged, not thrown).
inline TomoResult qst_mle(const CountTable& counts) {
  const TomoResult lin = qst_linear(counts);
  const std::size_t d = lin.rho.dim();

  // Cholesky factor of the (slightly regularized) linear estimate.
  ComplexMatrix t0(d);
  {
    ComplexMatrix a = lin.rho.matrix();
    const double delta = 1e-6;
    for (std::size_t i = 0; i < d; ++i) a(i, i) += delta;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        Complex s = a(i, j);
        for (std::size_t k = 0; k < j; ++k) s -= t0(i, k) * std::conj(t0(j, k));
        if (i == j)
          t0(i, i) = std::sqrt(std::max(s.real(), 1e-14));
        else
          t0(i, j) = s / t0(j, j);
      }
    }
  }

  // Parameter vector: row-major lower triangle, diagonal real.
  std::vector<double> x;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      x.push_back(t0(i, j).real());
      if (i != j) x.push_back(t0(i, j).imag());
    }

  const auto& settings =
      d == 4 ? two_qubit_settings() : single_qubit_settings();
  std::vector<ComplexMatrix> projs;
  std::vector<double> freqs;
  for (const auto& s : settings) {
    projs.push_back(s.projector());
    freqs.push_back(static_cast<double>(counts.entries.at(s)) /
                    counts.acquisition_scale);
  }

  auto build_rho = [&](const std::vector<double>& p) {
    ComplexMatrix t(d);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        const double re = p[idx++];
        const double im = i == j ? 0.0 : p[idx++];
        t(i, j) = Complex(re, im);
      }
    ComplexMatrix rho(d);
    double tr = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        Complex s{};
        for (std::size_t k = 0; k <= std::min(i, j); ++k)
          s += t(i, k) * std::conj(t(j, k));
        rho(i, j) = s;
        rho(j, i) = std::conj(s);
        if (i == j) tr += s.real();
      }
    if (tr <= 0.0) tr = 1.0;
    rho *= 1.0 / tr;
    return rho;
  };

  // Scale-normalized Poisson objective sum_s [f_s ln(p_s) - p_s]; affine
  // in the log-likelihood with positive slope, so it shares the maximizer
  // while staying O(10) in magnitude at any acquisition scale (a raw
  // log-likelihood of ~1e13 would drown the 1e-10 tolerance in roundoff).
  auto objective = [&](const std::vector<double>& p) {
    const ComplexMatrix rho = build_rho(p);
    double obj = 0.0;
    for (std::size_t s = 0; s < projs.size(); ++s) {
      double prob = 0.0;
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          prob += (rho(i, j) * projs[s](j, i)).real();
      prob = std::clamp(prob, 1e-15, 1.0);
      obj += freqs[s] > 0.0 ? freqs[s] * std::log(prob) - prob : -prob;
    }
    return obj;
  };

  double best = objective(x);
  std::vector<double> step(x.size(), 0.02);
  int sweeps = 0;
  bool converged = false;
  for (; sweeps < 5000; ++sweeps) {
    const double sweep_start = best;
    double max_step = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double xi = x[i];
      x[i] = xi + step[i];
      double f = objective(x);
      if (f > best) {
        best = f;
        step[i] = std::min(step[i] * 1.7, 1.0);
      } else {
        x[i] = xi - step[i];
        f = objective(x);
        if (f > best) {
          best = f;
          step[i] = std::min(step[i] * 1.7, 1.0);
        } else {
          x[i] = xi;
          step[i] = std::max(step[i] * 0.4, 1e-12);
        }
      }
      max_step = std::max(max_step, step[i]);
    }
    if (best - sweep_start < 1e-10 && max_step < 1e-8) {
      converged = true;
      break;
    }
  }

  // A 1e-14 floor keeps the reported state strictly PSD even after
  // re-diagonalization downstream.
  ComplexMatrix rho = build_rho(x);
  const double eta = 1e-14;
  rho *= (1.0 - eta);
  for (std::size_t i = 0; i < d; ++i) rho(i, i) += eta / static_cast<double>(d);

  TomoResult r{DensityMatrix(rho.hermitized(), "qst_mle"),
               TomoResult::Method::Mle};
  r.log_likelihood = detail::poisson_log_likelihood(rho, counts);
  r.iterations = sweeps;
  r.converged = converged;
  return r;
}

/// Probe and reference acquisitions of the single-qubit process
/// tomography protocol, one pair of tables per probe state (H, V, D, R
/// order). Reference tables are taken with the substrate only (identity
/// channel) and provide the transmission normalization.
struct QptInput {
  std::array<CountTable, 4> probe_tables;
  std::array<CountTable, 4> reference_tables;
};

/// Process-tomography output: the raw reconstruction (possibly slightly
/// non-PSD under noise) and its PSD-clipped variant, which is what
/// fidelity computations consume.
struct QptResult {
  ChiMatrix raw;
  ChiMatrix clipped;
};

/// Reconstructs the chi matrix of a single-qubit channel from the four
/// probe outputs. Each probe state is reconstructed by linear inversion,
/// weighted by its relative transmission p_i = N_i / N_i^r (H/V-basis
/// totals against the reference), the off-diagonal channel elements are
/// assembled from the probe combinations, and the result is converted to
/// the Pauli basis and Hermitized.
inline QptResult qpt_single_qubit(const QptInput& input) {
  std::array<ComplexMatrix, 4> weighted;  // epsilon(|i><i|), unnormalized
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& probe = input.probe_tables[i];
    const auto& ref = input.reference_tables[i];
    detail::require_canonical_settings(ref, 2);
    const double n_ref = static_cast<double>(ref.hv_total());
    if (n_ref <= 0.0)
      throw std::invalid_argument(
          "qpt_single_qubit: zero reference counts for probe " +
          std::string(analyzer_name(analyzer_set()[i])));
    detail::require_canonical_settings(probe, 2);
    const double n_probe = static_cast<double>(probe.hv_total());
    const double p_i = n_probe / n_ref;
    if (n_probe <= 0.0) {
      weighted[i] = ComplexMatrix(2);  // fully filtered probe
    } else {
      weighted[i] = qst_linear(probe).rho.matrix() * Complex(p_i);
    }
  }

  const ComplexMatrix& wh = weighted[0];
  const ComplexMatrix& wv = weighted[1];
  const ComplexMatrix& wd = weighted[2];
  const ComplexMatrix& wr = weighted[3];
  const ComplexMatrix sum_hv = wh + wv;
  const Complex img(0.0, 1.0);
  // epsilon(|H><V|) and epsilon(|V><H|) from the D/R probe combinations.
  const ComplexMatrix e01 = wd + img * wr - Complex(0.5) * (1.0 + img) * sum_hv;
  const ComplexMatrix e10 = wd - img * wr - Complex(0.5) * (1.0 - img) * sum_hv;

  // Solve sum_ij chi_ij E_i |m><n| E_j^dagger = epsilon(|m><n|) for all
  // four basis units: 16 complex equations in the 16 chi entries.
  const std::array<const ComplexMatrix*, 4> eps = {&wh, &e01, &e10, &wv};
  ComplexMatrix system(16);
  std::vector<Complex> rhs(16);
  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t n = 0; n < 2; ++n)
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) {
          const std::size_t row = ((m * 2 + n) * 2 + a) * 2 + b;
          for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
              system(row, i * 4 + j) =
                  pauli(i)(a, m) * std::conj(pauli(j)(b, n));
          rhs[row] = (*eps[m * 2 + n])(a, b);
        }
  const auto chi_vec = solve_linear(system, rhs);

  ComplexMatrix chi(4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) chi(i, j) = chi_vec[i * 4 + j];
  const ChiMatrix raw(chi.hermitized());
  return QptResult{raw, raw.clipped()};
}

/// Transmission that best explains a reconstructed chi matrix: maximizes
/// process_fidelity(chi, chi_ideal(t)) over t in [0, 1] by golden-section
/// search to 1e-4. Callers pass the PSD-clipped chi.
inline std::pair<double, double> fit_tv(const ChiMatrix& chi) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = 1.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  auto f = [&](double t) { return process_fidelity(chi, chi_ideal(t)); };
  double fc = f(c), fd = f(d);
  while (b - a > 1e-5) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  const double t_best = 0.5 * (a + b);
  return {t_best, f(t_best)};
}

}  // namespace qdistill
