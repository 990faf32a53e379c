// Copyright (c) 2026 qdistill developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdistill/config.hpp"
#include "qdistill/pipelines.hpp"

namespace qdistill {

// Artifact files are written by hand so the byte layout is part of the
// interface: fixed key order, reals at 12 significant digits, '.' decimal
// separator and '\n' line endings regardless of locale.

namespace detail {

inline std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

/// Re-indents a serialized JSON block for embedding at `indent` levels.
inline std::string indent_block(const std::string& block, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  std::string out;
  std::istringstream in(block);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!first) out += "\n" + pad;
    out += line;
    first = false;
  }
  return out;
}

}  // namespace detail

/// Matrix as nested arrays of [re, im] pairs plus the basis ordering.
inline std::string matrix_to_json(const ComplexMatrix& m,
                                  const std::string& basis) {
  std::ostringstream out;
  out << "{\n  \"dim\": " << m.dim() << ",\n  \"basis\": "
      << detail::json_string(basis) << ",\n  \"entries\": [\n";
  for (std::size_t i = 0; i < m.dim(); ++i) {
    out << "    [";
    for (std::size_t j = 0; j < m.dim(); ++j) {
      if (j) out << ", ";
      out << "[" << detail::fmt12(m(i, j).real()) << ", "
          << detail::fmt12(m(i, j).imag()) << "]";
    }
    out << "]" << (i + 1 < m.dim() ? "," : "") << "\n";
  }
  out << "  ]\n}\n";
  return out.str();
}

inline std::string density_to_json(const DensityMatrix& rho) {
  return matrix_to_json(rho.matrix(),
                        rho.dim() == 4 ? basis::kTwoQubit : basis::kOneQubit);
}

inline std::string chi_to_json(const ChiMatrix& chi) {
  return matrix_to_json(chi.matrix(), basis::kPauli);
}

/// CSV: scale comment, fixed header, canonical row order. Single-qubit
/// settings leave arm2 empty.
inline std::string counts_to_csv(const CountTable& t) {
  std::ostringstream out;
  out << "# acquisition_scale=" << detail::fmt12(t.acquisition_scale) << "\n";
  out << "arm1,arm2,count\n";
  for (const auto& [s, n] : t.entries) {
    out << analyzer_name(s.first) << ","
        << (s.second ? analyzer_name(*s.second) : "") << "," << n << "\n";
  }
  return out.str();
}

inline std::string counts_to_json(const CountTable& t) {
  std::ostringstream out;
  out << "{\n  \"acquisition_scale\": " << detail::fmt12(t.acquisition_scale)
      << ",\n  \"entries\": [\n";
  std::size_t i = 0;
  for (const auto& [s, n] : t.entries) {
    out << "    {\"arm1\": \"" << analyzer_name(s.first) << "\", \"arm2\": \""
        << (s.second ? analyzer_name(*s.second) : "") << "\", \"count\": " << n
        << "}" << (++i < t.entries.size() ? "," : "") << "\n";
  }
  out << "  ]\n}\n";
  return out.str();
}

inline CountTable counts_from_csv(const std::string& text) {
  CountTable t;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("acquisition_scale=");
      if (pos != std::string::npos)
        t.acquisition_scale = std::stod(line.substr(pos + 18));
      continue;
    }
    if (!header_seen) {
      if (line != "arm1,arm2,count")
        throw std::runtime_error("counts csv: bad header '" + line + "'");
      header_seen = true;
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw std::runtime_error("counts csv: bad row '" + line + "'");
    const std::string a1 = line.substr(0, c1);
    const std::string a2 = line.substr(c1 + 1, c2 - c1 - 1);
    const std::int64_t n = std::stoll(line.substr(c2 + 1));
    Setting s = a2.empty()
                    ? Setting::single(analyzer_from_name(a1))
                    : Setting::pair(analyzer_from_name(a1),
                                    analyzer_from_name(a2));
    t.entries[s] = n;
  }
  if (!header_seen) throw std::runtime_error("counts csv: missing header");
  return t;
}

inline CountTable counts_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  CountTable t;
  t.acquisition_scale = j.at("acquisition_scale").get<double>();
  for (const auto& e : j.at("entries")) {
    const std::string a1 = e.at("arm1").get<std::string>();
    const std::string a2 = e.at("arm2").get<std::string>();
    Setting s = a2.empty()
                    ? Setting::single(analyzer_from_name(a1))
                    : Setting::pair(analyzer_from_name(a1),
                                    analyzer_from_name(a2));
    t.entries[s] = e.at("count").get<std::int64_t>();
  }
  return t;
}

inline ComplexMatrix matrix_from_json(const std::string& text,
                                      std::string* basis_out = nullptr) {
  const auto j = nlohmann::json::parse(text);
  const std::size_t dim = j.at("dim").get<std::size_t>();
  if (basis_out) *basis_out = j.at("basis").get<std::string>();
  ComplexMatrix m(dim);
  const auto& rows = j.at("entries");
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t k = 0; k < dim; ++k)
      m(i, k) = Complex(rows.at(i).at(k).at(0).get<double>(),
                        rows.at(i).at(k).at(1).get<double>());
  return m;
}

inline std::string metrics_to_json_fragment(const MetricsReport& m,
                                            int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  std::ostringstream out;
  out << "{\n";
  out << pad << "  \"purity\": " << detail::fmt12(m.purity) << ",\n";
  out << pad << "  \"fidelity_bell\": " << detail::fmt12(m.fidelity_bell)
      << ",\n";
  out << pad << "  \"concurrence\": " << detail::fmt12(m.concurrence) << ",\n";
  out << pad << "  \"eof\": " << detail::fmt12(m.eof) << ",\n";
  out << pad << "  \"epsilon_exp\": " << detail::fmt12(m.epsilon_exp) << ",\n";
  out << pad << "  \"lambda_exp\": " << detail::fmt12(m.lambda_exp) << "\n";
  out << pad << "}";
  return out.str();
}

inline std::string mc_errors_to_json_fragment(
    const std::map<std::string, McReport>& errors, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  std::ostringstream out;
  out << "{";
  std::size_t i = 0;
  for (const auto& [name, r] : errors) {
    out << (i++ ? "," : "") << "\n"
        << pad << "  \"" << name << "\": {\"mean\": " << detail::fmt12(r.mean)
        << ", \"std\": " << detail::fmt12(r.std)
        << ", \"n_trials\": " << r.n_trials << ", \"seed\": " << r.seed
        << ", \"skipped\": " << r.skipped << "}";
  }
  if (!errors.empty()) out << "\n" << pad;
  out << "}";
  return out.str();
}

inline std::string distillation_to_json(const DistillationReport& r) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"initial\": " << metrics_to_json_fragment(r.initial, 1) << ",\n";
  out << "  \"distilled\": " << metrics_to_json_fragment(r.distilled, 1)
      << ",\n";
  out << "  \"success_prob\": " << detail::fmt12(r.success_prob) << ",\n";
  out << "  \"fitted_tv\": "
      << (r.fitted_tv ? detail::fmt12(*r.fitted_tv) : std::string("null"))
      << ",\n";
  out << "  \"initial_errors\": "
      << mc_errors_to_json_fragment(r.initial_errors, 1) << ",\n";
  out << "  \"distilled_errors\": "
      << mc_errors_to_json_fragment(r.distilled_errors, 1) << "\n";
  out << "}\n";
  return out.str();
}

inline std::string sweep_to_csv(const std::vector<SweepRow>& rows,
                                const std::string& parameter_name) {
  std::ostringstream out;
  out << parameter_name << ",eof,fidelity,purity,success_prob\n";
  for (const auto& r : rows) {
    out << detail::fmt12(r.parameter) << "," << detail::fmt12(r.eof) << ","
        << detail::fmt12(r.fidelity) << "," << detail::fmt12(r.purity) << ","
        << detail::fmt12(r.success_prob) << "\n";
  }
  return out.str();
}

inline std::string sweep_to_json(const std::vector<SweepRow>& rows,
                                 const std::string& parameter_name) {
  std::ostringstream out;
  out << "[\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out << "  {\"" << parameter_name << "\": " << detail::fmt12(r.parameter)
        << ", \"eof\": " << detail::fmt12(r.eof)
        << ", \"fidelity\": " << detail::fmt12(r.fidelity)
        << ", \"purity\": " << detail::fmt12(r.purity)
        << ", \"success_prob\": " << detail::fmt12(r.success_prob) << "}"
        << (i + 1 < rows.size() ? "," : "") << "\n";
  }
  out << "]\n";
  return out.str();
}

inline std::string table1_to_json(const std::vector<Table1Row>& rows) {
  std::ostringstream out;
  out << "[\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out << "  {\n";
    out << "    \"row\": " << r.index << ",\n";
    out << "    \"family\": \"" << to_string(r.family) << "\",\n";
    out << "    \"fitted_tv\": " << detail::fmt12(r.fitted_tv) << ",\n";
    out << "    \"success_prob\": " << detail::fmt12(r.report.success_prob)
        << ",\n";
    out << "    \"model_initial\": "
        << metrics_to_json_fragment(r.report.initial, 2) << ",\n";
    out << "    \"model_distilled\": "
        << metrics_to_json_fragment(r.report.distilled, 2) << ",\n";
    out << "    \"reference_distilled\": {\"epsilon\": "
        << detail::fmt12(r.reference.eps_dist)
        << ", \"lambda\": " << detail::fmt12(r.reference.lam_dist)
        << ", \"fidelity\": " << detail::fmt12(r.reference.fid_dist)
        << ", \"eof\": " << detail::fmt12(r.reference.eof_dist) << "},\n";
    out << "    \"deviations\": {\"epsilon\": " << detail::fmt12(r.dev_eps)
        << ", \"lambda\": " << detail::fmt12(r.dev_lambda)
        << ", \"fidelity\": " << detail::fmt12(r.dev_fidelity)
        << ", \"eof\": " << detail::fmt12(r.dev_eof) << "}\n";
    out << "  }" << (i + 1 < rows.size() ? "," : "") << "\n";
  }
  out << "]\n";
  return out.str();
}

inline std::string table1_to_csv(const std::vector<Table1Row>& rows) {
  std::ostringstream out;
  out << "row,family,fitted_tv,success_prob,"
         "model_eps_init,model_lambda_init,model_fid_init,model_eof_init,"
         "model_eps_dist,model_lambda_dist,model_fid_dist,model_eof_dist,"
         "ref_eps_dist,ref_lambda_dist,ref_fid_dist,ref_eof_dist,"
         "dev_eps,dev_lambda,dev_fid,dev_eof\n";
  for (const auto& r : rows) {
    out << r.index << "," << to_string(r.family) << ","
        << detail::fmt12(r.fitted_tv) << ","
        << detail::fmt12(r.report.success_prob) << ","
        << detail::fmt12(r.report.initial.epsilon_exp) << ","
        << detail::fmt12(r.report.initial.lambda_exp) << ","
        << detail::fmt12(r.report.initial.fidelity_bell) << ","
        << detail::fmt12(r.report.initial.eof) << ","
        << detail::fmt12(r.report.distilled.epsilon_exp) << ","
        << detail::fmt12(r.report.distilled.lambda_exp) << ","
        << detail::fmt12(r.report.distilled.fidelity_bell) << ","
        << detail::fmt12(r.report.distilled.eof) << ","
        << detail::fmt12(r.reference.eps_dist) << ","
        << detail::fmt12(r.reference.lam_dist) << ","
        << detail::fmt12(r.reference.fid_dist) << ","
        << detail::fmt12(r.reference.eof_dist) << ","
        << detail::fmt12(r.dev_eps) << "," << detail::fmt12(r.dev_lambda)
        << "," << detail::fmt12(r.dev_fidelity) << ","
        << detail::fmt12(r.dev_eof) << "\n";
  }
  return out.str();
}

/// Canonical JSON echo of a config (fixed key order, 12 digit reals).
inline std::string config_to_json(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"family\": \"" << to_string(c.family) << "\",\n";
  out << "  \"epsilon\": " << detail::fmt12(c.epsilon) << ",\n";
  out << "  \"lambda\": " << detail::fmt12(c.lambda) << ",\n";
  out << "  \"theta\": " << detail::fmt12(c.theta) << ",\n";
  out << "  \"prep\": \"" << (c.prep == PrepForm::Approx ? "approx" : "exact")
      << "\",\n";
  out << "  \"depol_weight\": " << detail::fmt12(c.depol_weight) << ",\n";
  out << "  \"t_v\": " << detail::fmt12(c.t_v) << ",\n";
  out << "  \"t_h\": " << detail::fmt12(c.t_h) << ",\n";
  out << "  \"tv_true\": " << detail::fmt12(c.tv_true) << ",\n";
  out << "  \"acquisition_scale\": " << detail::fmt12(c.acquisition_scale)
      << ",\n";
  out << "  \"method\": \""
      << (c.method == TomoMethod::Linear ? "linear" : "mle") << "\",\n";
  out << "  \"noise\": \"" << (c.noise == Noise::None ? "none" : "poisson")
      << "\",\n";
  out << "  \"seed\": " << c.seed << ",\n";
  out << "  \"mc_trials\": " << c.mc_trials << ",\n";
  out << "  \"mc_seed\": " << c.mc_seed << ",\n";
  out << "  \"tv_list\": [";
  for (std::size_t i = 0; i < c.tv_list.size(); ++i)
    out << (i ? ", " : "") << detail::fmt12(c.tv_list[i]);
  out << "],\n";
  out << "  \"eps_list\": [";
  for (std::size_t i = 0; i < c.eps_list.size(); ++i)
    out << (i ? ", " : "") << detail::fmt12(c.eps_list[i]);
  out << "]\n";
  out << "}\n";
  return out.str();
}

/// UTC timestamp; honors SOURCE_DATE_EPOCH so reproducibility checks can
/// pin it.
inline std::string manifest_timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* sde = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(sde, nullptr, 10));
  }
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string manifest_to_json(const std::string& command,
                                    const ExperimentConfig& config,
                                    const std::vector<std::string>& outputs,
                                    const std::string& version) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"tool\": \"qdistill\",\n";
  out << "  \"version\": \"" << version << "\",\n";
  out << "  \"command\": \"" << command << "\",\n";
  out << "  \"timestamp\": \"" << manifest_timestamp() << "\",\n";
  out << "  \"seed\": " << config.seed << ",\n";
  out << "  \"mc_seed\": " << config.mc_seed << ",\n";
  out << "  \"outputs\": [";
  for (std::size_t i = 0; i < outputs.size(); ++i)
    out << (i ? ", " : "") << detail::json_string(outputs[i]);
  out << "],\n";
  std::string cfg = config_to_json(config);
  while (!cfg.empty() && cfg.back() == '\n') cfg.pop_back();
  out << "  \"config\": " << detail::indent_block(cfg, 1) << "\n";
  out << "}\n";
  return out.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace qdistill
