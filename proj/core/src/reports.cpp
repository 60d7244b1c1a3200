/*
   Copyright 2026 the ddsa authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/
#include <json.hpp>

#include "ddsa/covariance.hpp"
#include "ddsa/equilibrium.hpp"
#include "ddsa/montecarlo.hpp"
#include "ddsa/tilt.hpp"

namespace ddsa {

namespace {

using nlohmann::json;

json to_json_value(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

json to_json_value(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json_value(const Provenance& p) {
  json j{{"mode", p.mode}};
  if (p.fd_step > 0.0) j["h"] = p.fd_step;
  if (p.samples > 0) j["samples"] = p.samples;
  if (p.samples > 0) j["seed"] = p.seed;
  return j;
}

std::string format_level(double level) {
  std::string s = std::to_string(level);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

std::string to_json(const EquilibriumReport& report) {
  json j{
      {"x_star", to_json_value(report.x_star)},
      {"outer_iterations", report.outer_iterations},
      {"inner_tolerance", report.inner_tolerance},
      {"outer_tolerance", report.outer_tolerance},
      {"observed_contraction_ratio", report.observed_contraction_ratio},
      {"residual_norm", report.residual_norm},
      {"interior", report.interior},
      {"noise_floor", report.noise_floor},
  };
  return j.dump(2);
}

std::string to_json(const CovarianceReport& report) {
  json j{
      {"sigma", to_json_value(report.sigma)},
      {"w_static", to_json_value(report.w_static)},
      {"w_dynamic", to_json_value(report.w_dynamic)},
      {"w", to_json_value(report.w)},
      {"asymptotic_covariance", to_json_value(report.asymptotic)},
      {"min_real_eigenpart_w", report.min_real_eigenpart_w},
      {"sigma_eigenvalue_floor", report.sigma_eigenvalue_floor},
      {"w_condition", report.w_condition},
      {"ill_conditioned", report.ill_conditioned},
      {"provenance",
       {{"sigma", to_json_value(report.sigma_provenance)},
        {"w", to_json_value(report.w_provenance)}}},
  };
  return j.dump(2);
}

std::string to_json(const NormalityReport& report) {
  json cov = json::object();
  for (const auto& [level, value] : report.coverage)
    cov[format_level(level)] = value;
  json j{
      {"empirical_covariance", to_json_value(report.empirical_covariance)},
      {"target_covariance", to_json_value(report.target_covariance)},
      {"relative_operator_error", report.relative_operator_error},
      {"coverage", cov},
      {"mean_deviation_norm", report.mean_deviation_norm},
      {"rows", report.rows},
  };
  return j.dump(2);
}

std::string to_json(const LanReport& report) {
  json j{
      {"k", report.k},
      {"replicas", report.replicas},
      {"sigma_g", to_json_value(report.sigma_g)},
      {"zk_covariance", to_json_value(report.zk_covariance)},
      {"predicted_mean", report.predicted_mean},
      {"predicted_variance", report.predicted_variance},
      {"observed_mean", report.observed_mean},
      {"observed_variance", report.observed_variance},
      {"se_mean", report.se_mean},
      {"se_variance", report.se_variance},
      {"normalizer_cells", report.normalizer_cells},
      {"normalizer_fallbacks", report.normalizer_fallbacks},
  };
  return j.dump(2);
}

std::string to_json(const TiltSpec& spec) {
  json j{
      {"direction", to_json_value(spec.direction)},
      {"map", spec.map_kind == TiltSpec::MapKind::CanonicalNoise ? "canonical-noise" : "custom"},
      {"saturation",
       {{"kind", spec.saturation.is_identity() ? "identity" : "c3-blend"},
        {"linear_half_width", spec.saturation.linear_half_width()},
        {"blend_end", spec.saturation.blend_end()},
        {"saturation_level", spec.saturation.saturation_level()},
        {"blend_coefficients", spec.saturation.blend_coefficients()}}},
  };
  return j.dump(2);
}

std::string to_json(const ShiftTable& table) {
  json rows = json::array();
  for (const auto& row : table.rows) {
    rows.push_back(json{{"u_norm", row.u_norm},
                        {"u", to_json_value(row.u)},
                        {"x_star_u", to_json_value(row.x_star_u)},
                        {"ratio", row.ratio}});
  }
  json j{
      {"rows", rows},
      {"x_star_base", to_json_value(table.x_star_base)},
      {"w", to_json_value(table.w)},
      {"sigma_cross", to_json_value(table.sigma_cross)},
      {"noise_floor", table.noise_floor},
  };
  return j.dump(2);
}

}  // namespace ddsa
