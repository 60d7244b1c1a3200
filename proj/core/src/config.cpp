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
#include "ddsa/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ddsa/errors.hpp"

namespace ddsa {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream is(s);
  while (std::getline(is, part, sep)) parts.push_back(trim(part));
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

double parse_double(const std::string& raw, const std::string& key, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(raw, &used);
    if (used != raw.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError("expected a real number, got '" + raw + "'", key, line);
  }
}

}  // namespace

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_string(buffer.str(), path);
}

Config Config::from_string(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream is(text);
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected 'key = value'", line, number);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line, number);
    cfg.values_[key] = value;
    cfg.lines_[key] = number;
  }
  return cfg;
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

void Config::set(const std::string& key, const std::string& value) {
  values_[key] = value;
  lines_[key] = 0;
}

int Config::line_of(const std::string& key) const {
  auto it = lines_.find(key);
  return it == lines_.end() ? 0 : it->second;
}

std::string Config::get_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ParseError("missing required key", key, 0);
  return it->second;
}

double Config::get_double(const std::string& key) const {
  return parse_double(get_string(key), key, line_of(key));
}

std::int64_t Config::get_int(const std::string& key) const {
  const std::string raw = get_string(key);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  if (ec != std::errc() || ptr != raw.data() + raw.size())
    throw ParseError("expected an integer, got '" + raw + "'", key, line_of(key));
  return v;
}

std::uint64_t Config::get_u64(const std::string& key) const {
  const std::string raw = get_string(key);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  if (ec != std::errc() || ptr != raw.data() + raw.size())
    throw ParseError("expected an unsigned integer, got '" + raw + "'", key, line_of(key));
  return v;
}

Vector Config::get_vector(const std::string& key) const {
  const auto parts = split(get_string(key), ',');
  if (parts.empty()) throw ParseError("expected a comma-separated vector", key, line_of(key));
  Vector v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = parse_double(parts[i], key, line_of(key));
  return v;
}

Matrix Config::get_matrix(const std::string& key) const {
  const auto rows = split(get_string(key), ';');
  if (rows.empty()) throw ParseError("expected ';'-separated matrix rows", key, line_of(key));
  std::vector<std::vector<std::string>> cells;
  std::size_t cols = 0;
  for (const auto& row : rows) {
    cells.push_back(split(row, ','));
    if (cols == 0) cols = cells.back().size();
    if (cells.back().size() != cols)
      throw ParseError("matrix rows have inconsistent widths", key, line_of(key));
  }
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < cells.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          parse_double(cells[r][c], key, line_of(key));
  return m;
}

std::vector<std::int64_t> Config::get_int_list(const std::string& key) const {
  const auto parts = split(get_string(key), ',');
  std::vector<std::int64_t> out;
  for (const auto& part : parts) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size())
      throw ParseError("expected an integer list, got '" + part + "'", key, line_of(key));
    out.push_back(v);
  }
  return out;
}

std::string Config::get_string_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}
double Config::get_double_or(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}
std::int64_t Config::get_int_or(const std::string& key, std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}
std::uint64_t Config::get_u64_or(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? get_u64(key) : fallback;
}

namespace {

FeasibleSet set_from_config(const Config& cfg, int dimension) {
  const std::string kind = cfg.get_string_or("problem.set", "whole-space");
  if (kind == "whole-space") return FeasibleSet::whole_space(dimension);
  if (kind == "box")
    return FeasibleSet::box(cfg.get_vector("problem.box.lower"),
                            cfg.get_vector("problem.box.upper"));
  if (kind == "ball")
    return FeasibleSet::ball(cfg.get_vector("problem.ball.center"),
                             cfg.get_double("problem.ball.radius"));
  throw ParseError("unknown feasible set kind '" + kind + "'", "problem.set", 0);
}

std::optional<DeclaredConstants> constants_from_config(const Config& cfg) {
  if (!cfg.has("constants.alpha") && !cfg.has("constants.beta") && !cfg.has("constants.gamma"))
    return std::nullopt;
  DeclaredConstants c;
  c.alpha = cfg.get_double("constants.alpha");
  c.beta = cfg.get_double("constants.beta");
  c.gamma = cfg.get_double("constants.gamma");
  return c;
}

DistributionMap::PlayerBlock player_block_from_config(const Config& cfg, const std::string& prefix) {
  DistributionMap::PlayerBlock b;
  b.own_shift = cfg.get_matrix(prefix + ".A-own");
  b.other_shift = cfg.get_matrix(prefix + ".A-other");
  b.base_mean = cfg.get_vector(prefix + ".base-mean");
  b.base_cov = cfg.get_matrix(prefix + ".base-cov");
  return b;
}

DecisionMap::PlayerLoss player_loss_from_config(const Config& cfg, const std::string& prefix) {
  DecisionMap::PlayerLoss l;
  l.own_hess = cfg.get_matrix(prefix + ".own-hess");
  l.cross_hess = cfg.get_matrix(prefix + ".cross-hess");
  l.data_hess = cfg.get_matrix(prefix + ".data-hess");
  l.offset = cfg.get_vector(prefix + ".offset");
  return l;
}

}  // namespace

Problem problem_from_config(const Config& cfg) {
  const std::string family = cfg.get_string("problem.family");

  if (family == "swap-gaussian") {
    const double rho = cfg.get_double("problem.rho");
    if (!(rho >= 0.0 && rho < 1.0))
      throw ParseError("swap-gaussian requires rho in [0, 1)", "problem.rho", 0);
    Matrix swap(2, 2);
    swap << 0, 1, 1, 0;
    Matrix cov = cfg.has("problem.base-cov") ? cfg.get_matrix("problem.base-cov")
                                             : Matrix(Matrix::Identity(2, 2));
    auto dist = DistributionMap::location_scale_gaussian(rho * swap, Vector::Zero(2), cov);
    auto constants = constants_from_config(cfg);
    if (!constants) constants = DeclaredConstants{1.0, 1.0, rho};
    return Problem(set_from_config(cfg, 2), std::move(dist), DecisionMap::quadratic_tracking(2),
                   constants);
  }

  if (family == "location-scale") {
    const Matrix a = cfg.get_matrix("problem.A");
    const int data_dim = static_cast<int>(a.rows());
    const int decision_dim = static_cast<int>(a.cols());
    Vector mean = cfg.has("problem.base-mean") ? cfg.get_vector("problem.base-mean")
                                               : Vector(Vector::Zero(data_dim));
    // base covariance defaults to the identity and is exposed here
    Matrix cov = cfg.has("problem.base-cov") ? cfg.get_matrix("problem.base-cov")
                                             : Matrix(Matrix::Identity(data_dim, data_dim));
    auto dist = DistributionMap::location_scale_gaussian(a, std::move(mean), std::move(cov));

    const std::string decision = cfg.get_string_or("problem.decision", "quadratic-tracking");
    DecisionMap g = DecisionMap::quadratic_tracking(decision_dim);
    if (decision == "linear") {
      g = DecisionMap::linear(cfg.get_matrix("problem.M"), cfg.get_matrix("problem.N"),
                              cfg.get_vector("problem.b"));
    } else if (decision != "quadratic-tracking") {
      throw ParseError("unknown decision map '" + decision + "'", "problem.decision", 0);
    }
    return Problem(set_from_config(cfg, decision_dim), std::move(dist), std::move(g),
                   constants_from_config(cfg));
  }

  if (family == "multiplayer") {
    const std::int64_t players = cfg.get_int_or("problem.players", 2);
    std::vector<DistributionMap::PlayerBlock> blocks;
    std::vector<DecisionMap::PlayerLoss> losses;
    std::vector<int> decision_dims, data_dims;
    for (std::int64_t i = 1; i <= players; ++i) {
      const std::string prefix = "problem.player" + std::to_string(i);
      blocks.push_back(player_block_from_config(cfg, prefix));
      losses.push_back(player_loss_from_config(cfg, prefix));
      decision_dims.push_back(static_cast<int>(blocks.back().own_shift.cols()));
      data_dims.push_back(static_cast<int>(blocks.back().own_shift.rows()));
    }
    auto dist = DistributionMap::multiplayer_product(std::move(blocks), decision_dims);
    auto g = DecisionMap::multiplayer_quadratic(std::move(losses), decision_dims, data_dims);
    const int d = g.decision_dimension();
    return Problem(set_from_config(cfg, d), std::move(dist), std::move(g),
                   constants_from_config(cfg));
  }

  throw ParseError("unknown problem family '" + family + "'", "problem.family", 0);
}

StepSchedule schedule_from_config(const Config& cfg) {
  return StepSchedule(cfg.get_double_or("run.eta0", 1.0), cfg.get_double_or("run.nu", 0.75));
}

}  // namespace ddsa
