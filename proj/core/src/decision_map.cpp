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
#include "ddsa/decision_map.hpp"

#include <numeric>
#include <sstream>

#include "ddsa/errors.hpp"

namespace ddsa {

DecisionMap DecisionMap::quadratic_tracking(int dimension) {
  if (dimension <= 0) throw InvalidArgument("decision dimension must be positive");
  DecisionMap g;
  g.kind_ = Kind::QuadraticTracking;
  g.decision_dim_ = dimension;
  g.data_dim_ = dimension;
  g.jx_ = Matrix::Identity(dimension, dimension);
  g.jz_ = -Matrix::Identity(dimension, dimension);
  g.offset_ = Vector::Zero(dimension);
  return g;
}

DecisionMap DecisionMap::linear(Matrix m, Matrix n, Vector b) {
  if (m.rows() == 0 || m.rows() != m.cols())
    throw InvalidArgument("linear decision map requires a square M");
  if (n.rows() != m.rows()) throw InvalidArgument("N must have as many rows as M");
  if (b.size() != m.rows()) throw InvalidArgument("offset must match M rows");
  DecisionMap g;
  g.kind_ = Kind::Linear;
  g.decision_dim_ = static_cast<int>(m.rows());
  g.data_dim_ = static_cast<int>(n.cols());
  g.jx_ = std::move(m);
  g.jz_ = std::move(n);
  g.offset_ = std::move(b);
  return g;
}

DecisionMap DecisionMap::multiplayer_quadratic(std::vector<PlayerLoss> players,
                                               std::vector<int> decision_dims,
                                               std::vector<int> data_dims) {
  if (players.empty() || players.size() != decision_dims.size() ||
      players.size() != data_dims.size())
    throw InvalidArgument("multiplayer decision map needs matching player lists");
  const int d = std::accumulate(decision_dims.begin(), decision_dims.end(), 0);
  const int n = std::accumulate(data_dims.begin(), data_dims.end(), 0);

  DecisionMap g;
  g.kind_ = Kind::MultiplayerQuadratic;
  g.decision_dim_ = d;
  g.data_dim_ = n;
  g.jx_ = Matrix::Zero(d, d);
  g.jz_ = Matrix::Zero(d, n);
  g.offset_ = Vector::Zero(d);

  int row = 0, col_own = 0, col_z = 0;
  for (std::size_t i = 0; i < players.size(); ++i) {
    const auto& p = players[i];
    const int di = decision_dims[i];
    const int ni = data_dims[i];
    if (p.own_hess.rows() != di || p.own_hess.cols() != di)
      throw InvalidArgument("player " + std::to_string(i) + " own hessian has wrong shape");
    if (p.cross_hess.rows() != di || p.cross_hess.cols() != d - di)
      throw InvalidArgument("player " + std::to_string(i) + " cross hessian has wrong shape");
    if (p.data_hess.rows() != di || p.data_hess.cols() != ni)
      throw InvalidArgument("player " + std::to_string(i) + " data hessian has wrong shape");
    if (p.offset.size() != di)
      throw InvalidArgument("player " + std::to_string(i) + " offset has wrong dimension");

    g.jx_.block(row, col_own, di, di) = p.own_hess;
    int other_col = 0;
    for (int c = 0; c < d; ++c) {
      if (c >= col_own && c < col_own + di) continue;
      g.jx_.block(row, c, di, 1) = p.cross_hess.col(other_col++);
    }
    g.jz_.block(row, col_z, di, ni) = p.data_hess;
    g.offset_.segment(row, di) = p.offset;
    row += di;
    col_own += di;
    col_z += ni;
  }
  return g;
}

DecisionMap DecisionMap::custom(Custom spec) {
  if (!spec.eval) throw InvalidArgument("custom decision map requires an evaluation handle");
  if (spec.decision_dimension <= 0 || spec.data_dimension <= 0)
    throw InvalidArgument("custom decision map requires positive dimensions");
  DecisionMap g;
  g.kind_ = Kind::Custom;
  g.decision_dim_ = spec.decision_dimension;
  g.data_dim_ = spec.data_dimension;
  g.custom_ = std::move(spec);
  return g;
}

Vector DecisionMap::eval(const Vector& x, const Vector& z) const {
  if (static_cast<int>(x.size()) != decision_dim_ || static_cast<int>(z.size()) != data_dim_)
    throw InvalidArgument("decision map evaluation dimension mismatch");
  if (kind_ == Kind::Custom) return custom_.eval(x, z);
  return jx_ * x + jz_ * z + offset_;
}

const Matrix& DecisionMap::x_jacobian() const {
  if (!is_affine()) throw UnsupportedMode("custom decision map has no constant x-jacobian");
  return jx_;
}

const Matrix& DecisionMap::z_jacobian() const {
  if (!is_affine()) throw UnsupportedMode("custom decision map has no constant z-jacobian");
  return jz_;
}

const Vector& DecisionMap::affine_offset() const {
  if (!is_affine()) throw UnsupportedMode("custom decision map has no affine offset");
  return offset_;
}

double DecisionMap::lipschitz_x() const {
  if (kind_ == Kind::QuadraticTracking) return 1.0;
  if (kind_ == Kind::Custom) return custom_.lipschitz_x;
  return operator_norm(jx_);
}

double DecisionMap::lipschitz_z() const {
  if (kind_ == Kind::QuadraticTracking) return 1.0;
  if (kind_ == Kind::Custom) return custom_.lipschitz_z;
  return operator_norm(jz_);
}

double DecisionMap::strong_monotonicity() const {
  if (kind_ == Kind::QuadraticTracking) return 1.0;
  if (kind_ == Kind::Custom) return custom_.strong_monotonicity;
  return min_symmetric_eigenvalue(jx_);
}

std::string DecisionMap::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::QuadraticTracking:
      os << "quadratic-tracking(d=" << decision_dim_ << ")";
      break;
    case Kind::Linear:
      os << "linear(M=" << jx_.reshaped().transpose() << ",N=" << jz_.reshaped().transpose()
         << ",b=" << offset_.transpose() << ")";
      break;
    case Kind::MultiplayerQuadratic:
      os << "multiplayer-quadratic(Jx=" << jx_.reshaped().transpose()
         << ",Jz=" << jz_.reshaped().transpose() << ")";
      break;
    case Kind::Custom:
      os << "custom(d=" << decision_dim_ << ",n=" << data_dim_ << ")";
      break;
  }
  return os.str();
}

}  // namespace ddsa
