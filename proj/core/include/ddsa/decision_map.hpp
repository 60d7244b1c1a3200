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
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ddsa/linalg.hpp"

namespace ddsa {

/// Deterministic operator G(x, z) mapping a decision and a data point to a
/// direction of motion. All built-in kinds are affine in (x, z), which gives
/// closed forms for mean fields, Jacobians and equilibria; custom handles
/// fall back to the sampling paths.
class DecisionMap {
 public:
  /// Per-player quadratic loss gradient:
  /// grad_i = own_hess x_i + cross_hess x_{-i} + data_hess z_i + offset.
  struct PlayerLoss {
    Matrix own_hess;    // d_i x d_i
    Matrix cross_hess;  // d_i x (d - d_i)
    Matrix data_hess;   // d_i x n_i
    Vector offset;
  };

  struct Custom {
    std::function<Vector(const Vector& x, const Vector& z)> eval;
    int decision_dimension = 0;
    int data_dimension = 0;
    double lipschitz_x = 0.0;          // declared L-bar
    double lipschitz_z = 0.0;          // declared beta
    double strong_monotonicity = 0.0;  // declared alpha
  };

  /// G(x, z) = x - z.
  static DecisionMap quadratic_tracking(int dimension);
  /// G(x, z) = M x + N z + b.
  static DecisionMap linear(Matrix m, Matrix n, Vector b);
  static DecisionMap multiplayer_quadratic(std::vector<PlayerLoss> players,
                                           std::vector<int> decision_dims,
                                           std::vector<int> data_dims);
  static DecisionMap custom(Custom spec);

  int decision_dimension() const { return decision_dim_; }
  int data_dimension() const { return data_dim_; }

  Vector eval(const Vector& x, const Vector& z) const;

  bool is_affine() const { return kind_ != Kind::Custom; }
  const Matrix& x_jacobian() const;  // dG/dx, constant for affine kinds
  const Matrix& z_jacobian() const;  // dG/dz
  const Vector& affine_offset() const;

  /// L-bar: Lipschitz constant of G in x (operator norm of dG/dx for affine
  /// kinds, the declared value for custom).
  double lipschitz_x() const;
  /// beta: Lipschitz constant of G in z.
  double lipschitz_z() const;
  /// alpha: strong monotonicity of G_x(.) (min eigenvalue of sym dG/dx).
  double strong_monotonicity() const;

  std::string describe() const;

 private:
  DecisionMap() = default;

  enum class Kind { QuadraticTracking, Linear, MultiplayerQuadratic, Custom } kind_ =
      Kind::QuadraticTracking;
  int decision_dim_ = 0;
  int data_dim_ = 0;
  Matrix jx_, jz_;
  Vector offset_;
  Custom custom_;
};

}  // namespace ddsa
