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
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ddsa/linalg.hpp"
#include "ddsa/random.hpp"

namespace ddsa {

/// Decision-indexed data distribution D(x).
///
/// Built-in families are location-scale Gaussians: a draw at decision x is
/// shift(x) + base_mean + S w with w standard normal and S the symmetric PSD
/// square root of the base covariance. Raw-value consumption per draw is
/// fixed: 2*ceil(n/2) uniforms for an n-dimensional block (see RandomStream),
/// so replays are bit-deterministic.
class DistributionMap {
 public:
  struct LocationScaleGaussian {
    Matrix shift;      // A: data_dim x decision_dim
    Vector base_mean;  // mean of D_0
    Matrix base_cov;   // covariance of D_0, symmetric PSD
  };

  /// One player's data block: z_i = own_shift x_i + other_shift x_{-i} +
  /// base_mean + noise, sampled independently across blocks.
  struct PlayerBlock {
    Matrix own_shift;    // A_i: n_i x d_i
    Matrix other_shift;  // A_{-i}: n_i x (d - d_i)
    Vector base_mean;
    Matrix base_cov;
  };

  struct Custom {
    std::function<Vector(const Vector& x, RandomStream&)> sampler;
    std::function<Vector(const Vector& x)> mean;  // may be empty
    int decision_dimension = 0;
    int data_dimension = 0;
    double wasserstein_lipschitz = 0.0;  // declared, not certified
  };

  static DistributionMap location_scale_gaussian(Matrix shift, Vector base_mean, Matrix base_cov);
  static DistributionMap multiplayer_product(std::vector<PlayerBlock> blocks,
                                             std::vector<int> decision_dims);
  static DistributionMap custom(Custom spec);

  int decision_dimension() const { return decision_dim_; }
  int data_dimension() const { return data_dim_; }

  Vector sample(const Vector& x, RandomStream& rng) const;

  bool has_analytic_mean() const;
  /// Mean of D(x); throws UnsupportedMode when no closed form is available.
  Vector mean(const Vector& x) const;

  /// Jacobian of x -> mean(D(x)); the full shift matrix for built-ins.
  Matrix mean_jacobian() const;

  /// Covariance of D(x) (decision-independent for built-ins).
  Matrix noise_covariance() const;

  /// W_1 Lipschitz constant gamma: operator norm of the shift for built-ins,
  /// the declared value for custom families.
  double wasserstein_lipschitz() const;

  bool is_location_scale() const;
  bool is_custom() const;
  const std::vector<int>& player_decision_dims() const { return player_decision_dims_; }
  const std::vector<PlayerBlock>& player_blocks() const { return blocks_; }

  std::string describe() const;

 private:
  DistributionMap() = default;

  enum class Kind { LocationScale, MultiplayerProduct, Custom } kind_ = Kind::LocationScale;
  int decision_dim_ = 0;
  int data_dim_ = 0;

  // location-scale
  Matrix shift_;
  Vector base_mean_;
  Matrix base_cov_;
  Matrix cov_sqrt_;

  // multiplayer
  std::vector<PlayerBlock> blocks_;
  std::vector<int> player_decision_dims_;
  std::vector<Matrix> block_cov_sqrts_;
  Matrix full_shift_;  // stacked map x -> mean shift, data_dim x decision_dim

  Custom custom_;
};

}  // namespace ddsa
