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
#include "ddsa/distribution_map.hpp"

#include <numeric>
#include <sstream>

#include "ddsa/errors.hpp"

namespace ddsa {

namespace {

void check_psd_shape(const Matrix& cov, Eigen::Index n, const char* what) {
  if (cov.rows() != n || cov.cols() != n)
    throw InvalidArgument(std::string(what) + " covariance has wrong shape");
  if (!cov.isApprox(cov.transpose(), 1e-12))
    throw InvalidArgument(std::string(what) + " covariance must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  if (es.eigenvalues().minCoeff() < -1e-10 * (1.0 + cov.norm()))
    throw InvalidArgument(std::string(what) + " covariance must be positive semidefinite");
}

}  // namespace

DistributionMap DistributionMap::location_scale_gaussian(Matrix shift, Vector base_mean,
                                                         Matrix base_cov) {
  if (shift.rows() == 0 || shift.cols() == 0)
    throw InvalidArgument("location-scale shift matrix must be nonempty");
  if (base_mean.size() != shift.rows())
    throw InvalidArgument("base mean dimension must match shift rows");
  check_psd_shape(base_cov, shift.rows(), "base");

  DistributionMap m;
  m.kind_ = Kind::LocationScale;
  m.decision_dim_ = static_cast<int>(shift.cols());
  m.data_dim_ = static_cast<int>(shift.rows());
  m.shift_ = std::move(shift);
  m.base_mean_ = std::move(base_mean);
  m.base_cov_ = std::move(base_cov);
  m.cov_sqrt_ = symmetric_sqrt(m.base_cov_);
  return m;
}

DistributionMap DistributionMap::multiplayer_product(std::vector<PlayerBlock> blocks,
                                                     std::vector<int> decision_dims) {
  if (blocks.empty() || blocks.size() != decision_dims.size())
    throw InvalidArgument("multiplayer product needs one block per player");
  const int d = std::accumulate(decision_dims.begin(), decision_dims.end(), 0);

  DistributionMap m;
  m.kind_ = Kind::MultiplayerProduct;
  m.decision_dim_ = d;
  m.player_decision_dims_ = std::move(decision_dims);

  int data_dim = 0;
  int offset = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    const int di = m.player_decision_dims_[i];
    const auto ni = b.own_shift.rows();
    if (b.own_shift.cols() != di)
      throw InvalidArgument("player " + std::to_string(i) + " own shift has wrong decision width");
    if (b.other_shift.rows() != ni || b.other_shift.cols() != d - di)
      throw InvalidArgument("player " + std::to_string(i) + " other shift has wrong shape");
    if (b.base_mean.size() != ni)
      throw InvalidArgument("player " + std::to_string(i) + " base mean has wrong dimension");
    check_psd_shape(b.base_cov, ni, "player block");
    data_dim += static_cast<int>(ni);
    offset += di;
  }
  m.data_dim_ = data_dim;
  m.blocks_ = std::move(blocks);

  // Stacked mean-shift matrix: row block i places own_shift at player i's
  // decision columns and other_shift over the remaining columns in order.
  m.full_shift_ = Matrix::Zero(m.data_dim_, d);
  int row = 0;
  int col_own = 0;
  for (std::size_t i = 0; i < m.blocks_.size(); ++i) {
    const auto& b = m.blocks_[i];
    const int di = m.player_decision_dims_[i];
    const int ni = static_cast<int>(b.own_shift.rows());
    m.full_shift_.block(row, col_own, ni, di) = b.own_shift;
    int other_col = 0;
    for (int c = 0; c < d; ++c) {
      if (c >= col_own && c < col_own + di) continue;
      m.full_shift_.block(row, c, ni, 1) = b.other_shift.col(other_col++);
    }
    m.block_cov_sqrts_.push_back(symmetric_sqrt(b.base_cov));
    row += ni;
    col_own += di;
  }
  return m;
}

DistributionMap DistributionMap::custom(Custom spec) {
  if (!spec.sampler) throw InvalidArgument("custom distribution requires a sampler");
  if (spec.decision_dimension <= 0 || spec.data_dimension <= 0)
    throw InvalidArgument("custom distribution requires positive dimensions");
  DistributionMap m;
  m.kind_ = Kind::Custom;
  m.decision_dim_ = spec.decision_dimension;
  m.data_dim_ = spec.data_dimension;
  m.custom_ = std::move(spec);
  return m;
}

Vector DistributionMap::sample(const Vector& x, RandomStream& rng) const {
  if (static_cast<int>(x.size()) != decision_dim_)
    throw InvalidArgument("sample: decision has dimension " + std::to_string(x.size()) +
                          ", expected " + std::to_string(decision_dim_));
  switch (kind_) {
    case Kind::LocationScale: {
      Vector w(data_dim_);
      rng.fill_standard_normal(w);
      return shift_ * x + base_mean_ + cov_sqrt_ * w;
    }
    case Kind::MultiplayerProduct: {
      Vector z(data_dim_);
      const Vector mean_all = full_shift_ * x;
      int row = 0;
      for (std::size_t i = 0; i < blocks_.size(); ++i) {
        const int ni = static_cast<int>(blocks_[i].base_mean.size());
        Vector w(ni);
        rng.fill_standard_normal(w);
        z.segment(row, ni) =
            mean_all.segment(row, ni) + blocks_[i].base_mean + block_cov_sqrts_[i] * w;
        row += ni;
      }
      return z;
    }
    case Kind::Custom:
      return custom_.sampler(x, rng);
  }
  throw InvalidArgument("unknown distribution kind");
}

bool DistributionMap::has_analytic_mean() const {
  if (kind_ == Kind::Custom) return static_cast<bool>(custom_.mean);
  return true;
}

Vector DistributionMap::mean(const Vector& x) const {
  switch (kind_) {
    case Kind::LocationScale:
      return shift_ * x + base_mean_;
    case Kind::MultiplayerProduct: {
      Vector m = full_shift_ * x;
      int row = 0;
      for (const auto& b : blocks_) {
        m.segment(row, b.base_mean.size()) += b.base_mean;
        row += static_cast<int>(b.base_mean.size());
      }
      return m;
    }
    case Kind::Custom:
      if (!custom_.mean)
        throw UnsupportedMode("custom distribution has no analytic mean");
      return custom_.mean(x);
  }
  throw InvalidArgument("unknown distribution kind");
}

Matrix DistributionMap::mean_jacobian() const {
  switch (kind_) {
    case Kind::LocationScale:
      return shift_;
    case Kind::MultiplayerProduct:
      return full_shift_;
    case Kind::Custom:
      throw UnsupportedMode("custom distribution has no analytic mean jacobian");
  }
  throw InvalidArgument("unknown distribution kind");
}

Matrix DistributionMap::noise_covariance() const {
  switch (kind_) {
    case Kind::LocationScale:
      return base_cov_;
    case Kind::MultiplayerProduct: {
      Matrix cov = Matrix::Zero(data_dim_, data_dim_);
      int row = 0;
      for (const auto& b : blocks_) {
        const int ni = static_cast<int>(b.base_mean.size());
        cov.block(row, row, ni, ni) = b.base_cov;
        row += ni;
      }
      return cov;
    }
    case Kind::Custom:
      throw UnsupportedMode("custom distribution has no analytic noise covariance");
  }
  throw InvalidArgument("unknown distribution kind");
}

double DistributionMap::wasserstein_lipschitz() const {
  switch (kind_) {
    case Kind::LocationScale:
      return operator_norm(shift_);
    case Kind::MultiplayerProduct:
      return operator_norm(full_shift_);
    case Kind::Custom:
      return custom_.wasserstein_lipschitz;
  }
  throw InvalidArgument("unknown distribution kind");
}

bool DistributionMap::is_location_scale() const { return kind_ == Kind::LocationScale; }
bool DistributionMap::is_custom() const { return kind_ == Kind::Custom; }

std::string DistributionMap::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::LocationScale:
      os << "location-scale-gaussian(A=" << shift_.reshaped().transpose()
         << ",mean=" << base_mean_.transpose() << ",cov=" << base_cov_.reshaped().transpose()
         << ")";
      break;
    case Kind::MultiplayerProduct:
      os << "multiplayer-product(players=" << blocks_.size()
         << ",A=" << full_shift_.reshaped().transpose() << ")";
      break;
    case Kind::Custom:
      os << "custom(d=" << decision_dim_ << ",n=" << data_dim_ << ")";
      break;
  }
  return os.str();
}

}  // namespace ddsa
