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

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace ddsa {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Largest singular value.
double operator_norm(const Matrix& m);

/// Smallest eigenvalue of the symmetric part (m + m^T)/2.
double min_symmetric_eigenvalue(const Matrix& m);

/// Smallest real part over the (possibly complex) spectrum of m.
double min_real_eigenvalue_part(const Matrix& m);

/// 2-norm condition number via SVD; +inf when the smallest singular value is 0.
double condition_number(const Matrix& m);

/// Symmetric PSD square root. Eigenvalues below zero are clamped; the
/// magnitude of the most negative clamped eigenvalue is written to *floored
/// when non-null.
Matrix symmetric_sqrt(const Matrix& m, double* floored = nullptr);

/// Symmetrize and clamp negative eigenvalues to zero.
Matrix project_psd(const Matrix& m, double* floored = nullptr);

/// FNV-1a over raw bytes, the hash used for problem identities and cache keys.
std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a(const std::string& s, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace ddsa
