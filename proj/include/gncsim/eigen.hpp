/*
 * Copyright 2026 The gncsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace gncsim {

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Dense symmetric matrix, full row-major storage.
class SymMatrix {
 public:
  explicit SymMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {
    if (n == 0) {
      throw std::invalid_argument("SymMatrix: empty matrix");
    }
  }

  std::size_t size() const { return n_; }
  double& at(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double at(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  double frobenius() const {
    double acc = 0.0;
    for (const double x : a_) {
      acc += x * x;
    }
    return std::sqrt(acc);
  }

  double off_diagonal_frobenius() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i + 1; j < n_; ++j) {
        acc += at(i, j) * at(i, j);
      }
    }
    return std::sqrt(2.0 * acc);
  }

 private:
  std::size_t n_;
  std::vector<double> a_;
};

struct JacobiOptions {
  int max_sweeps = 100;
  double tol = 1e-12;  // off-diagonal Frobenius threshold, relative to |A|_F
};

/// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps, ascending.
/// The rotation order is fixed (upper triangle, row by row), so the result
/// is deterministic. Throws NumericalError when the off-diagonal mass does
/// not fall below tol * |A|_F within max_sweeps sweeps.
inline std::vector<double> jacobi_eigenvalues(SymMatrix a,
                                              JacobiOptions opts = {}) {
  const std::size_t n = a.size();
  const double threshold = opts.tol * a.frobenius();

  bool converged = false;
  for (int sweep = 0; sweep < opts.max_sweeps && !converged; ++sweep) {
    if (a.off_diagonal_frobenius() <= threshold) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a.at(p, q);
        if (apq == 0.0) {
          continue;
        }
        const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e12) {
          t = 0.5 / theta;  // series limit, avoids overflow in theta^2
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
          if (theta < 0.0) {
            t = -t;
          }
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        const double app = a.at(p, p);
        const double aqq = a.at(q, q);
        a.at(p, p) = app - t * apq;
        a.at(q, q) = aqq + t * apq;
        a.at(p, q) = 0.0;
        a.at(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) {
            continue;
          }
          const double arp = a.at(r, p);
          const double arq = a.at(r, q);
          a.at(r, p) = c * arp - s * arq;
          a.at(p, r) = a.at(r, p);
          a.at(r, q) = s * arp + c * arq;
          a.at(q, r) = a.at(r, q);
        }
      }
    }
  }
  if (!converged && a.off_diagonal_frobenius() > threshold) {
    throw NumericalError("jacobi_eigenvalues: no convergence within sweep limit");
  }

  std::vector<double> eigs(n);
  for (std::size_t i = 0; i < n; ++i) {
    eigs[i] = a.at(i, i);
  }
  std::sort(eigs.begin(), eigs.end());
  return eigs;
}

/// Eigenvalues sorted ascending, as produced by the solvers above.
struct EigenResult {
  std::vector<double> eigenvalues;

  double max() const { return eigenvalues.back(); }
  /// PSD slack: Gram spectra may dip below zero only by rounding.
  double psd_slack() const { return 1e-10 * std::max(max(), 0.0); }
};

/// lambda_max / lambda_min* with lambda_min* the second-smallest eigenvalue.
/// Eigenvalues in [-slack, 0) are clamped to zero first; a lambda_min* that
/// is not meaningfully positive yields nullopt (a degenerate spectrum is
/// reported as missing, never as infinity).
inline std::optional<double> condition_number(const EigenResult& eigs) {
  const auto& ev = eigs.eigenvalues;
  if (ev.size() < 3) {
    throw std::invalid_argument(
        "condition_number: need at least 3 eigenvalues");
  }
  const double slack = eigs.psd_slack();
  if (ev.front() < -slack) {
    throw NumericalError("condition_number: spectrum is not PSD within slack");
  }
  const double lmin2 = ev[1] < 0.0 ? 0.0 : ev[1];
  if (lmin2 <= slack) {
    return std::nullopt;
  }
  return ev.back() / lmin2;
}

}  // namespace gncsim
