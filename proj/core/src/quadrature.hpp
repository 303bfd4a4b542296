/*
 * Copyright 2026 The NAPS Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef NAPS_SRC_QUADRATURE_HPP_
#define NAPS_SRC_QUADRATURE_HPP_

#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "naps/dataset_io.hpp"
#include "naps/error.hpp"

namespace naps::internal {

// Adaptive 15-point Gauss-Kronrod integration on [a, b]; throws NumericError
// when the error estimate exceeds `abs_tol`.
template <typename F>
double Integrate(F&& f, double a, double b, double abs_tol,
                 const char* context) {
  if (a == b) return 0.0;
  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, /*max_depth=*/20, /*tolerance=*/1e-11, &error, &l1);
  if (!std::isfinite(value) || error > abs_tol) {
    throw NumericError(std::string(context) + ": quadrature on [" +
                       FormatDouble(a) + ", " + FormatDouble(b) +
                       "] did not converge (estimate " + FormatDouble(value) +
                       ", error " + FormatDouble(error) + ", L1 " +
                       FormatDouble(l1) + ")");
  }
  return value;
}

}  // namespace naps::internal

#endif  // NAPS_SRC_QUADRATURE_HPP_
