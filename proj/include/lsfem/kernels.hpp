// Copyright (c) 2026 The lsfem authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lsfem {

// Regularized interface kernels. All of them replace sharp interface
// indicators by smooth profiles of thickness eps; the Gaussian variant is
// used so that the mollified Heaviside, its derivative and the sign function
// are consistent with each other:
//
//   heaviside_eps(phi)  = (1 + erf(pi*phi/(3 eps))) / 2
//   delta_eps(phi)      = d/dphi heaviside_eps(phi)
//   sign_eps(phi)       = 2 heaviside_eps(phi) - 1
//
// delta_eps has unit integral over the real line for every eps > 0.

template <typename Scalar>
Scalar heaviside_eps(Scalar phi, Scalar eps) {
  if (!(eps > Scalar(0)))
    throw std::invalid_argument("heaviside_eps: eps must be positive");
  const Scalar a = std::numbers::pi_v<Scalar> * phi / (Scalar(3) * eps);
  return Scalar(0.5) * (Scalar(1) + std::erf(a));
}

template <typename Scalar>
Scalar delta_eps(Scalar phi, Scalar eps) {
  if (!(eps > Scalar(0)))
    throw std::invalid_argument("delta_eps: eps must be positive");
  const Scalar a = std::numbers::pi_v<Scalar> * phi / (Scalar(3) * eps);
  return std::sqrt(std::numbers::pi_v<Scalar> / Scalar(9)) / eps *
         std::exp(-a * a);
}

template <typename Scalar>
Scalar sign_eps(Scalar phi, Scalar eps) {
  return Scalar(2) * heaviside_eps(phi, eps) - Scalar(1);
}

// Smooth window that equals ~1 within |phi| < m*eps and decays to 0 outside.
// Used to confine extrapolated quantities to a narrow band around the
// interface. The window must be at least as wide as the delta kernel it
// multiplies, hence m >= 2.
template <typename Scalar>
Scalar damping(Scalar phi, Scalar eps, Scalar m) {
  if (!(m >= Scalar(2)))
    throw std::invalid_argument("damping: band multiplier m must be >= 2");
  return heaviside_eps(phi + m * eps, eps) - heaviside_eps(phi - m * eps, eps);
}

}  // namespace lsfem
