// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "everkin/kernels/batch.hpp"
#include "everkin/kernels/core.hpp"

namespace everkin::kernels::detail {

void forward_scalar(const double* p1, const double* p2, const double* p3,
                    std::size_t n, double k, double* alpha, double* theta) {
    for (std::size_t i = 0; i < n; ++i) {
        double q = forward_q(p1[i], p2[i], p3[i]);
        alpha[i] = k * std::sqrt(q);
        double den = (p1[i] + p2[i]) + p3[i];
        double th = forward_theta_raw(p1[i], p2[i], p3[i]);
        theta[i] = den > 0.0 ? th : 0.0;
    }
}

void inverse_scalar(const double* alpha, const double* theta, std::size_t n,
                    double k, double* p1, double* p2, double* p3) {
    for (std::size_t i = 0; i < n; ++i) {
        // wrap into [0, 360); floor rounding can land exactly on 360
        double t = theta[i];
        double w = t - 360.0 * std::floor(t / 360.0);
        w = w >= 360.0 ? w - 360.0 : w;
        inverse_point(alpha[i], w, k, p1[i], p2[i], p3[i]);
    }
}

}  // namespace everkin::kernels::detail
