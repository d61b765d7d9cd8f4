// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <vector>

#include "everkin/angles.hpp"
#include "everkin/errors.hpp"
#include "everkin/kernels/batch.hpp"

namespace everkin::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

Isa resolve_isa() {
    if (const char* env = std::getenv("EVERKIN_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
        if (std::strcmp(env, "avx2") == 0)
            return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
        // anything else, including "auto", falls through to probing
    }
    return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<int> g_forced{-1};

Isa current_isa() {
    int forced = g_forced.load(std::memory_order_relaxed);
    if (forced >= 0) return static_cast<Isa>(forced);
    static const Isa resolved = resolve_isa();
    return resolved;
}

void check_lengths(std::initializer_list<std::size_t> sizes) {
    auto it = sizes.begin();
    for (std::size_t s : sizes)
        if (s != *it) throw LengthMismatch("batch spans must have equal length");
}

}  // namespace

const char* isa_name(Isa isa) {
    return isa == Isa::avx2 ? "avx2" : "scalar";
}

Isa active_isa() { return current_isa(); }

void force_isa(Isa isa) {
    if (isa == Isa::avx2 && !cpu_has_avx2()) isa = Isa::scalar;
    g_forced.store(static_cast<int>(isa), std::memory_order_relaxed);
}

void forward_batch(std::span<const double> phi1, std::span<const double> phi2,
                   std::span<const double> phi3, double k,
                   std::span<double> alpha_out, std::span<double> theta_out) {
    check_lengths({phi1.size(), phi2.size(), phi3.size(), alpha_out.size(),
                   theta_out.size()});
    std::size_t n = phi1.size();
#if defined(__x86_64__) || defined(_M_X64)
    if (current_isa() == Isa::avx2) {
        detail::forward_avx2(phi1.data(), phi2.data(), phi3.data(), n, k,
                             alpha_out.data(), theta_out.data());
        return;
    }
#endif
    detail::forward_scalar(phi1.data(), phi2.data(), phi3.data(), n, k,
                           alpha_out.data(), theta_out.data());
}

void inverse_batch(std::span<const double> alpha, std::span<const double> theta,
                   double k, std::span<double> phi1_out, std::span<double> phi2_out,
                   std::span<double> phi3_out) {
    check_lengths({alpha.size(), theta.size(), phi1_out.size(), phi2_out.size(),
                   phi3_out.size()});
    std::size_t n = alpha.size();
#if defined(__x86_64__) || defined(_M_X64)
    if (current_isa() == Isa::avx2) {
        detail::inverse_avx2(alpha.data(), theta.data(), n, k, phi1_out.data(),
                             phi2_out.data(), phi3_out.data());
        return;
    }
#endif
    detail::inverse_scalar(alpha.data(), theta.data(), n, k, phi1_out.data(),
                           phi2_out.data(), phi3_out.data());
}

double roundtrip_max_error(std::span<const double> alpha,
                           std::span<const double> theta, double k) {
    check_lengths({alpha.size(), theta.size()});
    std::size_t n = alpha.size();
    std::vector<double> p1(n), p2(n), p3(n), a2(n), t2(n);
    inverse_batch(alpha, theta, k, p1, p2, p3);
    forward_batch(p1, p2, p3, k, a2, t2);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double da = std::abs(a2[i] - alpha[i]);
        if (da > worst) worst = da;
        if (alpha[i] > 0.0) {
            double dt = std::abs(wrap_diff(t2[i], theta[i]));
            if (dt > worst) worst = dt;
        }
    }
    return worst;
}

}  // namespace everkin::kernels
