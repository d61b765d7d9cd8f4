// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>

namespace everkin::kernels {

enum class Isa { scalar, avx2 };

const char* isa_name(Isa isa);

// ISA actually used by the batch entry points. Resolved once, on first
// use: the EVERKIN_SIMD environment variable ("scalar", "avx2", "auto")
// wins if set, otherwise the CPU is probed. Requesting avx2 on a CPU
// without it falls back to scalar.
Isa active_isa();

// Test hook; overrides the resolved ISA (avx2 still requires CPU support).
void force_isa(Isa isa);

// Batch forward map: (phi1,phi2,phi3) -> (alpha, theta), all angles in
// degrees. Elements must individually satisfy the motor-set rules
// (non-negative, at most two nonzero); this is not re-checked here. Rows
// with all motors zero produce alpha = 0, theta = 0. All spans must have
// equal length (LengthMismatch otherwise).
void forward_batch(std::span<const double> phi1, std::span<const double> phi2,
                   std::span<const double> phi3, double k,
                   std::span<double> alpha_out, std::span<double> theta_out);

// Batch inverse map: (alpha, theta) -> (phi1,phi2,phi3). alpha must be
// >= 0; theta is wrapped into [0, 360) internally.
void inverse_batch(std::span<const double> alpha, std::span<const double> theta,
                   double k, std::span<double> phi1_out, std::span<double> phi2_out,
                   std::span<double> phi3_out);

// Largest absolute round-trip defect over a batch of poses: runs
// inverse_batch then forward_batch and compares, using the shortest wrapped
// difference for theta. Rows with alpha == 0 compare alpha only.
double roundtrip_max_error(std::span<const double> alpha,
                           std::span<const double> theta, double k);

// Raw kernel entry points, exposed for the equivalence tests. The
// dispatched wrappers above validate lengths and then call one of these.
namespace detail {
void forward_scalar(const double* p1, const double* p2, const double* p3,
                    std::size_t n, double k, double* alpha, double* theta);
void inverse_scalar(const double* alpha, const double* theta, std::size_t n,
                    double k, double* p1, double* p2, double* p3);
#if defined(__x86_64__) || defined(_M_X64)
void forward_avx2(const double* p1, const double* p2, const double* p3,
                  std::size_t n, double k, double* alpha, double* theta);
void inverse_avx2(const double* alpha, const double* theta, std::size_t n,
                  double k, double* p1, double* p2, double* p3);
#endif
}  // namespace detail

}  // namespace everkin::kernels
