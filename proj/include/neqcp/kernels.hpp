#pragma once

// Batched inner loops of the polarization-tensor integrals.
//
// Each kernel has a scalar reference and an AVX2 variant. Both are compiled
// with floating-point contraction disabled and perform the same IEEE
// operations in the same order, so the variants agree bit for bit; the
// equivalence tests rely on that. The variant is chosen once at startup from
// CPUID and may be pinned with NEQCP_SIMD=scalar|avx2.

#include <cstddef>
#include <span>
#include <string_view>

namespace neqcp::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);
bool isa_supported(Isa isa);

/// Variant selected for this process.
Isa active_isa();

// Brackets of the thermal u-integrals on the imaginary frequency axis,
// omega = i xi with xi > 0, in any consistent wavenumber unit:
//   b00(u) = 1 - Re S(u) / pt
//   bpi(u) = -xi^2 - pt Re[(2u + i xi)^2 / S(u)]
// with S(u)^2 = pt^2 - 4u^2 - 4iu xi and pt^2 = eps2 + xi^2, eps2 = (vF k / c)^2.
// When eps2 is small against |xi - 2iu|^2 the brackets are evaluated in a
// cancellation-free rearrangement.
struct MatsubaraParams {
    double xi;
    double xi2;
    double pt;
    double eps2;
    double sx;  // x / (1 + sqrt(1 + x)), x = eps2 / xi^2
    static MatsubaraParams make(double xi, double eps2);
};

void matsubara_brackets_scalar(const MatsubaraParams& p, std::span<const double> u,
                               std::span<double> b00, std::span<double> bpi);
void matsubara_brackets_avx2(const MatsubaraParams& p, std::span<const double> u,
                             std::span<double> b00, std::span<double> bpi);

/// Dispatches to the active variant.
void matsubara_brackets(const MatsubaraParams& p, std::span<const double> u,
                        std::span<double> b00, std::span<double> bpi);

// Fermi weights 1 / (exp(beta u) + 1), scalar only (no vector exp).
void fermi_weights(double beta, std::span<const double> u, std::span<double> out);

}  // namespace neqcp::kernels
