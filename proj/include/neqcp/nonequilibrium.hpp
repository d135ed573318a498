#pragma once

// Nonequilibrium force on a particle held with the environment at T_E above
// graphene at T_g:
//
//   F_neq = F~(a, T_E; T_g)
//         + (2 hbar alpha0 / (pi c^2)) int_0^inf d omega Theta(omega, T_E, T_g)
//           int_{omega/c}^inf k dk e^{-2 a q} Im[A_TM R_TM + A_TE R_TE]
//
// with q = sqrt(k^2 - omega^2 / c^2) and the reflection coefficients taken
// on the real axis at T_g. Only evanescent waves enter the second term.
// The cross-check rebuilds the same force from the half-sum of two Matsubara
// forces plus a real-axis correction that includes propagating waves.

#include <optional>
#include <string>

#include "neqcp/equilibrium.hpp"

namespace neqcp {

/// Bose occupation difference n(omega, T_E) - n(omega, T_g). A zero
/// temperature has zero occupation.
double theta(double omega, double T_E, double T_g, const PhysicalConstants& pc = {});

struct AngularFactors {
    double tm, te;
};

/// A_TM = 2 k^2 c^2 - omega^2, A_TE = omega^2.
AngularFactors angular_factors(double omega, double k_perp, const PhysicalConstants& pc = {});

/// 40 kB max(T_E, T_g) / hbar. Throws DomainError above the Dirac-model
/// ceiling of 3 eV.
double omega_cutoff(double T_E, double T_g, const PhysicalConstants& pc = {});

struct NoneqBreakdown {
    double f_tilde_TE_Tg = 0.0;     // N
    double delta_evanescent = 0.0;  // N
    // filled by cross_check_representation
    std::optional<double> half_difference;  // real-axis form
    std::optional<double> delta_F;
    std::optional<double> F_term;
};

struct NoneqResult {
    ForceResult total;  // parts: "f_tilde", "delta_evanescent"
    NoneqBreakdown breakdown;
};

/// Second term of F_neq alone. Exactly zero when T_E == T_g.
ForceResult noneq_delta(double a, double T_E, double T_g, const NanoparticleSpec& spec,
                        const ForceOptions& opt = {}, const PhysicalConstants& pc = {});

NoneqResult noneq_force(double a, double T_E, double T_g, const NanoparticleSpec& spec,
                        const ForceOptions& opt = {}, const PhysicalConstants& pc = {});

struct ConsistencyReport {
    double f_neq = 0.0;            // evanescent-only assembly
    double f_assembled = 0.0;      // F + Delta F with propagating waves
    double half_diff_matsubara = 0.0;
    double half_diff_real_axis = 0.0;
    double propagating = 0.0;      // propagating-wave integral, N
    double evanescent = 0.0;       // evanescent-wave integral, N
    double assembly_rel = 0.0;
    double half_diff_rel = 0.0;
    double tolerance = 0.0;
    NoneqBreakdown breakdown;

    bool pass() const { return assembly_rel <= tolerance && half_diff_rel <= tolerance; }
    std::string summary() const;
};

inline constexpr double kCrossCheckTol = 1e-4;

/// Never throws on disagreement; inspect pass().
ConsistencyReport cross_check_representation(double a, double T_E, double T_g,
                                             const NanoparticleSpec& spec,
                                             const ForceOptions& opt = {},
                                             const PhysicalConstants& pc = {},
                                             double tolerance = kCrossCheckTol);

namespace detail {

/// Reduced inner integrals at W = 2 a omega / c, all lengths in units of 2a.
/// Evanescent: int_0^inf q dq e^{-q} Im[sum A R]. Propagating:
/// int_0^W p dp Im[e^{i p} sum A R] with p = sqrt(W^2 - K^2).
quad::IntegralEstimate<double> evanescent_inner(double W, double beta_g, double rel_tol,
                                                double tensor_rel_tol, std::size_t budget,
                                                const PhysicalConstants& pc);
quad::IntegralEstimate<double> propagating_inner(double W, double beta_g, double rel_tol,
                                                 double tensor_rel_tol, std::size_t budget,
                                                 const PhysicalConstants& pc);

}  // namespace detail

}  // namespace neqcp
