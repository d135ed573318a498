#pragma once

// Nanoparticle polarizability and the Matsubara-sum force between the
// particle and the graphene sheet.
//
//   F~(a, T_sum; T_g) = -(2 kB T_sum alpha0 / c^2) sum'_l int k dk e^{-2 a q_l}
//                       [(2 q_l^2 c^2 - xi_l^2) R_TM - xi_l^2 R_TE]
//
// with xi_l taken at T_sum and the reflection coefficients at T_g. Internally
// every length is scaled by 2a and the k-integral runs over q_l.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "neqcp/quadrature.hpp"
#include "neqcp/units.hpp"

namespace neqcp {

enum class Material { Metal, Dielectric };

struct NanoparticleSpec {
    double radius = 0.0;  // m
    Material material = Material::Metal;
    double epsilon_static = 0.0;  // dielectric only, > 1

    static NanoparticleSpec metal(double radius) { return {radius, Material::Metal, 0.0}; }
    static NanoparticleSpec dielectric(double radius, double eps) {
        return {radius, Material::Dielectric, eps};
    }
};

/// alpha0 = R^3 (metal) or R^3 (eps - 1) / (eps + 2), in m^3.
double polarizability(const NanoparticleSpec& spec);

struct ForceOptions {
    double rel_tol = quad::kForceRelTol;
    double tensor_rel_tol = quad::kTensorRelTol;
    std::size_t budget = 200'000'000;  // integrand evaluations per force
    int max_matsubara = 200'000;

    /// Both tolerances scaled together.
    ForceOptions scaled(double factor) const {
        ForceOptions o = *this;
        o.rel_tol *= factor;
        o.tensor_rel_tol *= factor;
        return o;
    }
};

struct ForceResult {
    double force = 0.0;  // N, negative = attraction
    std::vector<std::pair<std::string, double>> parts;
    double error = 0.0;  // N
    std::size_t evaluations = 0;
    int matsubara_terms = 0;

    double part(const std::string& name) const;
};

ForceResult lifshitz_tilde_force(double a, double T_sum, double T_g, const NanoparticleSpec& spec,
                                 const ForceOptions& opt = {},
                                 const PhysicalConstants& pc = {});

/// F_eq(a, T) = F~(a, T; T).
ForceResult equilibrium_force(double a, double T, const NanoparticleSpec& spec,
                              const ForceOptions& opt = {}, const PhysicalConstants& pc = {});

namespace detail {

/// Dimensionless l-th Matsubara term of F~ / (kB T_sum alpha0 / (8 a^4)), i.e.
/// -int q e^{-q} [(2q^2 - X^2) R_TM - X^2 R_TE] dq over [X, inf), halved for
/// X = 0. beta_g is hbar c / (kB T_g) / (2a), infinite for T_g = 0.
quad::IntegralEstimate<double> matsubara_term(double X, double beta_g, double rel_tol,
                                              double tensor_rel_tol,
                                              const PhysicalConstants& pc);

}  // namespace detail

}  // namespace neqcp
