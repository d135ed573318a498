#include "neqcp/units.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace neqcp {

PhysicalConstants PhysicalConstants::with_fermi_velocity(double vF) {
    if (!(vF > 0)) throw DomainError("Fermi velocity must be positive");
    PhysicalConstants pc;
    pc.vF = vF;
    if (!(vF < pc.c)) throw DomainError("Fermi velocity must be below c");
    return pc;
}

std::string PhysicalConstants::describe() const {
    return fmt::format("c={:.17g} hbar={:.17g} kB={:.17g} alpha={:.17g} vF={:.17g}", c,
                       hbar, kB, alpha_fs, vF);
}

double thermal_wavelength(double T, const PhysicalConstants& pc) {
    if (!(T > 0)) throw DomainError("thermal_wavelength: temperature must be positive");
    return pc.hbar * pc.c / (pc.kB * T);
}

double matsubara_frequency(int l, double T, const PhysicalConstants& pc) {
    if (l < 0) throw DomainError("matsubara_frequency: negative index");
    if (!(T > 0)) throw DomainError("matsubara_frequency: temperature must be positive");
    return 2.0 * std::numbers::pi * pc.kB * T * l / pc.hbar;
}

GeometryReport validate_geometry(double R, const ThermalState& state,
                                 const PhysicalConstants& pc) {
    if (!(R > 0)) throw DomainError("validate_geometry: radius must be positive");
    if (!(state.a > 0)) throw DomainError("validate_geometry: separation must be positive");
    GeometryReport r;
    r.radius_over_separation = R / state.a;
    const double T = std::max(state.T_E, state.T_g);
    r.radius_over_wavelength = T > 0 ? R / thermal_wavelength(T, pc) : 0.0;
    r.dipole_ok = r.radius_over_separation <= kMaxRadiusOverSeparation;
    r.quasistatic_ok = r.radius_over_wavelength <= kMaxRadiusOverWavelength;
    return r;
}

}  // namespace neqcp
