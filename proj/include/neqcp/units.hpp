#pragma once

#include <stdexcept>
#include <string>

namespace neqcp {

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// CODATA 2018 exact/recommended values. Every number the library uses comes
// from this one table so output metadata can echo it.
struct PhysicalConstants {
    double c = 299792458.0;               // m/s
    double hbar = 1.054571817e-34;        // J s
    double kB = 1.380649e-23;             // J/K
    double alpha_fs = 7.2973525693e-3;    // e^2/(hbar c)
    double vF = 299792458.0 / 300.0;      // m/s, Dirac-cone convention

    /// Fermi velocity in units of c.
    double v() const { return vF / c; }

    static PhysicalConstants codata2018() { return {}; }
    static PhysicalConstants with_fermi_velocity(double vF);

    /// Stable textual form, used in CSV metadata and the cache key.
    std::string describe() const;
};

struct ThermalState {
    double a;    // separation, m
    double T_E;  // environment and nanoparticle, K
    double T_g;  // graphene, K
};

/// hbar c / (kB T). Throws DomainError for T <= 0.
double thermal_wavelength(double T, const PhysicalConstants& pc = {});

/// xi_l = 2 pi kB T l / hbar.
double matsubara_frequency(int l, double T, const PhysicalConstants& pc = {});

struct GeometryReport {
    double radius_over_separation = 0;
    double radius_over_wavelength = 0;  // against the shorter of lambda_E, lambda_g
    bool dipole_ok = true;              // R/a <= 0.1
    bool quasistatic_ok = true;         // R/lambda <= 0.01
    bool pass() const { return dipole_ok && quasistatic_ok; }
};

GeometryReport validate_geometry(double R, const ThermalState& state,
                                 const PhysicalConstants& pc = {});

// Thresholds for validate_geometry.
inline constexpr double kMaxRadiusOverSeparation = 0.1;
inline constexpr double kMaxRadiusOverWavelength = 0.01;

// Dirac-model validity ceiling used to bound the frequency cutoff.
inline constexpr double kDiracModelMaxEnergy_eV = 3.0;
inline constexpr double kElementaryCharge = 1.602176634e-19;

}  // namespace neqcp
