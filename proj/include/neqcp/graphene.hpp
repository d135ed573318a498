#pragma once

// Polarization tensor of gapless, undoped graphene in the Dirac model and
// the TM/TE reflection coefficients built from it.
//
// Two layers:
//  * `reduced` works in an arbitrary but consistent wavenumber unit: the
//    frequency enters as W = omega / c, the thermal length as
//    beta = hbar c / (kB T), and tensor components are divided by hbar
//    (pi00 ~ wavenumber, pi ~ wavenumber^3). Every formula is homogeneous, so
//    callers may rescale all lengths together.
//  * The SI layer takes rad/s, 1/m and kelvin and returns pi00 in J s / m
//    and pi in J s / m^3.
//
// On the real axis the tensor is the boundary value from the upper
// half-plane (omega + i0), which fixes every square-root branch. The
// thermal correction is a single u-integral
//   pi00_th = (16 alpha / v^2) int_0^inf du f(beta u) [1 - (S_+ + S_-) / (2 pt)]
//   pi_th   = (16 alpha / v^2) int_0^inf du f(beta u)
//             [W^2 - (pt / 2) sum_l (2u + l W)^2 / S_l]
// with S_l = sqrt(v^2 K^2 - (2u + l W)^2), pt = sqrt(v^2 K^2 - W^2),
// f the Fermi function and v = vF / c. It is split at the branch points
// |vK - W|/2 and (vK + W)/2. Evaluated at W = i xi the same expressions give
// the imaginary-axis tensor.

#include <array>
#include <complex>
#include <limits>

#include "neqcp/quadrature.hpp"
#include "neqcp/units.hpp"

namespace neqcp::graphene {

using cplx = std::complex<double>;

class BoundaryError : public DomainError {
public:
    using DomainError::DomainError;
};

class SingularityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Regime { MatsubaraAxis, Plasmonic, FarEvanescent, Propagating };

const char* regime_name(Regime r);

struct SpectralPoint {
    double omega;   // rad/s on the real axis; xi on the imaginary axis
    double k_perp;  // 1/m
    double T;       // graphene temperature, K
    Regime regime;

    /// Classifies a real-axis point. Throws BoundaryError exactly on
    /// k_perp = omega / vF.
    static SpectralPoint real_axis(double omega, double k_perp, double T,
                                   const PhysicalConstants& pc = {});
    static SpectralPoint imaginary_axis(double xi, double k_perp, double T);
};

struct PolarizationPair {
    cplx pi00;
    cplx pi;
};

struct MatsubaraPair {
    double pi00;
    double pi;
};

struct ReflectionPair {
    cplx r_tm;
    cplx r_te;
};

struct MatsubaraReflection {
    double r_tm;
    double r_te;
};

struct Model {
    double v;      // vF / c
    double alpha;  // fine-structure constant
    double rel_tol = quad::kTensorRelTol;

    static Model from(const PhysicalConstants& pc, double rel_tol = quad::kTensorRelTol) {
        return {pc.v(), pc.alpha_fs, rel_tol};
    }
};

/// Fermi weights below exp(-kFermiCut) of the peak are dropped.
inline constexpr double kFermiCut = 40.0;

namespace reduced {

inline constexpr double kZeroTemperature = std::numeric_limits<double>::infinity();

struct ThermalPair {
    PolarizationPair value;
    double abs_error = 0.0;
    std::size_t evaluations = 0;
};

struct ThermalMatsubara {
    MatsubaraPair value;
    double abs_error = 0.0;
    std::size_t evaluations = 0;
};

/// Zero-temperature tensor on the real axis, W >= 0, K > 0, W != vK.
PolarizationPair zero_temperature(double W, double K, const Model& m);
/// Thermal correction on the real axis; exactly zero for beta = inf.
ThermalPair thermal(double W, double K, double beta, const Model& m);
PolarizationPair total(double W, double K, double beta, const Model& m);

/// Imaginary axis, omega = i xi, xi >= 0. Real by construction.
MatsubaraPair zero_temperature_imag(double xi, double K, const Model& m);
ThermalMatsubara thermal_imag(double xi, double K, double beta, const Model& m);
MatsubaraPair total_imag(double xi, double K, double beta, const Model& m);

/// q = sqrt(K^2 - W^2) continued as -i sqrt(W^2 - K^2) inside the light cone.
cplx q_real_axis(double W, double K);

ReflectionPair reflection(double W, double K, const PolarizationPair& p);
MatsubaraReflection reflection_imag(double xi, double K, const MatsubaraPair& p);

}  // namespace reduced

// ---------------------------------------------------------------------------
// SI interface.

/// i pi alpha hbar k^2 / p and -i pi alpha hbar k^2 p, plasmonic points only.
PolarizationPair pi_zero_T_plasmonic(const SpectralPoint& pt, const PhysicalConstants& pc = {});
/// Thermal corrections in the plasmonic region; exactly zero at T = 0.
cplx pi00_thermal_plasmonic(const SpectralPoint& pt, const PhysicalConstants& pc = {},
                            double rel_tol = quad::kTensorRelTol);
cplx pi_thermal_plasmonic(const SpectralPoint& pt, const PhysicalConstants& pc = {},
                          double rel_tol = quad::kTensorRelTol);
/// Full tensor (zero-T plus thermal) beyond omega / vF.
PolarizationPair pi_far_evanescent(const SpectralPoint& pt, const PhysicalConstants& pc = {},
                                   double rel_tol = quad::kTensorRelTol);
/// Full tensor at xi_l = 2 pi kB T l / hbar for graphene at temperature T.
MatsubaraPair pi_matsubara(int l, double k_perp, double T, const PhysicalConstants& pc = {},
                           double rel_tol = quad::kTensorRelTol);
/// Full tensor at any classified point.
PolarizationPair polarization(const SpectralPoint& pt, const PhysicalConstants& pc = {},
                              double rel_tol = quad::kTensorRelTol);
ReflectionPair reflection(const SpectralPoint& pt, const PhysicalConstants& pc = {},
                          double rel_tol = quad::kTensorRelTol);

}  // namespace neqcp::graphene
