#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "neqcp/graphene.hpp"
#include "oracles.hpp"

using namespace neqcp;
using namespace neqcp::graphene;
using std::numbers::pi;

namespace {

const Model kModel = Model::from(PhysicalConstants::codata2018());

double rel(cplx got, cplx want) { return std::abs(got - want) / std::abs(want); }

struct Sample {
    double W, K, beta;
};

// Points in reduced units. `lo`, `hi` bound vK / W.
std::vector<Sample> draw(unsigned seed, int n, double lo, double hi) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> lb(std::log(0.5), std::log(20.0));
    std::uniform_real_distribution<double> lw(std::log(0.05), std::log(30.0));
    std::uniform_real_distribution<double> lr(std::log(lo), std::log(hi));
    std::vector<Sample> out;
    for (int i = 0; i < n; ++i) {
        const double beta = std::exp(lb(rng));
        const double W = std::exp(lw(rng)) / beta;
        const double K = W * std::exp(lr(rng)) / kModel.v;
        out.push_back({W, K, beta});
    }
    return out;
}

void expect_matches(const Sample& s, const oracle::Tensor& th, double tol) {
    const PolarizationPair got = reduced::total(s.W, s.K, s.beta, kModel);
    const PolarizationPair z = reduced::zero_temperature(s.W, s.K, kModel);
    EXPECT_LT(rel(got.pi00, z.pi00 + th.pi00), tol) << "W=" << s.W << " K=" << s.K << " beta=" << s.beta;
    EXPECT_LT(rel(got.pi, z.pi + th.pi), tol) << "W=" << s.W << " K=" << s.K << " beta=" << s.beta;
}

TEST(GrapheneOracle, Plasmonic) {
    for (const Sample& s : draw(11, 50, 0.02, 0.98))
        expect_matches(s, oracle::thermal_plasmonic(s.W, s.K, s.beta, kModel.v, kModel.alpha), 1e-8);
}

TEST(GrapheneOracle, Propagating) {
    for (const Sample& s : draw(12, 50, 3e-4, 3.2e-3))
        expect_matches(s, oracle::thermal_plasmonic(s.W, s.K, s.beta, kModel.v, kModel.alpha), 1e-8);
}

TEST(GrapheneOracle, FarEvanescent) {
    for (const Sample& s : draw(13, 50, 1.02, 50.0))
        expect_matches(s, oracle::thermal_far(s.W, s.K, s.beta, kModel.v, kModel.alpha), 1e-8);
}

TEST(GrapheneOracle, StaticRealAxis) {
    for (double beta : {0.3, 1.0, 7.0})
        for (double K : {0.01, 1.0, 50.0, 3000.0}) {
            const Sample s{0.0, K, beta};
            const auto th = oracle::thermal_far(0.0, K, beta, kModel.v, kModel.alpha);
            expect_matches(s, th, 1e-8);
            // conjugate pair: real and positive
            EXPECT_EQ(reduced::thermal(0.0, K, beta, kModel).value.pi00.imag(), 0.0);
            EXPECT_GT(th.pi00.real(), 0.0);
        }
}

TEST(GrapheneOracle, Matsubara) {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> lb(std::log(0.5), std::log(20.0));
    // vK / xi; below ~1e-4 the oracle itself runs out of digits
    std::uniform_real_distribution<double> lr(std::log(1e-4), std::log(1e3));
    std::uniform_int_distribution<int> ll(1, 30);
    for (int i = 0; i < 50; ++i) {
        const double beta = std::exp(lb(rng));
        const double xi = 2 * pi * ll(rng) / beta;
        const double K = std::exp(lr(rng)) * xi / kModel.v;
        const auto th = oracle::thermal_matsubara(xi, K, beta, kModel.v, kModel.alpha);
        EXPECT_LT(std::abs(th.pi00.imag()), 1e-12 * std::abs(th.pi00.real()) + 1e-300);
        const auto z = reduced::zero_temperature_imag(xi, K, kModel);
        const auto got = reduced::total_imag(xi, K, beta, kModel);
        EXPECT_LT(std::abs(got.pi00 - (z.pi00 + th.pi00.real())) / got.pi00, 1e-8)
            << "xi=" << xi << " K=" << K << " beta=" << beta;
        EXPECT_LT(std::abs(got.pi - (z.pi + th.pi.real())) / got.pi, 1e-8)
            << "xi=" << xi << " K=" << K << " beta=" << beta;
    }
}

TEST(GrapheneOracle, MatsubaraSmallWavenumberScaling) {
    // For vK << xi both thermal components scale as K^2 at fixed xi; the
    // ratio to the zero-temperature part must settle to a constant.
    const double beta = 2.0, xi = 2 * pi / beta;
    double prev00 = 0, prevpi = 0;
    for (double r : {1e-4, 1e-5, 1e-6, 1e-7, 1e-8}) {
        const double K = r * xi / kModel.v;
        const auto th = reduced::thermal_imag(xi, K, beta, kModel).value;
        const auto z = reduced::zero_temperature_imag(xi, K, kModel);
        const double a = th.pi00 / z.pi00, b = th.pi / z.pi;
        if (prev00 != 0) {
            EXPECT_LT(std::abs(a - prev00), 1e-7 * std::abs(a));
            EXPECT_LT(std::abs(b - prevpi), 1e-7 * std::abs(b));
        }
        prev00 = a;
        prevpi = b;
    }
}

TEST(GrapheneOracle, MatsubaraSIPoint) {
    // l = 1, T = 300 K, k = 1e6 1/m, evaluated in SI wavenumbers
    const auto pc = PhysicalConstants::codata2018();
    const double T = 300.0, k = 1e6;
    const double beta = thermal_wavelength(T, pc);
    const double xi = matsubara_frequency(1, T, pc) / pc.c;
    const auto th = oracle::thermal_matsubara(xi, k, beta, pc.v(), pc.alpha_fs);
    const auto z = reduced::zero_temperature_imag(xi, k, kModel);
    const MatsubaraPair got = pi_matsubara(1, k, T, pc);
    EXPECT_LT(std::abs(got.pi00 / pc.hbar - (z.pi00 + th.pi00.real())) / (got.pi00 / pc.hbar), 1e-8);
    EXPECT_LT(std::abs(got.pi / pc.hbar - (z.pi + th.pi.real())) / (got.pi / pc.hbar), 1e-8);
}

TEST(GrapheneOracle, StaticMatsubaraClosedForm) {
    // l = 0 goes through a separate closed form; check it against the real
    // axis at omega = 0, which is the same function.
    for (double beta : {0.2, 2.0, 30.0})
        for (double K : {1e-3, 0.3, 10.0, 1e3, 1e5}) {
            const auto a = reduced::total_imag(0.0, K, beta, kModel);
            const auto th = oracle::thermal_far(0.0, K, beta, kModel.v, kModel.alpha);
            const auto z = reduced::zero_temperature(0.0, K, kModel);
            EXPECT_LT(std::abs(a.pi00 - (z.pi00 + th.pi00).real()) / a.pi00, 1e-8);
            EXPECT_LT(std::abs(a.pi - (z.pi + th.pi).real()) / a.pi, 1e-8) << K << " " << beta;
        }
}

// ---------------------------------------------------------------------------

TEST(GrapheneSI, ZeroTemperaturePlasmonicIsImaginary) {
    const auto pc = PhysicalConstants::codata2018();
    const double omega = 1e14;
    for (double frac : {0.01, 0.3, 0.9}) {
        const double k = frac * omega / pc.vF;
        if (k <= omega / pc.c) continue;
        const auto pt = SpectralPoint::real_axis(omega, k, 300.0, pc);
        ASSERT_EQ(pt.regime, Regime::Plasmonic);
        const auto z = pi_zero_T_plasmonic(pt, pc);
        EXPECT_EQ(z.pi00.real(), 0.0);
        EXPECT_EQ(z.pi.real(), 0.0);
        EXPECT_GT(z.pi00.imag(), 0.0);
        EXPECT_LT(z.pi.imag(), 0.0);
    }
}

TEST(GrapheneSI, LightConeLimit) {
    const auto pc = PhysicalConstants::codata2018();
    const double omega = 2e14;
    const auto pt = SpectralPoint::real_axis(omega, omega / pc.c * (1 + 1e-12), 0.0, pc);
    const double want = pi * pc.alpha_fs * pc.hbar * omega / pc.c / std::sqrt(1 - pc.v() * pc.v());
    EXPECT_LT(std::abs(std::abs(pi_zero_T_plasmonic(pt, pc).pi00) - want) / want, 1e-9);
}

TEST(GrapheneSI, ThermalSigns) {
    const auto pc = PhysicalConstants::codata2018();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> lw(std::log(1e12), std::log(1e15));
    std::uniform_real_distribution<double> fr(0.01, 0.99);
    for (int i = 0; i < 40; ++i) {
        const double omega = std::exp(lw(rng));
        const double k = std::max(fr(rng) * omega / pc.vF, 1.01 * omega / pc.c);
        const auto pt = SpectralPoint::real_axis(omega, k, 300.0, pc);
        EXPECT_LE(pi00_thermal_plasmonic(pt, pc).imag(), 0.0);
        EXPECT_GE(pi_thermal_plasmonic(pt, pc).imag(), 0.0);
    }
}

TEST(GrapheneSI, ZeroTemperatureThermalIsExactlyZero) {
    const auto pc = PhysicalConstants::codata2018();
    const double omega = 1e14;
    const auto pp = SpectralPoint::real_axis(omega, 0.5 * omega / pc.vF, 0.0, pc);
    EXPECT_EQ(pi00_thermal_plasmonic(pp, pc), cplx(0.0));
    EXPECT_EQ(pi_thermal_plasmonic(pp, pc), cplx(0.0));
    const auto pf = SpectralPoint::real_axis(omega, 2 * omega / pc.vF, 0.0, pc);
    const auto far = pi_far_evanescent(pf, pc);
    const auto z = reduced::zero_temperature(omega / pc.c, pf.k_perp, kModel);
    EXPECT_EQ(far.pi00, pc.hbar * z.pi00);
    EXPECT_EQ(far.pi, pc.hbar * z.pi);
    EXPECT_EQ(reduced::thermal_imag(1.0, 2.0, reduced::kZeroTemperature, kModel).value.pi00, 0.0);
}

TEST(GrapheneSI, ThermalCorrectionVanishesAsTemperatureFalls) {
    // Deep in the plasmonic region the bracket starts at O(u^2), so the
    // correction falls off as T^3 rather than exponentially.
    const auto pc = PhysicalConstants::codata2018();
    const double omega = 1e14;
    const auto at = [&](double T) {
        return std::abs(pi00_thermal_plasmonic(
            SpectralPoint::real_axis(omega, 0.5 * omega / pc.vF, T, pc), pc));
    };
    const double r = at(5.0) / at(10.0);
    EXPECT_NEAR(r, 0.125, 0.01);
    EXPECT_LT(at(10.0), 1e-3 * at(300.0));
}

TEST(GrapheneSI, StaticFarEvanescentValues) {
    const auto pc = PhysicalConstants::codata2018();
    const double k = 3e6;
    const auto pt = SpectralPoint::real_axis(0.0, k, 0.0, pc);
    ASSERT_EQ(pt.regime, Regime::FarEvanescent);
    const auto p = pi_far_evanescent(pt, pc);
    EXPECT_LT(rel(p.pi00, pi * pc.alpha_fs * pc.hbar * pc.c * k / pc.vF), 1e-14);
    EXPECT_LT(rel(p.pi, pi * pc.alpha_fs * pc.hbar * pc.vF * k * k * k / pc.c), 1e-14);
    // thermal part grows with T
    double prev = 0;
    for (double T : {50.0, 150.0, 300.0, 600.0}) {
        const auto q = pi_far_evanescent(SpectralPoint::real_axis(0.0, k, T, pc), pc);
        const double th = (q.pi00 - p.pi00).real();
        EXPECT_GT(th, prev);
        prev = th;
    }
}

TEST(GrapheneSI, RegimeClassification) {
    const auto pc = PhysicalConstants::codata2018();
    const double omega = 1e14;
    EXPECT_EQ(SpectralPoint::real_axis(omega, 0.5 * omega / pc.c, 0, pc).regime, Regime::Propagating);
    EXPECT_EQ(SpectralPoint::real_axis(omega, 2 * omega / pc.c, 0, pc).regime, Regime::Plasmonic);
    EXPECT_EQ(SpectralPoint::real_axis(omega, 2 * omega / pc.vF, 0, pc).regime, Regime::FarEvanescent);
    EXPECT_THROW(SpectralPoint::real_axis(pc.vF * 1e6, 1e6, 0, pc), BoundaryError);
    const auto pp = SpectralPoint::real_axis(omega, 2 * omega / pc.vF, 0, pc);
    EXPECT_THROW(pi_zero_T_plasmonic(pp, pc), DomainError);
    EXPECT_THROW(pi_matsubara(-1, 1e6, 300, pc), DomainError);
}

// ---------------------------------------------------------------------------

TEST(Reflection, StaticZeroTemperature) {
    const auto pc = PhysicalConstants::codata2018();
    const double a = pi * pc.alpha_fs * pc.c / pc.vF;
    const double b = pi * pc.alpha_fs * pc.vF / pc.c;
    for (double k : {1e3, 1e6, 1e9}) {
        const auto r = reflection(SpectralPoint::real_axis(0.0, k, 0.0, pc), pc);
        EXPECT_NEAR(r.r_tm.real(), a / (a + 2), 1e-14);
        EXPECT_NEAR(r.r_te.real(), -b / (b + 2), 1e-17);
    }
    EXPECT_NEAR(a / (a + 2), 0.775, 5e-4);
    EXPECT_NEAR(-b / (b + 2), -3.8e-5, 5e-7);
}

TEST(Reflection, StaticThermalTmTendsToOne) {
    const auto pc = PhysicalConstants::codata2018();
    double prev = 0;
    for (double k : {1e6, 1e4, 1e2, 1.0}) {
        const auto r = reflection(SpectralPoint::imaginary_axis(0.0, k, 300.0), pc);
        EXPECT_GT(r.r_tm.real(), prev);
        prev = r.r_tm.real();
    }
    EXPECT_GT(prev, 1 - 1e-4);
}

TEST(Reflection, MatsubaraBoundsAndReality) {
    const auto pc = PhysicalConstants::codata2018();
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> ll(0, 200);
    std::uniform_real_distribution<double> lk(std::log(1e2), std::log(1e10));
    std::uniform_real_distribution<double> lt(std::log(1.0), std::log(1000.0));
    for (int i = 0; i < 10000; ++i) {
        const int l = ll(rng);
        const double k = std::exp(lk(rng)), T = std::exp(lt(rng));
        const auto p = pi_matsubara(l, k, T, pc);
        ASSERT_GT(p.pi00, 0.0);
        ASSERT_GT(p.pi, 0.0);
        const auto r = reduced::reflection_imag(matsubara_frequency(l, T, pc) / pc.c, k,
                                                {p.pi00 / pc.hbar, p.pi / pc.hbar});
        ASSERT_GT(r.r_tm, 0.0);
        ASSERT_LT(r.r_tm, 1.0);
        ASSERT_LT(r.r_te, 0.0);
        ASSERT_GT(r.r_te, -1.0);
    }
}

TEST(Reflection, BoundaryContinuity) {
    // Both sides approach the same limit. The approach is O(sqrt(delta))
    // because the zero-temperature tensor is a square root of
    // v^2 K^2 - W^2, so the gap must shrink by sqrt(100) = 10 per two decades.
    const auto pc = PhysicalConstants::codata2018();
    for (double omega : {1e12, 1e13, 1e14, 1e15})
        for (double T : {77.0, 300.0}) {
            const double kb = omega / pc.vF;
            auto gap = [&](double delta) {
                const auto lo = reflection(SpectralPoint::real_axis(omega, (1 - delta) * kb, T, pc), pc);
                const auto hi = reflection(SpectralPoint::real_axis(omega, (1 + delta) * kb, T, pc), pc);
                return std::array{rel(lo.r_tm, hi.r_tm), rel(lo.r_te, hi.r_te)};
            };
            const auto g3 = gap(1e-3), g5 = gap(1e-5), g7 = gap(1e-7);
            for (int i = 0; i < 2; ++i) {
                EXPECT_LT(g5[i], g3[i]);
                EXPECT_NEAR(g5[i] / g7[i], 10.0, 1.0) << omega << " " << T << " " << i;
            }
        }
}

TEST(Reflection, EvanescentPassivity) {
    // Evanescent reflection coefficients may exceed unit modulus (the thermal
    // intraband response supports a plasmon pole in r_tm); what a passive
    // sheet guarantees is a nonnegative imaginary part.
    const auto pc = PhysicalConstants::codata2018();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> lw(std::log(1e11), std::log(1e15));
    std::uniform_real_distribution<double> lr(std::log(1.001), std::log(1e4));
    std::uniform_real_distribution<double> lt(std::log(1.0), std::log(1000.0));
    for (int i = 0; i < 500; ++i) {
        const double omega = std::exp(lw(rng));
        const double k = omega / pc.c * std::exp(lr(rng));
        if (std::abs(pc.vF * k / omega - 1) < 1e-9) continue;
        const auto r = reflection(SpectralPoint::real_axis(omega, k, std::exp(lt(rng)), pc), pc);
        EXPECT_GE(r.r_tm.imag(), 0.0);
        EXPECT_GE(r.r_te.imag(), 0.0);
    }
}

TEST(Reflection, ZeroTemperatureModulusBounded) {
    // Without the thermal part the plasmonic tensor is purely imaginary and
    // both coefficients stay inside the unit disc.
    const auto pc = PhysicalConstants::codata2018();
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> lw(std::log(1e11), std::log(1e15));
    std::uniform_real_distribution<double> lr(std::log(1.001), std::log(1e4));
    for (int i = 0; i < 500; ++i) {
        const double omega = std::exp(lw(rng));
        const double k = omega / pc.c * std::exp(lr(rng));
        if (std::abs(pc.vF * k / omega - 1) < 1e-9) continue;
        const auto r = reflection(SpectralPoint::real_axis(omega, k, 0.0, pc), pc);
        EXPECT_LE(std::abs(r.r_tm), 1.0);
        EXPECT_LE(std::abs(r.r_te), 1.0);
    }
}

TEST(Reflection, ScaleInvariance) {
    // Rescaling all lengths leaves reflection coefficients unchanged.
    const double W = 0.7, K = 80.0, beta = 3.0, s = 1e-6;
    const auto a = reduced::reflection(W, K, reduced::total(W, K, beta, kModel));
    const auto b = reduced::reflection(W / s, K / s, reduced::total(W / s, K / s, beta * s, kModel));
    EXPECT_LT(rel(a.r_tm, b.r_tm), 1e-10);
    EXPECT_LT(rel(a.r_te, b.r_te), 1e-10);
}

}  // namespace
