#include "neqcp/nonequilibrium.hpp"

#include <cmath>
#include <complex>
#include <fmt/format.h>
#include <numbers>

#include "neqcp/graphene.hpp"

namespace neqcp {

namespace {

using graphene::cplx;

// Below this hbar omega / (kB T) the occupation difference is taken from
// its Laurent series.
constexpr double kSeriesThreshold = 1e-4;
// Past this many decay lengths e^{-q} is below 1e-26.
constexpr double kDecayCut = 60.0;

double occupation(double x) { return 1.0 / std::expm1(x); }

double reduced_beta(double T, double two_a, const PhysicalConstants& pc) {
    return T > 0 ? thermal_wavelength(T, pc) / two_a : graphene::reduced::kZeroTemperature;
}

// sum_kappa A_kappa R_kappa in units of (c / 2a)^2.
cplx weighted_reflection(double W, double K, double beta_g, const graphene::Model& m) {
    const auto p = graphene::reduced::total(W, K, beta_g, m);
    const auto r = graphene::reduced::reflection(W, K, p);
    return (2.0 * K * K - W * W) * r.r_tm + W * W * r.r_te;
}

// Nodes that land exactly on the Dirac cone are dropped; the integrand is
// continuous there.
bool on_cone(double W, double K, const graphene::Model& m) { return m.v * K == W; }

// The evanescent integral once more, this time over K itself. Used only by the
// cross-check so that it does not share a quadrature with noneq_delta.
quad::IntegralEstimate<double> evanescent_inner_k(double W, double beta_g, double rel_tol,
                                                  double tensor_rel_tol, std::size_t budget,
                                                  const PhysicalConstants& pc) {
    const graphene::Model m = graphene::Model::from(pc, tensor_rel_tol);
    auto f = [&](double K) {
        if (on_cone(W, K, m) || K <= W) return 0.0;
        const double q = std::sqrt((K - W) * (K + W));
        return K * std::exp(-q) * weighted_reflection(W, K, beta_g, m).imag();
    };
    quad::Options opt{rel_tol, 0.0, budget};
    const double Kb = W / m.v;
    const double hi = std::min(Kb, W + kDecayCut);
    auto est = quad::gauss_kronrod(f, W, hi, opt);
    if (Kb < W + kDecayCut) {
        auto tail = quad::exp_sinh<double>(f, Kb, 1.0, opt);
        est.value += tail.value;
        est.abs_error += tail.abs_error;
        est.evaluations += tail.evaluations;
    }
    return est;
}

}  // namespace

double theta(double omega, double T_E, double T_g, const PhysicalConstants& pc) {
    if (!(omega > 0)) throw DomainError("theta needs omega > 0");
    if (!(T_E >= 0) || !(T_g >= 0)) throw DomainError("temperatures must be nonnegative");
    if (T_E == T_g) return 0.0;
    const double e = pc.hbar * omega;
    const double xE = T_E > 0 ? e / (pc.kB * T_E) : INFINITY;
    const double xg = T_g > 0 ? e / (pc.kB * T_g) : INFINITY;
    if (std::max(xE, xg) < kSeriesThreshold) {
        // 1/(e^x - 1) = 1/x - 1/2 + x/12 - x^3/720 + O(x^5)
        const double lead = pc.kB * (T_E - T_g) / e;
        const double d1 = xE - xg;
        const double d3 = xE * xE * xE - xg * xg * xg;
        return lead + d1 / 12.0 - d3 / 720.0;
    }
    const double nE = T_E > 0 ? occupation(xE) : 0.0;
    const double ng = T_g > 0 ? occupation(xg) : 0.0;
    return nE - ng;
}

AngularFactors angular_factors(double omega, double k_perp, const PhysicalConstants& pc) {
    if (!(omega >= 0) || !(k_perp >= 0)) throw DomainError("angular factors need omega, k >= 0");
    const double kc = k_perp * pc.c;
    return {2.0 * kc * kc - omega * omega, omega * omega};
}

double omega_cutoff(double T_E, double T_g, const PhysicalConstants& pc) {
    const double w = graphene::kFermiCut * pc.kB * std::max(T_E, T_g) / pc.hbar;
    const double ceiling = kDiracModelMaxEnergy_eV * kElementaryCharge / pc.hbar;
    if (w > ceiling)
        throw DomainError(fmt::format("frequency cutoff {:.3g} rad/s exceeds the Dirac-model "
                                      "limit of {} eV; lower the temperatures",
                                      w, kDiracModelMaxEnergy_eV));
    return w;
}

namespace detail {

quad::IntegralEstimate<double> evanescent_inner(double W, double beta_g, double rel_tol,
                                                double tensor_rel_tol, std::size_t budget,
                                                const PhysicalConstants& pc) {
    const graphene::Model m = graphene::Model::from(pc, tensor_rel_tol);
    auto f = [&](double q) {
        const double K = std::hypot(q, W);
        if (on_cone(W, K, m)) return 0.0;
        return q * std::exp(-q) * weighted_reflection(W, K, beta_g, m).imag();
    };
    quad::Options opt{rel_tol, 0.0, budget};
    // q on the cone K = W / v
    const double qb = W * std::sqrt((1.0 / m.v - 1.0) * (1.0 / m.v + 1.0));
    // plasmonic band: adaptive bisection copes with the plasmon resonance
    auto est = quad::gauss_kronrod(f, 0.0, std::min(qb, kDecayCut), opt);
    if (qb < kDecayCut) {
        auto far = quad::exp_sinh<double>(f, qb, 1.0, opt);
        est.value += far.value;
        est.abs_error += far.abs_error;
        est.evaluations += far.evaluations;
    }
    return est;
}

quad::IntegralEstimate<double> propagating_inner(double W, double beta_g, double rel_tol,
                                                 double tensor_rel_tol, std::size_t budget,
                                                 const PhysicalConstants& pc) {
    const graphene::Model m = graphene::Model::from(pc, tensor_rel_tol);
    auto f = [&](double p) {
        const double K = std::sqrt((W - p) * (W + p));
        if (K == 0.0) return 0.0;
        const cplx ph(std::cos(p), std::sin(p));
        return p * (ph * weighted_reflection(W, K, beta_g, m)).imag();
    };
    quad::Options opt{rel_tol, 0.0, budget};
    return quad::gauss_kronrod(f, 0.0, W, opt);
}

}  // namespace detail

namespace {

using Inner = quad::IntegralEstimate<double> (*)(double, double, double, double, std::size_t,
                                                 const PhysicalConstants&);

// (hbar c alpha0 / (32 pi a^5)) int_0^{W_max} dW Theta(W) inner(W); this is
// the real-frequency prefactor hbar alpha0 / (pi c^2) in 2a units.
ForceResult real_axis_integral(Inner inner, double a, double T_E, double T_g, double alpha0,
                               const ForceOptions& opt, const PhysicalConstants& pc) {
    const double two_a = 2.0 * a;
    const double beta_g = reduced_beta(T_g, two_a, pc);
    const double W_max = omega_cutoff(T_E, T_g, pc) * two_a / pc.c;
    const double to_omega = pc.c / two_a;
    const double inner_tol = 0.1 * opt.rel_tol;

    auto outer = [&](double W) {
        auto r = inner(W, beta_g, inner_tol, opt.tensor_rel_tol, opt.budget, pc);
        const double th = theta(W * to_omega, T_E, T_g, pc);
        r.value *= th;
        r.abs_error *= std::abs(th);
        return r;
    };
    auto est = quad::integrate_double(outer, W_max, opt.rel_tol, opt.budget);

    const double scale = pc.hbar * pc.c * alpha0 / (32.0 * std::numbers::pi * std::pow(a, 5));
    ForceResult out;
    out.force = scale * est.value;
    out.error = std::abs(scale) * est.abs_error;
    out.evaluations = est.evaluations;
    return out;
}

void check_args(double a, double T_E, double T_g) {
    if (!(a > 0)) throw DomainError("separation must be positive");
    if (!(T_E > 0)) throw DomainError("environment temperature must be positive");
    if (!(T_g >= 0)) throw DomainError("graphene temperature must be nonnegative");
}

}  // namespace

ForceResult noneq_delta(double a, double T_E, double T_g, const NanoparticleSpec& spec,
                        const ForceOptions& opt, const PhysicalConstants& pc) {
    check_args(a, T_E, T_g);
    const double alpha0 = polarizability(spec);
    ForceResult out;
    if (T_E == T_g) {
        out.parts = {{"delta_evanescent", 0.0}};
        return out;
    }
    out = real_axis_integral(detail::evanescent_inner, a, T_E, T_g, alpha0, opt, pc);
    out.force *= 2.0;
    out.error *= 2.0;
    out.parts = {{"delta_evanescent", out.force}};
    return out;
}

NoneqResult noneq_force(double a, double T_E, double T_g, const NanoparticleSpec& spec,
                        const ForceOptions& opt, const PhysicalConstants& pc) {
    check_args(a, T_E, T_g);
    NoneqResult res;
    const ForceResult ft = lifshitz_tilde_force(a, T_E, T_g, spec, opt, pc);
    if (T_E == T_g) {
        res.total = ft;
        res.total.parts = {{"f_tilde", ft.force}, {"delta_evanescent", 0.0}};
        res.breakdown.f_tilde_TE_Tg = ft.force;
        return res;
    }
    const ForceResult d = noneq_delta(a, T_E, T_g, spec, opt, pc);
    res.total.force = ft.force + d.force;
    res.total.error = ft.error + d.error;
    res.total.evaluations = ft.evaluations + d.evaluations;
    res.total.matsubara_terms = ft.matsubara_terms;
    res.total.parts = {{"f_tilde", ft.force}, {"delta_evanescent", d.force}};
    res.breakdown.f_tilde_TE_Tg = ft.force;
    res.breakdown.delta_evanescent = d.force;
    return res;
}

ConsistencyReport cross_check_representation(double a, double T_E, double T_g,
                                             const NanoparticleSpec& spec,
                                             const ForceOptions& opt,
                                             const PhysicalConstants& pc, double tolerance) {
    check_args(a, T_E, T_g);
    if (!(T_g > 0)) throw DomainError("the Matsubara form of F~(a, T_g; T_g) needs T_g > 0");
    ConsistencyReport rep;
    rep.tolerance = tolerance;

    const NoneqResult neq = noneq_force(a, T_E, T_g, spec, opt, pc);
    rep.f_neq = neq.total.force;
    rep.breakdown = neq.breakdown;

    const double fE = neq.breakdown.f_tilde_TE_Tg;
    const double fg = lifshitz_tilde_force(a, T_g, T_g, spec, opt, pc).force;
    rep.half_diff_matsubara = 0.5 * (fg - fE);

    if (T_E != T_g) {
        const double alpha0 = polarizability(spec);
        rep.propagating =
            real_axis_integral(detail::propagating_inner, a, T_E, T_g, alpha0, opt, pc).force;
        rep.evanescent =
            real_axis_integral(evanescent_inner_k, a, T_E, T_g, alpha0, opt, pc).force;
    }
    rep.half_diff_real_axis = rep.propagating + rep.evanescent;
    const double delta_F = rep.evanescent - rep.propagating;
    const double F_term = 0.5 * (fE + fg);
    rep.f_assembled = F_term + delta_F;
    rep.breakdown.half_difference = rep.half_diff_real_axis;
    rep.breakdown.delta_F = delta_F;
    rep.breakdown.F_term = F_term;

    auto rel = [](double got, double want) {
        if (got == want) return 0.0;
        return std::abs(got - want) / std::abs(want);
    };
    rep.assembly_rel = rel(rep.f_assembled, rep.f_neq);
    rep.half_diff_rel = rel(rep.half_diff_real_axis, rep.half_diff_matsubara);
    return rep;
}

std::string ConsistencyReport::summary() const {
    return fmt::format(
        "F_neq {:.9e} N, assembled {:.9e} N (rel {:.2e}); half difference Matsubara {:.9e} N, "
        "real axis {:.9e} N (rel {:.2e}); tolerance {:.1e}: {}",
        f_neq, f_assembled, assembly_rel, half_diff_matsubara, half_diff_real_axis, half_diff_rel,
        tolerance, pass() ? "consistent" : "INCONSISTENT");
}

}  // namespace neqcp
