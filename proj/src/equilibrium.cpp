#include "neqcp/equilibrium.hpp"

#include <cmath>
#include <numbers>

#include "neqcp/graphene.hpp"

namespace neqcp {

double polarizability(const NanoparticleSpec& spec) {
    if (!(spec.radius > 0)) throw DomainError("nanoparticle radius must be positive");
    const double r3 = spec.radius * spec.radius * spec.radius;
    if (spec.material == Material::Metal) return r3;
    const double e = spec.epsilon_static;
    if (!(e > 1)) throw DomainError("static permittivity must exceed 1");
    if (std::isinf(e)) return r3;
    return r3 * (e - 1) / (e + 2);
}

double ForceResult::part(const std::string& name) const {
    for (const auto& [n, v] : parts)
        if (n == name) return v;
    throw std::out_of_range("no force part named " + name);
}

namespace detail {

namespace {
constexpr double kMinK = 1e-30;
}

quad::IntegralEstimate<double> matsubara_term(double X, double beta_g, double rel_tol,
                                              double tensor_rel_tol,
                                              const PhysicalConstants& pc) {
    const graphene::Model m = graphene::Model::from(pc, tensor_rel_tol);
    const double X2 = X * X;
    quad::BatchIntegrand<double> f = [&](const quad::NodeBatch& nb, std::span<double> out) {
        for (std::size_t i = 0; i < nb.size(); ++i) {
            const double q = nb.x[i], d = nb.dist_left[i];
            // Below K ~ 1e-30 (1 + X) the reflection coefficients sit at their
            // K -> 0 limits to double precision, but K^2 heads for underflow.
            const double K = std::max(std::sqrt(d * (q + X)), kMinK * (1.0 + X));
            const auto pair = graphene::reduced::total_imag(X, K, beta_g, m);
            const auto r = graphene::reduced::reflection_imag(X, K, pair);
            const double tm = (2.0 * q * q - X2) * r.r_tm;
            const double te = X2 > 0 ? X2 * r.r_te : 0.0;
            out[i] = -q * std::exp(-q) * (tm - te);
        }
    };
    quad::Options opt{rel_tol, 0.0, 10'000'000};
    auto est = quad::exp_sinh_batched<double>(f, X, 1.0, opt);
    if (X == 0.0) {
        est.value *= 0.5;
        est.abs_error *= 0.5;
    }
    return est;
}

}  // namespace detail

namespace {

// Neumaier summation.
struct Compensated {
    double sum = 0.0, c = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            c += (sum - t) + x;
        else
            c += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + c; }
};

}  // namespace

ForceResult lifshitz_tilde_force(double a, double T_sum, double T_g, const NanoparticleSpec& spec,
                                 const ForceOptions& opt, const PhysicalConstants& pc) {
    if (!(a > 0)) throw DomainError("separation must be positive");
    if (!(T_sum > 0)) throw DomainError("summation temperature must be positive");
    if (!(T_g >= 0)) throw DomainError("graphene temperature must be nonnegative");
    const double alpha0 = polarizability(spec);

    const double two_a = 2.0 * a;
    const double beta_g = T_g > 0 ? thermal_wavelength(T_g, pc) / two_a : graphene::reduced::kZeroTemperature;
    const double X1 = two_a * 2.0 * std::numbers::pi / thermal_wavelength(T_sum, pc);
    const double r_geo = std::exp(-X1);
    const double term_tol = 0.1 * opt.rel_tol;

    Compensated sum;
    double err = 0.0, prev = 0.0;
    std::size_t evals = 0;
    int small_run = 0, l = 0;
    for (;; ++l) {
        if (l > opt.max_matsubara)
            throw quad::BudgetExceeded("Matsubara sum did not converge", std::abs(sum.value()), err);
        const auto t = detail::matsubara_term(l * X1, beta_g, term_tol, opt.tensor_rel_tol, pc);
        sum.add(t.value);
        err += t.abs_error;
        evals += t.evaluations;
        if (evals > opt.budget)
            throw quad::BudgetExceeded("force evaluation budget exhausted", std::abs(sum.value()), err);

        const double s = std::abs(sum.value());
        small_run = std::abs(t.value) < 1e-10 * s ? small_run + 1 : 0;
        if (small_run >= 3 && l >= 2) {
            // terms fall off at least geometrically once past the peak
            double r = r_geo;
            if (prev != 0.0) r = std::max(r, std::abs(t.value / prev));
            const double tail = r < 1 ? std::abs(t.value) * r / (1 - r) : INFINITY;
            if (tail < 0.01 * opt.rel_tol * s) {
                err += tail;
                break;
            }
        }
        prev = t.value;
    }

    const double scale = pc.kB * T_sum * alpha0 / (8.0 * a * a * a * a);
    ForceResult out;
    out.force = scale * sum.value();
    out.error = std::abs(scale) * err;
    out.parts = {{"tilde", out.force}};
    out.evaluations = evals;
    out.matsubara_terms = l + 1;
    return out;
}

ForceResult equilibrium_force(double a, double T, const NanoparticleSpec& spec,
                              const ForceOptions& opt, const PhysicalConstants& pc) {
    return lifshitz_tilde_force(a, T, T, spec, opt, pc);
}

}  // namespace neqcp
