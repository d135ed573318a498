#include "neqcp/graphene.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "neqcp/kernels.hpp"

namespace neqcp::graphene {

using std::numbers::pi;

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::MatsubaraAxis: return "matsubara";
        case Regime::Plasmonic: return "plasmonic";
        case Regime::FarEvanescent: return "far-evanescent";
        case Regime::Propagating: return "propagating";
    }
    return "?";
}

SpectralPoint SpectralPoint::real_axis(double omega, double k_perp, double T,
                                       const PhysicalConstants& pc) {
    if (!(omega >= 0)) throw DomainError("real-axis frequency must be nonnegative");
    if (!(k_perp > 0)) throw DomainError("transverse wavenumber must be positive");
    if (!(T >= 0)) throw DomainError("temperature must be nonnegative");
    const double W = omega / pc.c;
    const double vk = pc.v() * k_perp;
    if (vk == W) throw BoundaryError("point lies on k_perp = omega / vF");
    Regime r;
    if (vk > W)
        r = Regime::FarEvanescent;
    else if (k_perp >= W)
        r = Regime::Plasmonic;
    else
        r = Regime::Propagating;
    return {omega, k_perp, T, r};
}

SpectralPoint SpectralPoint::imaginary_axis(double xi, double k_perp, double T) {
    if (!(xi >= 0)) throw DomainError("imaginary-axis frequency must be nonnegative");
    if (!(k_perp > 0)) throw DomainError("transverse wavenumber must be positive");
    if (!(T >= 0)) throw DomainError("temperature must be nonnegative");
    return {xi, k_perp, T, Regime::MatsubaraAxis};
}

namespace reduced {

namespace {

using Pair2 = std::array<cplx, 2>;
using Real2 = std::array<double, 2>;

double prefactor(const Model& m) { return 16.0 * m.alpha / (m.v * m.v); }

struct RealAxis {
    double W, vk, b1, b2, gap;  // gap = b2 - b1
    bool far;
    cplx pt;

    RealAxis(double W_, double K, const Model& m) : W(W_), vk(m.v * K) {
        far = vk > W;
        b1 = 0.5 * std::abs(vk - W);
        b2 = 0.5 * (vk + W);
        gap = std::min(vk, W);
        const double mag = std::sqrt(std::abs(vk - W) * (vk + W));
        pt = far ? cplx(mag, 0.0) : cplx(0.0, -mag);
    }

    // Brackets at u, given b1 - u and b2 - u to full precision.
    Pair2 brackets(double u, double b1mu, double b2mu) const {
        return far ? brackets_far(u, b1mu, b2mu) : brackets_inside(u, b1mu, b2mu);
    }

    Pair2 brackets_far(double u, double b1mu, double b2mu) const {
        const double sp2 = 4.0 * b1mu * (u + b2);
        const double sm2 = 4.0 * b2mu * (u + b1);
        const cplx sp = sp2 >= 0 ? cplx(std::sqrt(sp2), 0.0) : cplx(0.0, -std::sqrt(-sp2));
        const cplx sm = sm2 >= 0 ? cplx(std::sqrt(sm2), 0.0)
                                 : cplx(0.0, (b2mu < 0 ? 1.0 : -1.0) * std::sqrt(-sm2));
        const double tp = 2.0 * u + W, tm = 2.0 * u - W;
        const cplx b00 = 1.0 - (sp + sm) / (2.0 * pt);
        const cplx bpi = W * W - 0.5 * pt * (tp * tp / sp + tm * tm / sm);
        return {b00, bpi};
    }

    // vK < W. Both brackets are O((vK/W)^2) differences of O(1) terms, so they
    // are rebuilt from x - sqrt(x^2 - e^2) = e^2 / (x + sqrt(x^2 - e^2)).
    Pair2 brackets_inside(double u, double b1mu, double b2mu) const {
        const double e = vk, e2 = e * e;
        const double p = -pt.imag();
        const double xp = 2.0 * u + W;
        const double bp = std::sqrt(4.0 * (u + b1) * (u + b2));
        const double cp = e2 / (xp + bp);      // xp - bp
        const double cw = 2.0 * e2 / (W + p);  // 2 (W - p)
        if (b1mu > 0) {
            const double xm = b1mu + b2mu;  // W - 2u
            const double bm = std::sqrt(4.0 * b1mu * b2mu);
            const double d = cp + e2 / (xm + bm) - cw;  // 2p - bp - bm
            return {cplx(d / (2.0 * p), 0.0),
                    cplx(e2 + 0.5 * p * d - 0.5 * p * e2 * (1.0 / bp + 1.0 / bm), 0.0)};
        }
        if (b2mu > 0) {
            const double xm = b1mu + b2mu;
            const double am = std::sqrt(-4.0 * b1mu * b2mu);
            const double d = xm + cp - cw;  // 2p - bp
            return {cplx(d / (2.0 * p), -am / (2.0 * p)),
                    cplx(e2 + 0.5 * p * d - 0.5 * p * e2 / bp, 0.5 * p * xm * xm / am)};
        }
        const double xm = -(b1mu + b2mu);  // 2u - W
        const double bm = std::sqrt(4.0 * b1mu * b2mu);
        const double d = cp - e2 / (xm + bm) - cw;  // 2p - bp + bm
        return {cplx(d / (2.0 * p), 0.0),
                cplx(e2 + 0.5 * p * d - 0.5 * p * e2 * (1.0 / bp - 1.0 / bm), 0.0)};
    }
};

double fermi(double beta, double u) { return 1.0 / (std::exp(beta * u) + 1.0); }

template <class T>
void accumulate(quad::IntegralEstimate<T>& into, const quad::IntegralEstimate<T>& part) {
    using quad::operator+;
    into.value = into.value + part.value;
    into.abs_error += part.abs_error;
    into.evaluations += part.evaluations;
}

}  // namespace

PolarizationPair zero_temperature(double W, double K, const Model& m) {
    const double vk = m.v * K;
    if (vk == W) throw BoundaryError("zero-temperature tensor diverges at k_perp = omega / vF");
    const double mag = std::sqrt(std::abs(vk - W) * (vk + W));
    const double c = pi * m.alpha * K * K;
    if (vk > W) return {cplx(c / mag, 0.0), cplx(c * mag, 0.0)};
    return {cplx(0.0, c / mag), cplx(0.0, -c * mag)};
}

ThermalPair thermal(double W, double K, double beta, const Model& m) {
    ThermalPair out;
    out.value = {cplx(0.0), cplx(0.0)};
    if (std::isinf(beta)) return out;
    if (!(beta > 0)) throw DomainError("thermal length must be positive");
    const RealAxis g(W, K, m);
    if (g.b1 == 0.0) throw BoundaryError("thermal tensor requested at k_perp = omega / vF");

    // Normalise each component by its zero-temperature size so one absolute
    // floor serves both.
    const PolarizationPair z = zero_temperature(W, K, m);
    const double n00 = std::abs(z.pi00), npi = std::abs(z.pi);
    const double U = kFermiCut / beta;
    quad::Options opt{m.rel_tol, 0.1 * m.rel_tol, 1'000'000};

    quad::IntegralEstimate<Pair2> acc;
    acc.value = {cplx(0.0), cplx(0.0)};

    auto finish = [&](double u, double b1mu, double b2mu) {
        const Pair2 b = g.brackets(u, b1mu, b2mu);
        const double f = fermi(beta, u);
        return Pair2{f * b[0] / n00, f * b[1] / npi};
    };

    const double hiA = std::min(g.b1, U);
    const bool a_to_root = hiA == g.b1;
    quad::BatchIntegrand<Pair2> fa = [&](const quad::NodeBatch& nb, std::span<Pair2> v) {
        for (std::size_t i = 0; i < nb.size(); ++i) {
            const double u = nb.dist_left[i];
            if (a_to_root)
                v[i] = finish(u, nb.dist_right[i], g.gap + nb.dist_right[i]);
            else
                v[i] = finish(u, g.b1 - u, g.b2 - u);
        }
    };
    accumulate(acc, quad::tanh_sinh_batched<Pair2>(fa, 0.0, hiA, opt));

    if (g.b1 < U && g.gap > 0.0) {
        const double hiB = std::min(g.b2, U);
        const bool b_to_root = hiB == g.b2;
        quad::BatchIntegrand<Pair2> fb = [&](const quad::NodeBatch& nb, std::span<Pair2> v) {
            for (std::size_t i = 0; i < nb.size(); ++i) {
                const double u = nb.x[i];
                v[i] = finish(u, -nb.dist_left[i], b_to_root ? nb.dist_right[i] : g.b2 - u);
            }
        };
        accumulate(acc, quad::tanh_sinh_batched<Pair2>(fb, g.b1, hiB, opt));
    }

    if (g.b2 < U) {
        quad::BatchIntegrand<Pair2> fc = [&](const quad::NodeBatch& nb, std::span<Pair2> v) {
            for (std::size_t i = 0; i < nb.size(); ++i) {
                const double d = nb.dist_left[i];
                v[i] = finish(g.b2 + d, -g.gap - d, -d);
            }
        };
        accumulate(acc, quad::exp_sinh_batched<Pair2>(fc, g.b2, 1.0 / beta, opt));
    }

    const double c = prefactor(m);
    out.value = {c * n00 * acc.value[0], c * npi * acc.value[1]};
    out.abs_error = c * std::max(n00, npi) * acc.abs_error;
    out.evaluations = acc.evaluations;
    return out;
}

PolarizationPair total(double W, double K, double beta, const Model& m) {
    const PolarizationPair z = zero_temperature(W, K, m);
    const ThermalPair t = thermal(W, K, beta, m);
    return {z.pi00 + t.value.pi00, z.pi + t.value.pi};
}

MatsubaraPair zero_temperature_imag(double xi, double K, const Model& m) {
    const double vk = m.v * K;
    const double pt = std::sqrt(vk * vk + xi * xi);
    const double c = pi * m.alpha * K * K;
    return {c / pt, c * pt};
}

ThermalMatsubara thermal_imag(double xi, double K, double beta, const Model& m) {
    ThermalMatsubara out;
    out.value = {0.0, 0.0};
    if (std::isinf(beta)) return out;
    if (!(beta > 0)) throw DomainError("thermal length must be positive");

    const double vk = m.v * K;
    const double c = prefactor(m);
    const MatsubaraPair z = zero_temperature_imag(xi, K, m);
    const double U = kFermiCut / beta;
    quad::Options opt{m.rel_tol, 0.1 * m.rel_tol, 1'000'000};

    if (xi == 0.0) {
        // Static limit. The pi component is assembled together with its
        // zero-temperature part, pi = c pt int (1/2 - f) 4u^2 / sqrt(pt^2 - 4u^2),
        // which is positive term by term; thermal_imag returns the difference.
        const double pt = vk;
        const double h = 0.5 * pt;
        // Integrate over t = u / h on [0, 1] so that endpoint distances stay
        // representable for tiny K. 1 - sqrt(1 - t^2) = t^2 / (1 + s).
        auto f00 = [&](double t, double omt) {
            const double s = std::sqrt(omt * (1.0 + t));
            return fermi(beta, h * t) * t * t / (1.0 + s);
        };
        auto fpi = [&](double t, double omt) {
            const double s = std::sqrt(omt * (1.0 + t));
            return 0.5 * std::tanh(0.5 * beta * h * t) * t * t / s;
        };
        const double thi = std::min(1.0, U / h);
        auto a = quad::tanh_sinh<double>(
            [&](double, double dl, double dr) { return f00(dl, thi == 1.0 ? dr : 1.0 - dl); },
            0.0, thi, opt);
        a.value *= h / z.pi00;
        a.abs_error *= h / z.pi00;
        // int_{pt/2}^inf f du in closed form
        const double tail = std::log1p(std::exp(-beta * h)) / beta;
        auto b = quad::tanh_sinh<double>(
            [&](double, double dl, double dr) { return fpi(dl, dr); }, 0.0, 1.0, opt);
        b.value *= h * pt / z.pi;
        b.abs_error *= h * pt / z.pi;
        const double pi_total = c * pt * z.pi * b.value;
        out.value = {c * (z.pi00 * a.value + tail), pi_total - z.pi};
        out.abs_error = c * (z.pi00 * a.abs_error + pt * z.pi * b.abs_error);
        out.evaluations = a.evaluations + b.evaluations;
        return out;
    }

    const auto params = kernels::MatsubaraParams::make(xi, vk * vk);
    std::vector<double> b00, bpi, fw;
    quad::BatchIntegrand<Real2> f = [&](const quad::NodeBatch& nb, std::span<Real2> v) {
        const std::size_t n = nb.size();
        b00.resize(n);
        bpi.resize(n);
        fw.resize(n);
        kernels::matsubara_brackets(params, nb.x, b00, bpi);
        kernels::fermi_weights(beta, nb.x, fw);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = {fw[i] * b00[i] / z.pi00, fw[i] * bpi[i] / z.pi};
    };

    quad::IntegralEstimate<Real2> acc;
    acc.value = {0.0, 0.0};
    const double split = 0.5 * params.pt;
    accumulate(acc, quad::tanh_sinh_batched<Real2>(f, 0.0, std::min(split, U), opt));
    if (split < U) accumulate(acc, quad::exp_sinh_batched<Real2>(f, split, 1.0 / beta, opt));

    out.value = {c * z.pi00 * acc.value[0], c * z.pi * acc.value[1]};
    out.abs_error = c * std::max(z.pi00, z.pi) * acc.abs_error;
    out.evaluations = acc.evaluations;
    return out;
}

MatsubaraPair total_imag(double xi, double K, double beta, const Model& m) {
    const MatsubaraPair z = zero_temperature_imag(xi, K, m);
    const ThermalMatsubara t = thermal_imag(xi, K, beta, m);
    return {z.pi00 + t.value.pi00, z.pi + t.value.pi};
}

cplx q_real_axis(double W, double K) {
    const double d = std::abs(K - W) * (K + W);
    return K >= W ? cplx(std::sqrt(d), 0.0) : cplx(0.0, -std::sqrt(d));
}

ReflectionPair reflection(double W, double K, const PolarizationPair& p) {
    const cplx q = q_real_axis(W, K);
    const double k2 = K * K;
    const cplx num_tm = q * p.pi00;
    const cplx den_tm = num_tm + 2.0 * k2;
    const cplx den_te = p.pi + 2.0 * k2 * q;
    if (den_tm == 0.0 || den_te == 0.0)
        throw SingularityError("reflection coefficient denominator vanished");
    return {num_tm / den_tm, -p.pi / den_te};
}

MatsubaraReflection reflection_imag(double xi, double K, const MatsubaraPair& p) {
    const double q = std::hypot(K, xi);
    const double k2 = K * K;
    const double den_tm = q * p.pi00 + 2.0 * k2;
    const double den_te = p.pi + 2.0 * k2 * q;
    if (den_tm == 0.0 || den_te == 0.0)
        throw SingularityError("reflection coefficient denominator vanished");
    return {q * p.pi00 / den_tm, -p.pi / den_te};
}

}  // namespace reduced

// ---------------------------------------------------------------------------

namespace {

double beta_of(double T, const PhysicalConstants& pc) {
    return T > 0 ? thermal_wavelength(T, pc) : reduced::kZeroTemperature;
}

void require(const SpectralPoint& pt, Regime r) {
    if (pt.regime != r)
        throw DomainError(std::string("expected a ") + regime_name(r) + " point, got " +
                          regime_name(pt.regime));
}

PolarizationPair with_hbar(const PolarizationPair& p, const PhysicalConstants& pc) {
    return {pc.hbar * p.pi00, pc.hbar * p.pi};
}

}  // namespace

PolarizationPair pi_zero_T_plasmonic(const SpectralPoint& pt, const PhysicalConstants& pc) {
    require(pt, Regime::Plasmonic);
    return with_hbar(reduced::zero_temperature(pt.omega / pc.c, pt.k_perp, Model::from(pc)), pc);
}

cplx pi00_thermal_plasmonic(const SpectralPoint& pt, const PhysicalConstants& pc,
                            double rel_tol) {
    require(pt, Regime::Plasmonic);
    const auto t = reduced::thermal(pt.omega / pc.c, pt.k_perp, beta_of(pt.T, pc),
                                    Model::from(pc, rel_tol));
    return pc.hbar * t.value.pi00;
}

cplx pi_thermal_plasmonic(const SpectralPoint& pt, const PhysicalConstants& pc, double rel_tol) {
    require(pt, Regime::Plasmonic);
    const auto t = reduced::thermal(pt.omega / pc.c, pt.k_perp, beta_of(pt.T, pc),
                                    Model::from(pc, rel_tol));
    return pc.hbar * t.value.pi;
}

PolarizationPair pi_far_evanescent(const SpectralPoint& pt, const PhysicalConstants& pc,
                                   double rel_tol) {
    require(pt, Regime::FarEvanescent);
    return with_hbar(reduced::total(pt.omega / pc.c, pt.k_perp, beta_of(pt.T, pc),
                                    Model::from(pc, rel_tol)),
                     pc);
}

MatsubaraPair pi_matsubara(int l, double k_perp, double T, const PhysicalConstants& pc,
                           double rel_tol) {
    if (l < 0) throw DomainError("negative Matsubara index");
    if (!(k_perp > 0)) throw DomainError("transverse wavenumber must be positive");
    if (!(T >= 0)) throw DomainError("temperature must be nonnegative");
    const double xi = T > 0 ? matsubara_frequency(l, T, pc) / pc.c : 0.0;
    const auto p = reduced::total_imag(xi, k_perp, beta_of(T, pc), Model::from(pc, rel_tol));
    return {pc.hbar * p.pi00, pc.hbar * p.pi};
}

PolarizationPair polarization(const SpectralPoint& pt, const PhysicalConstants& pc,
                              double rel_tol) {
    const Model m = Model::from(pc, rel_tol);
    const double beta = beta_of(pt.T, pc);
    if (pt.regime == Regime::MatsubaraAxis) {
        const auto p = reduced::total_imag(pt.omega / pc.c, pt.k_perp, beta, m);
        return {cplx(pc.hbar * p.pi00, 0.0), cplx(pc.hbar * p.pi, 0.0)};
    }
    return with_hbar(reduced::total(pt.omega / pc.c, pt.k_perp, beta, m), pc);
}

ReflectionPair reflection(const SpectralPoint& pt, const PhysicalConstants& pc, double rel_tol) {
    const Model m = Model::from(pc, rel_tol);
    const double beta = beta_of(pt.T, pc);
    const double W = pt.omega / pc.c;
    if (pt.regime == Regime::MatsubaraAxis) {
        const auto r =
            reduced::reflection_imag(W, pt.k_perp, reduced::total_imag(W, pt.k_perp, beta, m));
        return {cplx(r.r_tm, 0.0), cplx(r.r_te, 0.0)};
    }
    return reduced::reflection(W, pt.k_perp, reduced::total(W, pt.k_perp, beta, m));
}

}  // namespace neqcp::graphene
