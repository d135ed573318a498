#include <cmath>
#include <cstdlib>
#include <string>

#include "neqcp/kernels.hpp"

namespace neqcp::kernels {

namespace {

// Principal square root of x + iy from real operations only; mirrored lane
// for lane by the AVX2 variant.
inline void csqrt(double x, double y, double& re, double& im) {
    const double r = std::sqrt(x * x + y * y);
    if (x >= 0.0) {
        const double t = std::sqrt((r + x) * 0.5);
        re = t;
        im = y / (t + t);
    } else {
        const double t = std::sqrt((r - x) * 0.5);
        re = std::fabs(y) / (t + t);
        im = std::copysign(t, y);
    }
}

}  // namespace

MatsubaraParams MatsubaraParams::make(double xi, double eps2) {
    MatsubaraParams p;
    p.xi = xi;
    p.xi2 = xi * xi;
    p.eps2 = eps2;
    p.pt = std::sqrt(eps2 + p.xi2);
    const double x = eps2 / p.xi2;
    p.sx = x / (1.0 + std::sqrt(1.0 + x));
    return p;
}

void matsubara_brackets_scalar(const MatsubaraParams& p, std::span<const double> u,
                               std::span<double> b00, std::span<double> bpi) {
    const std::size_t n = u.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double ui = u[i];
        const double u2 = 4.0 * ui * ui;
        const double a2r = p.xi2 - u2;          // Re (xi - 2iu)^2
        const double a2i = -4.0 * ui * p.xi;    // Im (xi - 2iu)^2
        const double mod2 = p.xi2 + u2;         // |xi - 2iu|^2
        if (p.eps2 <= 0.5 * mod2) {
            // S = A sqrt(1 + y), y = eps2 / A^2, A = xi - 2iu
            const double inv = p.eps2 / (mod2 * mod2);
            const double yr = a2r * inv;
            const double yi = -a2i * inv;
            double sqr, sqi;
            csqrt(1.0 + yr, yi, sqr, sqi);
            // sy = y / (1 + sq)
            const double dr = 1.0 + sqr, di = sqi;
            const double dd = dr * dr + di * di;
            const double syr = (yr * dr + yi * di) / dd;
            const double syi = (yi * dr - yr * di) / dd;
            // Re(A sy) with A = xi - 2iu
            const double a_sy = p.xi * syr + 2.0 * ui * syi;
            b00[i] = (p.xi * p.sx - a_sy) / p.pt;
            // (sx - sy) / sq
            const double nr = p.sx - syr, ni = -syi;
            const double qq = sqr * sqr + sqi * sqi;
            const double rr = (nr * sqr + ni * sqi) / qq;
            const double ri = (ni * sqr - nr * sqi) / qq;
            bpi[i] = p.xi * (p.xi * rr + 2.0 * ui * ri);
        } else {
            double sr, si;
            csqrt(p.eps2 + a2r, a2i, sr, si);
            b00[i] = 1.0 - sr / p.pt;
            // Re(z^2 / S), z^2 = (4u^2 - xi^2) + i 4u xi
            const double zr = u2 - p.xi2, zi = 4.0 * ui * p.xi;
            const double ss = sr * sr + si * si;
            const double re = (zr * sr + zi * si) / ss;
            bpi[i] = -p.xi2 - p.pt * re;
        }
    }
}

void fermi_weights(double beta, std::span<const double> u, std::span<double> out) {
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = 1.0 / (std::exp(beta * u[i]) + 1.0);
}

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool isa_supported(Isa isa) {
    if (isa == Isa::Scalar) return true;
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa active_isa() {
    static const Isa isa = [] {
        if (const char* env = std::getenv("NEQCP_SIMD")) {
            const std::string v(env);
            if (v == "scalar") return Isa::Scalar;
            if (v == "avx2" && isa_supported(Isa::Avx2)) return Isa::Avx2;
        }
        return isa_supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
    }();
    return isa;
}

void matsubara_brackets(const MatsubaraParams& p, std::span<const double> u,
                        std::span<double> b00, std::span<double> bpi) {
    if (active_isa() == Isa::Avx2)
        matsubara_brackets_avx2(p, u, b00, bpi);
    else
        matsubara_brackets_scalar(p, u, b00, bpi);
}

}  // namespace neqcp::kernels
