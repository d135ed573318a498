#include "neqcp/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define NEQCP_HAVE_AVX2_TARGET 1
#endif

namespace neqcp::kernels {

#ifdef NEQCP_HAVE_AVX2_TARGET

namespace {

struct V {
    __m256d re, im;
};

__attribute__((target("avx2"))) inline __m256d vabs(__m256d x) {
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
}

__attribute__((target("avx2"))) inline __m256d vcopysign(__m256d mag, __m256d sgn) {
    const __m256d m = _mm256_set1_pd(-0.0);
    return _mm256_or_pd(_mm256_andnot_pd(m, mag), _mm256_and_pd(m, sgn));
}

// Lane-wise copy of the scalar csqrt; both branches evaluated, then blended.
__attribute__((target("avx2"))) inline V vcsqrt(__m256d x, __m256d y) {
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d r = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(x, x), _mm256_mul_pd(y, y)));
    const __m256d tp = _mm256_sqrt_pd(_mm256_mul_pd(_mm256_add_pd(r, x), half));
    const __m256d tn = _mm256_sqrt_pd(_mm256_mul_pd(_mm256_sub_pd(r, x), half));
    const __m256d re_p = tp;
    const __m256d im_p = _mm256_div_pd(y, _mm256_add_pd(tp, tp));
    const __m256d re_n = _mm256_div_pd(vabs(y), _mm256_add_pd(tn, tn));
    const __m256d im_n = vcopysign(tn, y);
    const __m256d nonneg = _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_GE_OQ);
    return {_mm256_blendv_pd(re_n, re_p, nonneg), _mm256_blendv_pd(im_n, im_p, nonneg)};
}

}  // namespace

__attribute__((target("avx2"))) void matsubara_brackets_avx2(const MatsubaraParams& p,
                                                            std::span<const double> u,
                                                            std::span<double> b00,
                                                            std::span<double> bpi) {
    const std::size_t n = u.size();
    const std::size_t nv = n - n % 4;
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d four = _mm256_set1_pd(4.0);
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d xi = _mm256_set1_pd(p.xi);
    const __m256d xi2 = _mm256_set1_pd(p.xi2);
    const __m256d pt = _mm256_set1_pd(p.pt);
    const __m256d eps2 = _mm256_set1_pd(p.eps2);
    const __m256d sx = _mm256_set1_pd(p.sx);
    const __m256d xisx = _mm256_set1_pd(p.xi * p.sx);

    for (std::size_t i = 0; i < nv; i += 4) {
        const __m256d ui = _mm256_loadu_pd(u.data() + i);
        const __m256d u2 = _mm256_mul_pd(_mm256_mul_pd(four, ui), ui);
        const __m256d a2r = _mm256_sub_pd(xi2, u2);
        const __m256d a2i = _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(-4.0), ui), xi);
        const __m256d mod2 = _mm256_add_pd(xi2, u2);
        const __m256d two_u = _mm256_mul_pd(two, ui);

        // series branch
        const __m256d inv = _mm256_div_pd(eps2, _mm256_mul_pd(mod2, mod2));
        const __m256d yr = _mm256_mul_pd(a2r, inv);
        const __m256d yi = _mm256_mul_pd(_mm256_sub_pd(_mm256_setzero_pd(), a2i), inv);
        const V sq = vcsqrt(_mm256_add_pd(one, yr), yi);
        const __m256d dr = _mm256_add_pd(one, sq.re);
        const __m256d di = sq.im;
        const __m256d dd = _mm256_add_pd(_mm256_mul_pd(dr, dr), _mm256_mul_pd(di, di));
        const __m256d syr =
            _mm256_div_pd(_mm256_add_pd(_mm256_mul_pd(yr, dr), _mm256_mul_pd(yi, di)), dd);
        const __m256d syi =
            _mm256_div_pd(_mm256_sub_pd(_mm256_mul_pd(yi, dr), _mm256_mul_pd(yr, di)), dd);
        const __m256d a_sy = _mm256_add_pd(_mm256_mul_pd(xi, syr), _mm256_mul_pd(two_u, syi));
        const __m256d s_b00 = _mm256_div_pd(_mm256_sub_pd(xisx, a_sy), pt);
        const __m256d nr = _mm256_sub_pd(sx, syr);
        const __m256d ni = _mm256_sub_pd(_mm256_setzero_pd(), syi);
        const __m256d qq = _mm256_add_pd(_mm256_mul_pd(sq.re, sq.re), _mm256_mul_pd(sq.im, sq.im));
        const __m256d rr = _mm256_div_pd(
            _mm256_add_pd(_mm256_mul_pd(nr, sq.re), _mm256_mul_pd(ni, sq.im)), qq);
        const __m256d ri = _mm256_div_pd(
            _mm256_sub_pd(_mm256_mul_pd(ni, sq.re), _mm256_mul_pd(nr, sq.im)), qq);
        const __m256d s_bpi =
            _mm256_mul_pd(xi, _mm256_add_pd(_mm256_mul_pd(xi, rr), _mm256_mul_pd(two_u, ri)));

        // direct branch
        const V s = vcsqrt(_mm256_add_pd(eps2, a2r), a2i);
        const __m256d d_b00 = _mm256_sub_pd(one, _mm256_div_pd(s.re, pt));
        const __m256d zr = _mm256_sub_pd(u2, xi2);
        const __m256d zi = _mm256_mul_pd(_mm256_mul_pd(four, ui), xi);
        const __m256d ss = _mm256_add_pd(_mm256_mul_pd(s.re, s.re), _mm256_mul_pd(s.im, s.im));
        const __m256d re = _mm256_div_pd(
            _mm256_add_pd(_mm256_mul_pd(zr, s.re), _mm256_mul_pd(zi, s.im)), ss);
        const __m256d d_bpi = _mm256_sub_pd(_mm256_sub_pd(_mm256_setzero_pd(), xi2),
                                            _mm256_mul_pd(pt, re));

        const __m256d use_series = _mm256_cmp_pd(eps2, _mm256_mul_pd(half, mod2), _CMP_LE_OQ);
        _mm256_storeu_pd(b00.data() + i, _mm256_blendv_pd(d_b00, s_b00, use_series));
        _mm256_storeu_pd(bpi.data() + i, _mm256_blendv_pd(d_bpi, s_bpi, use_series));
    }
    if (nv < n)
        matsubara_brackets_scalar(p, u.subspan(nv), b00.subspan(nv), bpi.subspan(nv));
}

#else

void matsubara_brackets_avx2(const MatsubaraParams& p, std::span<const double> u,
                             std::span<double> b00, std::span<double> bpi) {
    matsubara_brackets_scalar(p, u, b00, bpi);
}

#endif

}  // namespace neqcp::kernels
