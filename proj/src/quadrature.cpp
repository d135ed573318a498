#include "neqcp/quadrature.hpp"

#include <numbers>

namespace neqcp::quad::detail {

namespace {

constexpr int kMaxLevel = 10;
constexpr double kHalfPi = std::numbers::pi / 2;

// tanh-sinh: x = tanh(pi/2 sinh t). Beyond t = 6 the complement underflows.
constexpr double kTanhSinhTmax = 6.0;
// exp-sinh: x = exp(pi/2 sinh t). t = -6.5 reaches ~1e-226 of the scale,
// t = 3.2 reaches ~1e10 of it; the dynamic cut trims both.
constexpr double kExpSinhTmin = -6.5;
constexpr double kExpSinhTmax = 3.2;

DeNode tanh_sinh_node(double t) {
    const double s = kHalfPi * std::sinh(t);
    const double ch = std::cosh(s);
    return {t, std::exp(-s) / ch, kHalfPi * std::cosh(t) / (ch * ch)};
}

DeNode exp_sinh_node(double t) {
    const double s = kHalfPi * std::sinh(t);
    const double e = std::exp(s);
    return {t, e, kHalfPi * std::cosh(t) * e};
}

template <class Make>
std::vector<std::vector<DeNode>> build(double tmin, double tmax, Make make) {
    std::vector<std::vector<DeNode>> table(kMaxLevel + 1);
    for (int level = 0; level <= kMaxLevel; ++level) {
        const double h = std::ldexp(1.0, -level);
        const long jmin = static_cast<long>(std::ceil(tmin / h));
        const long jmax = static_cast<long>(std::floor(tmax / h));
        for (long j = jmin; j <= jmax; ++j) {
            if (level > 0 && j % 2 == 0) continue;
            table[level].push_back(make(j * h));
        }
    }
    return table;
}

}  // namespace

const std::vector<std::vector<DeNode>>& tanh_sinh_table() {
    static const auto table = build(0.0, kTanhSinhTmax, tanh_sinh_node);
    return table;
}

const std::vector<std::vector<DeNode>>& exp_sinh_table() {
    static const auto table = build(kExpSinhTmin, kExpSinhTmax, exp_sinh_node);
    return table;
}

}  // namespace neqcp::quad::detail
