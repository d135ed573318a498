#pragma once

// Double-exponential and Gauss-Kronrod integration.
//
// Integrands may be written against a single abscissa, f(x), or against a
// batch of nodes. Batched integrands receive, per node, the abscissa and its
// exact distance to each end of the interval; integrands with square-root
// endpoint behaviour should build their singular factor from those distances
// rather than from x - a, which loses all precision near the end.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace neqcp::quad {

template <class T>
struct IntegralEstimate {
    T value{};
    double abs_error = 0.0;
    std::size_t evaluations = 0;
};

class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(const std::string& what, double best_magnitude, double abs_error)
        : std::runtime_error(what), best_magnitude(best_magnitude), abs_error(abs_error) {}
    double best_magnitude;
    double abs_error;
};

class SingularityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    double rel_tol = 1e-8;
    double abs_tol = 0.0;
    std::size_t max_evaluations = 1'000'000;
};

inline constexpr double kTensorRelTol = 1e-8;
inline constexpr double kForceRelTol = 1e-6;

// ---------------------------------------------------------------------------
// Value algebra. Scalars use their modulus; arrays are checked per component
// so that quantities of very different size can share one set of nodes.

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(std::complex<double> v) { return std::abs(v); }
template <class U, std::size_t N>
double magnitude(const std::array<U, N>& v) {
    double m = 0.0;
    for (const auto& c : v) m = std::max(m, magnitude(c));
    return m;
}

inline bool within(double diff, double value, double rel, double abs) {
    return std::abs(diff) <= std::max(rel * std::abs(value), abs);
}
inline bool within(std::complex<double> diff, std::complex<double> value, double rel,
                   double abs) {
    return std::abs(diff) <= std::max(rel * std::abs(value), abs);
}
template <class U, std::size_t N>
bool within(const std::array<U, N>& diff, const std::array<U, N>& value, double rel,
            double abs) {
    for (std::size_t i = 0; i < N; ++i)
        if (!within(diff[i], value[i], rel, abs)) return false;
    return true;
}

template <class U, std::size_t N>
std::array<U, N> operator+(std::array<U, N> a, const std::array<U, N>& b) {
    for (std::size_t i = 0; i < N; ++i) a[i] += b[i];
    return a;
}
template <class U, std::size_t N>
std::array<U, N> operator-(std::array<U, N> a, const std::array<U, N>& b) {
    for (std::size_t i = 0; i < N; ++i) a[i] -= b[i];
    return a;
}
template <class U, std::size_t N>
std::array<U, N> operator*(double s, std::array<U, N> a) {
    for (auto& c : a) c *= s;
    return a;
}

// ---------------------------------------------------------------------------

/// Abscissae handed to a batched integrand. dist_left = x - a and
/// dist_right = b - x are exact; dist_right is +inf on half-lines.
struct NodeBatch {
    std::vector<double> x, dist_left, dist_right;
    void clear() {
        x.clear();
        dist_left.clear();
        dist_right.clear();
    }
    void push(double xi, double dl, double dr) {
        x.push_back(xi);
        dist_left.push_back(dl);
        dist_right.push_back(dr);
    }
    std::size_t size() const { return x.size(); }
};

template <class T>
using BatchIntegrand = std::function<void(const NodeBatch&, std::span<T>)>;

namespace detail {

struct DeNode {
    double t;
    double comp;    // tanh-sinh: 1 - tanh(s); exp-sinh: exp(s)
    double weight;  // dx/dt with the interval scale stripped
};

// Per-level node tables, t >= 0 only for tanh-sinh; both signs for exp-sinh.
const std::vector<std::vector<DeNode>>& tanh_sinh_table();
const std::vector<std::vector<DeNode>>& exp_sinh_table();

inline constexpr int kMinLevel = 3;
inline constexpr double kNegligible = 1e-22;

template <class T>
T zero_like() {
    return T{};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Tanh-sinh on [a, b]. Handles integrable (up to inverse-square-root)
// endpoint singularities; throws SingularityError when the transformed
// integrand fails to decay at the ends.

template <class T>
IntegralEstimate<T> tanh_sinh_batched(const BatchIntegrand<T>& f, double a, double b,
                                      const Options& opt = {}) {
    IntegralEstimate<T> est;
    if (a == b) return est;
    if (!(b > a)) throw std::invalid_argument("tanh_sinh: b < a");
    const auto& table = detail::tanh_sinh_table();
    const double width = b - a;
    const double half = 0.5 * width;
    const double centre = a + half;

    NodeBatch batch;
    std::vector<T> vals;
    std::vector<double> weights, ts;
    std::vector<int> sides;  // -1 left, 0 centre, +1 right
    double cut_left = std::numeric_limits<double>::infinity();
    double cut_right = cut_left;

    T sum = detail::zero_like<T>();
    T prev = sum;
    double h = 1.0;
    for (std::size_t level = 0; level < table.size(); ++level) {
        if (level > 0) h *= 0.5;
        batch.clear();
        weights.clear();
        ts.clear();
        sides.clear();
        for (const auto& n : table[level]) {
            if (n.t == 0.0) {
                batch.push(centre, half, half);
                weights.push_back(n.weight);
                ts.push_back(0.0);
                sides.push_back(0);
                continue;
            }
            const double d = half * n.comp;
            if (!(d > 0.0)) continue;
            if (n.t <= cut_left) {
                batch.push(a + d, d, width - d);
                weights.push_back(n.weight);
                ts.push_back(n.t);
                sides.push_back(-1);
            }
            if (n.t <= cut_right) {
                batch.push(b - d, width - d, d);
                weights.push_back(n.weight);
                ts.push_back(n.t);
                sides.push_back(1);
            }
        }
        vals.assign(batch.size(), detail::zero_like<T>());
        f(batch, std::span<T>(vals));
        est.evaluations += batch.size();
        for (std::size_t i = 0; i < vals.size(); ++i) sum = sum + weights[i] * vals[i];

        if (level == 0) {
            const double total = magnitude(sum);
            if (!std::isfinite(total))
                throw SingularityError("tanh_sinh: non-finite integrand value");
            double big_left = 0.0, big_right = 0.0, edge_left = 0.0, edge_right = 0.0;
            double tmax = 0.0;
            for (std::size_t i = 0; i < vals.size(); ++i) {
                if (sides[i] == 0) continue;
                const double c = magnitude(weights[i] * vals[i]);
                const bool big = c > detail::kNegligible * total;
                if (sides[i] < 0) {
                    if (big) big_left = ts[i];
                    if (ts[i] >= tmax) edge_left = c;
                } else {
                    if (big) big_right = ts[i];
                    if (ts[i] >= tmax) edge_right = c;
                }
                tmax = std::max(tmax, ts[i]);
            }
            if (total > 0 && (edge_left > 1e-3 * total || edge_right > 1e-3 * total))
                throw SingularityError("tanh_sinh: integrand singularity is not integrable");
            cut_left = std::min(big_left + 1.0, tmax);
            cut_right = std::min(big_right + 1.0, tmax);
        }

        const T estimate = (half * h) * sum;
        if (level >= static_cast<std::size_t>(detail::kMinLevel)) {
            const T diff = estimate - prev;
            if (within(diff, estimate, opt.rel_tol, opt.abs_tol)) {
                est.value = estimate;
                est.abs_error = magnitude(diff);
                return est;
            }
        }
        if (est.evaluations > opt.max_evaluations) break;
        prev = estimate;
    }
    throw BudgetExceeded("tanh_sinh: tolerance not met within evaluation budget",
                         magnitude((half * h) * sum), magnitude((half * h) * sum - prev));
}

template <class F>
concept DistanceAwareIntegrand = requires(F f, double x) { f(x, x, x); };

/// Pointwise integrands f(x) lose the nodes that round onto an end, which
/// caps accuracy near 1e-8 for inverse-square-root ends. Integrands written
/// as f(x, dist_left, dist_right) see every node.
template <class T, class F>
IntegralEstimate<T> tanh_sinh(F&& f, double a, double b, const Options& opt = {}) {
    BatchIntegrand<T> bf = [&f, a, b](const NodeBatch& nb, std::span<T> out) {
        for (std::size_t i = 0; i < nb.size(); ++i) {
            const double x = nb.x[i];
            if constexpr (DistanceAwareIntegrand<F>)
                out[i] = T(f(x, nb.dist_left[i], nb.dist_right[i]));
            else
                out[i] = (x > a && x < b) ? T(f(x)) : T{};
        }
    };
    return tanh_sinh_batched<T>(bf, a, b, opt);
}

// ---------------------------------------------------------------------------
// Exp-sinh on [a, inf) with the abscissa scale set by `scale`. The left end
// may carry an integrable singularity.

template <class T>
IntegralEstimate<T> exp_sinh_batched(const BatchIntegrand<T>& f, double a, double scale,
                                     const Options& opt = {}) {
    if (!(scale > 0)) throw std::invalid_argument("exp_sinh: scale must be positive");
    IntegralEstimate<T> est;
    const auto& table = detail::exp_sinh_table();
    NodeBatch batch;
    std::vector<T> vals;
    std::vector<double> weights;
    double t_lo = -std::numeric_limits<double>::infinity();
    double t_hi = std::numeric_limits<double>::infinity();
    double tail = 0.0;

    T sum = detail::zero_like<T>();
    T prev = sum;
    double h = 1.0;
    for (std::size_t level = 0; level < table.size(); ++level) {
        if (level > 0) h *= 0.5;
        batch.clear();
        weights.clear();
        std::vector<double> ts;
        for (const auto& n : table[level]) {
            if (n.t < t_lo || n.t > t_hi) continue;
            const double d = scale * n.comp;
            if (!(d > 0.0) || !std::isfinite(d)) continue;
            batch.push(a + d, d, std::numeric_limits<double>::infinity());
            weights.push_back(scale * n.weight);
            ts.push_back(n.t);
        }
        vals.assign(batch.size(), detail::zero_like<T>());
        f(batch, std::span<T>(vals));
        est.evaluations += batch.size();
        T level_sum = detail::zero_like<T>();
        for (std::size_t i = 0; i < vals.size(); ++i) {
            const T c = weights[i] * vals[i];
            level_sum = level_sum + c;
        }
        sum = sum + level_sum;

        if (level == 0) {
            const double total = magnitude(sum);
            if (!std::isfinite(total))
                throw SingularityError("exp_sinh: non-finite integrand value");
            double first = 0.0, last = 0.0;
            bool seen = false;
            double last_contrib = 0.0;
            for (std::size_t i = 0; i < vals.size(); ++i) {
                const double c = magnitude(weights[i] * vals[i]);
                if (c > detail::kNegligible * total) {
                    if (!seen) first = ts[i];
                    seen = true;
                    last = ts[i];
                    last_contrib = c;
                }
            }
            if (total > 0 && magnitude(weights.front() * vals.front()) > 1e-3 * total)
                throw SingularityError("exp_sinh: integrand singularity is not integrable");
            if (seen) {
                t_lo = first - 1.0;
                t_hi = last + 1.0;
            }
            // exponential decay past the last kept node: tail below one spacing
            tail = (t_hi < ts.back()) ? 0.0 : last_contrib;
        }

        const T estimate = h * sum;
        if (level >= static_cast<std::size_t>(detail::kMinLevel)) {
            const T diff = estimate - prev;
            if (within(diff, estimate, opt.rel_tol, opt.abs_tol)) {
                est.value = estimate;
                est.abs_error = magnitude(diff) + tail;
                return est;
            }
        }
        if (est.evaluations > opt.max_evaluations) break;
        prev = estimate;
    }
    throw BudgetExceeded("exp_sinh: tolerance not met within evaluation budget",
                         magnitude(h * sum), magnitude(h * sum - prev));
}

template <class T, class F>
IntegralEstimate<T> exp_sinh(F&& f, double a, double scale, const Options& opt = {}) {
    BatchIntegrand<T> bf = [&f, a](const NodeBatch& nb, std::span<T> out) {
        for (std::size_t i = 0; i < nb.size(); ++i)
            out[i] = (nb.x[i] > a) ? T(f(nb.x[i])) : T{};
    };
    return exp_sinh_batched<T>(bf, a, scale, opt);
}

// ---------------------------------------------------------------------------
// Adaptive 15-point Gauss-Kronrod on [a, b]. The integrand may return either
// a value or an IntegralEstimate (nested integrals); in the latter case the
// weighted inner errors are carried into the total.

namespace detail {
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class R>
struct unwrap {
    using type = R;
    static const R& value(const R& r) { return r; }
    static double error(const R&) { return 0.0; }
    static std::size_t evals(const R&) { return 0; }
};
template <class T>
struct unwrap<IntegralEstimate<T>> {
    using type = T;
    static const T& value(const IntegralEstimate<T>& r) { return r.value; }
    static double error(const IntegralEstimate<T>& r) { return r.abs_error; }
    static std::size_t evals(const IntegralEstimate<T>& r) { return r.evaluations; }
};

template <class T>
struct Segment {
    double a, b;
    T value;
    double error;        // Kronrod-vs-Gauss
    double inner_error;  // sum |w| * inner abs_error
};

}  // namespace detail

template <class F>
auto gauss_kronrod(F&& f, double a, double b, const Options& opt = {}, int max_depth = 40)
    -> IntegralEstimate<typename detail::unwrap<std::decay_t<decltype(f(a))>>::type> {
    using R = std::decay_t<decltype(f(a))>;
    using U = detail::unwrap<R>;
    using T = typename U::type;
    IntegralEstimate<T> est;
    if (a == b) return est;

    auto rule = [&](double lo, double hi) {
        const double c = 0.5 * (lo + hi), hw = 0.5 * (hi - lo);
        T k = detail::zero_like<T>(), g = detail::zero_like<T>();
        double inner = 0.0;
        for (std::size_t i = 0; i < 8; ++i) {
            const double dx = hw * detail::kXgk[i];
            if (i == 7) {
                const R r = f(c);
                k = k + detail::kWgk[i] * U::value(r);
                g = g + detail::kWg[3] * U::value(r);
                inner += detail::kWgk[i] * U::error(r);
                est.evaluations += 1 + U::evals(r);
                continue;
            }
            const R r1 = f(c - dx);
            const R r2 = f(c + dx);
            const T s = U::value(r1) + U::value(r2);
            k = k + detail::kWgk[i] * s;
            if (i % 2 == 1) g = g + detail::kWg[i / 2] * s;
            inner += detail::kWgk[i] * (U::error(r1) + U::error(r2));
            est.evaluations += 2 + U::evals(r1) + U::evals(r2);
        }
        return detail::Segment<T>{lo, hi, hw * k, magnitude(hw * (k - g)), hw * inner};
    };

    std::vector<detail::Segment<T>> segs{rule(a, b)};
    for (int iter = 0;; ++iter) {
        T total = detail::zero_like<T>();
        double err = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            total = total + segs[i].value;
            err += segs[i].error;
            if (segs[i].error > segs[worst].error) worst = i;
        }
        if (err <= std::max(opt.rel_tol * magnitude(total), opt.abs_tol) || err == 0.0) {
            double inner = 0.0;
            for (const auto& s : segs) inner += s.inner_error;
            est.value = total;
            est.abs_error = std::hypot(err, inner);
            return est;
        }
        if (est.evaluations > opt.max_evaluations || iter > 100000)
            throw BudgetExceeded("gauss_kronrod: tolerance not met within evaluation budget",
                                 magnitude(total), err);
        const auto s = segs[worst];
        const double mid = 0.5 * (s.a + s.b);
        if (!(mid > s.a && mid < s.b) || segs.size() > static_cast<std::size_t>(1) << max_depth)
            throw BudgetExceeded("gauss_kronrod: interval cannot be subdivided further",
                                 magnitude(total), err);
        segs[worst] = rule(s.a, mid);
        segs.push_back(rule(mid, s.b));
    }
}

// ---------------------------------------------------------------------------
// Spec-level entry points.

/// Integral over [lower, inf) of an integrand that eventually decays like
/// exp(-x / decay_scale). Remaining tail beyond the last kept node is
/// bounded and folded into abs_error.
template <class T = double, class F>
IntegralEstimate<T> integrate_decaying_tail(F&& f, double lower, double decay_scale,
                                            double rel_tol = kTensorRelTol,
                                            std::size_t budget = 1'000'000) {
    Options opt{rel_tol, 0.0, budget};
    return exp_sinh<T>(std::forward<F>(f), lower, decay_scale, opt);
}

/// Integral over [a, b] where the flagged ends may carry integrable
/// (at worst inverse-square-root) singularities. The tanh-sinh rule clusters
/// nodes at both ends regardless of the flags; they document intent and
/// select the non-integrability check.
template <class T = double, class F>
IntegralEstimate<T> integrate_endpoint_singular(F&& f, double a, double b, bool singular_left,
                                                bool singular_right,
                                                double rel_tol = kTensorRelTol,
                                                std::size_t budget = 1'000'000) {
    (void)singular_left;
    (void)singular_right;
    Options opt{rel_tol, 0.0, budget};
    return tanh_sinh<T>(std::forward<F>(f), a, b, opt);
}

/// Outer integral over (0, omega_max] of an integrand returning an inner
/// IntegralEstimate<double>. omega_max may be +inf, in which case `scale`
/// sets where the outer integrand lives. Total error is the
/// root-sum-square of the outer Kronrod error and the weighted inner errors.
template <class F>
IntegralEstimate<double> integrate_double(F&& outer, double omega_max,
                                          double rel_tol = kForceRelTol,
                                          std::size_t budget = 1'000'000, double scale = 1.0) {
    Options opt{rel_tol, 0.0, budget};
    if (std::isinf(omega_max)) {
        // omega = scale * t / (1 - t)
        auto mapped = [&outer, scale](double t) {
            const double om = 1.0 - t;
            const double w = scale * t / om;
            auto r = outer(w);
            const double jac = scale / (om * om);
            r.value *= jac;
            r.abs_error *= jac;
            return r;
        };
        return gauss_kronrod(mapped, 0.0, 1.0, opt);
    }
    return gauss_kronrod(std::forward<F>(outer), 0.0, omega_max, opt);
}

}  // namespace neqcp::quad
