#include "fdlab/cesaro.hpp"

#include "fdlab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace fdlab::cesaro {

bool is_nonpositive_integer(double a) {
    return a <= 0.0 && a == std::floor(a);
}

int gamma_sign(double x) {
    if (x > 0.0) return 1;
    if (is_nonpositive_integer(x)) throw DomainError("gamma_sign: pole of Gamma");
    // Gamma alternates sign on (-k-1, -k): negative on (-1,0), positive on
    // (-2,-1), and so on.
    long k = static_cast<long>(std::floor(-x));
    return (k % 2 == 0) ? -1 : 1;
}

double number(double a, long n) {
    if (n < 0) throw DomainError("cesaro::number: negative index");
    double v = 1.0;
    for (long j = 1; j <= n; ++j) v *= (j + a - 1.0) / j;
    return v;
}

double number_gamma(double a, long n) {
    if (n < 0) throw DomainError("cesaro::number_gamma: negative index");
    if (is_nonpositive_integer(a))
        throw DomainError("cesaro::number_gamma: order is a nonpositive integer");
    const long double la = static_cast<long double>(a);
    const long double ln = static_cast<long double>(n);
    // Differences of lgamma at ~1e4 lose ~1e-11 in plain double; the 64-bit
    // mantissa of long double keeps the ratio at ~1e-13 relative.
    long double lg = lgammal(ln + la) - lgammal(la) - lgammal(ln + 1.0L);
    int sign = 1;
    double na = static_cast<double>(n) + a;
    sign *= (na > 0.0) ? 1 : gamma_sign(na);
    sign *= (a > 0.0) ? 1 : gamma_sign(a);
    return static_cast<double>(sign * expl(lg));
}

std::vector<double> coefficients(double a, std::size_t count) {
    if (count == 0) throw DomainError("cesaro::coefficients: need count >= 1");
    std::vector<double> out(count);
    out[0] = 1.0;
    for (std::size_t n = 1; n < count; ++n)
        out[n] = out[n - 1] * (n + a - 1.0) / static_cast<double>(n);
    return out;
}

series::CoefficientSeries sequence(const CesaroParams& params) {
    if (params.length < 1) throw DomainError("cesaro::sequence: length >= 1 required");
    std::vector<double> c = coefficients(params.order, params.length);
    const double a = params.order;
    // Fit |k^a(n)| <= C n^{a-1} over the last 10% of the head, with a factor
    // of 2 on top since the asymptotic only promises 1 + O(1/n).
    double fitted = 0.0;
    std::size_t start = params.length - std::max<std::size_t>(1, params.length / 10);
    start = std::max<std::size_t>(start, 1);
    for (std::size_t n = start; n < params.length; ++n) {
        double scaled = std::fabs(c[n]) * std::pow(static_cast<double>(n), 1.0 - a);
        fitted = std::max(fitted, scaled);
    }
    if (fitted == 0.0) {
        // Identically zero tail (a a nonpositive integer with length past the
        // zero pattern), or too short a head to fit: fall back to 1/|Gamma(a)|
        // when defined.
        if (!is_nonpositive_integer(a))
            fitted = std::fabs(number_gamma(a, std::max<long>(4, static_cast<long>(params.length)))) *
                     std::pow(static_cast<double>(std::max<long>(4, static_cast<long>(params.length))), 1.0 - a);
    }
    return series::CoefficientSeries(std::move(c), series::TailModel{2.0 * fitted, a - 1.0});
}

GautschiBounds gautschi_bounds(double a, long n) {
    if (!(a > 0.0 && a <= 1.0)) throw DomainError("gautschi_bounds: need a in (0,1]");
    if (n < 1) throw DomainError("gautschi_bounds: need n >= 1");
    double ga = std::tgamma(a);
    return {std::pow(static_cast<double>(n) + 1.0, a - 1.0) / ga,
            std::pow(static_cast<double>(n), a - 1.0) / ga};
}

double sin_pi(double x) {
    double r = x - std::nearbyint(x);
    double s = std::sin(M_PI * r);
    long k = static_cast<long>(std::llrint(x - r));
    return (k % 2 == 0) ? s : -s;
}

} // namespace fdlab::cesaro
