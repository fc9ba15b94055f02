#ifndef FDLAB_CESARO_HPP
#define FDLAB_CESARO_HPP

#include "fdlab/series.hpp"

#include <cstddef>
#include <vector>

namespace fdlab::cesaro {

struct CesaroParams {
    double order;       // exponent a
    std::size_t length; // number of coefficients, >= 1
};

// k^a(n): n-th Taylor coefficient of (1-t)^{-a}, by the multiplicative
// recurrence k^a(n) = k^a(n-1)(n+a-1)/n, k^a(0) = 1. Total in a; for
// a = -q (q a nonnegative integer) this yields (-1)^n binom(q,n) for n <= q
// and exact zeros beyond.
double number(double a, long n);

// Same value through the ratio Gamma(n+a)/(Gamma(a)Gamma(n+1)), evaluated
// with sign-tracked log-Gamma in extended precision. Throws DomainError when
// a is a nonpositive integer.
double number_gamma(double a, long n);

// k^a(0..count-1) by the recurrence.
std::vector<double> coefficients(double a, std::size_t count);

// Coefficients plus a fitted power-law tail model with exponent a-1.
series::CoefficientSeries sequence(const CesaroParams& params);

struct GautschiBounds {
    double lower;
    double upper;
};

// ((n+1)^{a-1}/Gamma(a), n^{a-1}/Gamma(a)); brackets k^a(n) for 0<a<=1, n>=1.
GautschiBounds gautschi_bounds(double a, long n);

// Helpers shared by the series evaluators.
bool is_nonpositive_integer(double a);
int gamma_sign(double x);                 // x not a nonpositive integer
double sin_pi(double x);                  // sin(pi x), reduced argument

} // namespace fdlab::cesaro

#endif
