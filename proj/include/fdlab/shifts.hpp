#ifndef FDLAB_SHIFTS_HPP
#define FDLAB_SHIFTS_HPP

#include "fdlab/fracdiff.hpp"
#include "fdlab/operators.hpp"

#include <string>

namespace fdlab::shifts {

enum class Direction { backward, forward };

// Weighted shift B_s (backward) or F_s (forward) on the space with basis
// weights k^s(n).
struct ShiftSpec {
    Direction direction;
    double weight; // s > 0
};

enum class Verdict { nonneg, nonpos, zero, indefinite, not_in_class };

struct SignClassification {
    Verdict verdict;
    std::string detail;
};

const char* to_string(Verdict v);

// ||T^n e_m||^2 / ||e_m||^2: k^s(n+m)/k^s(m) for F_s, k^s(m-n)/k^s(m) for
// B_s when m >= n and 0 otherwise.
double power_norm_sq(const ShiftSpec& shift, long n, long m);

// sup over basis indices m <= m_cap of power_norm_sq; the supremum sits at an
// endpoint since the ratio is monotone in m.
double operator_norm_sq_estimate(const ShiftSpec& shift, long n, long m_cap = 1 << 15);

// (1-nabla)^a k^s(m) = sin(pi s) Gamma(1-s+a) Gamma(s+m) / (pi Gamma(m+a+1)),
// valid for 0 < s < a+1.
double frac_diff_cesaro_closed(double a, double s, long m);

// Whether the shift admits the order-a difference (B_s always; F_s iff
// s < a+1 or a integer), cross-validated against term decay.
bool membership_weak(const ShiftSpec& shift, double a);

// Sign classification of (1-nabla)^a applied to the power-norm sequences,
// cross-checked numerically at small basis indices.
SignClassification classify(const ShiftSpec& shift, double a);

// dim x dim matrix of the shift in the orthonormalized basis: entries
// sqrt(k^s(m+1)/k^s(m)) on the subdiagonal (forward) or
// sqrt(k^s(m-1)/k^s(m)) on the superdiagonal (backward). Both truncations
// are nilpotent.
operators::FiniteOperator truncate(const ShiftSpec& shift, int dim);

// n -> ||T^n e_m||^2 as a RealSequence (finite support for B_s).
fracdiff::RealSequence power_norm_sequence(const ShiftSpec& shift, long basis_index);

} // namespace fdlab::shifts

#endif
