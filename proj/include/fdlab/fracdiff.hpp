#ifndef FDLAB_FRACDIFF_HPP
#define FDLAB_FRACDIFF_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fdlab::fracdiff {

// Declared bound |Lambda_n| <= constant * (n+1)^exponent.
struct GrowthBound {
    double constant;
    double exponent;
};

// Optional sharper certificate |Lambda_n| <= constant * ratio^n, 0 <= ratio < 1.
struct DecayBound {
    double constant;
    double ratio;
};

// A real sequence indexed by nonnegative integers with a declared growth
// class. The declaration is spot-checked on a fixed index sample at
// construction. support_end, when present, certifies Lambda_n = 0 exactly
// for n > support_end, which turns every difference into a finite sum.
class RealSequence {
public:
    RealSequence(std::function<double(long)> eval, GrowthBound growth,
                 std::optional<long> support_end = std::nullopt,
                 bool spot_check = true);

    static RealSequence constant(double c);
    static RealSequence geometric(double rho); // rho in [0,1]
    static RealSequence polynomial(std::vector<double> monomial_coeffs);
    static RealSequence from_values(std::vector<double> values); // 0 beyond
    static RealSequence zero();

    double operator()(long n) const { return eval_(n); }
    const GrowthBound& growth() const { return growth_; }
    const std::optional<long>& support_end() const { return support_end_; }

    const std::optional<DecayBound>& decay() const { return decay_; }
    RealSequence& declare_decay(DecayBound d); // spot-checked, returns *this

private:
    std::function<double(long)> eval_;
    GrowthBound growth_;
    std::optional<long> support_end_;
    std::optional<DecayBound> decay_;
};

enum class Method { direct, abel, cesaro };
enum class Status { converged, summable, failed };

struct ConvergenceReport {
    double value = 0.0;
    Method method = Method::direct;
    double cesaro_order = 0.0; // meaningful when method == cesaro
    long terms_used = 0;
    double tail_bound = 0.0;
    Status status = Status::failed;
};

struct EvalOptions {
    double tol = 1e-9;
    long budget = 1'000'000;
    // Explicit summability request; when set, frac_diff skips the direct
    // attempt and sums the Cesaro means of the partial sums at this order.
    std::optional<double> cesaro_order;
    bool allow_abel = false;
};

// (1-nabla)^a Lambda_n = sum_j k^{-a}(j) Lambda_{j+n}, ascending order with
// compensated accumulation and a certified tail bound from the coefficient
// tail model and the declared growth. Requires growth exponent < a for the
// direct path; otherwise a summability method must be requested.
ConvergenceReport frac_diff(double a, const RealSequence& seq, long n,
                            const EvalOptions& opts = {});

// Splits the order into integer + fractional parts: the integer-order inner
// difference is an exact finite sum; when it is certified null the remaining
// fractional difference is exactly zero. Falls back to frac_diff otherwise.
ConvergenceReport frac_diff_reduced(double a, const RealSequence& seq, long n,
                                    const EvalOptions& opts = {});

// C_tau s_n = (1/k^{tau+1}(n)) sum_{j<=n} k^tau(n-j) s_j.
double cesaro_mean(double tau, const RealSequence& partials, long n);

// Detects stabilization of the (C,tau) means over a window of consecutive
// indices. Integer tau runs in O(budget) through iterated running sums;
// non-integer tau falls back to direct evaluation under a reduced budget.
ConvergenceReport summable_limit(double tau, const RealSequence& partials,
                                 const EvalOptions& opts = {});

struct TaylorSplit {
    double head;
    double tail;
};

// head = sum_{j<k} (-1)^j binom(n,j) (I-nabla)^j Lambda_0,
// tail = (-1)^k sum_{j<=n-k} binom(n-1-j,k-1) (I-nabla)^k Lambda_j;
// head + tail = Lambda_n exactly (all sums finite).
TaylorSplit discrete_taylor(const RealSequence& seq, int k, long n);

struct ComposeReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool agree = false;
    double deviation = 0.0;
    double allowance = 0.0;
    char branch = '?'; // 'A' or 'B'
    std::string note;
};

// Checks (1-nabla)^{r+s} Lambda_n = (1-nabla)^r [(1-nabla)^s Lambda]_n under
// the Theorem A hypotheses (s > -1, r >= 0) or the Theorem B hypotheses
// (s > -1, r+s > -1, r+s non-integer). DivergenceError from either side is
// rethrown with the failing side named.
ComposeReport kuttner_compose_check(double r, double s, const RealSequence& seq,
                                    long n, const EvalOptions& opts = {});

struct QuestionAReport {
    bool hypothesis_ok = false;
    long hypothesis_witness = -1; // first n with (1-nabla)^a < 0, if any
    double min_value = 0.0;
    long min_index = -1;
    bool conclusion_ok = false;
};

// Verifies (1-nabla)^a Lambda >= 0 up to the horizon, then reports the
// minimum of (1-nabla)^b Lambda over the same range (0 < b < a, b
// non-integer). A failed hypothesis is reported, not thrown.
QuestionAReport question_a_check(double a, double b, const RealSequence& seq,
                                 long horizon, const EvalOptions& opts = {});

struct PolyFit {
    bool is_poly = false;
    std::vector<double> newton_coeffs; // Delta^i Lambda_0, i = 0..m
    double max_residual = 0.0;
};

// Fits the degree-<=m polynomial through Lambda_0..Lambda_m by exact forward
// differences and reports the largest deviation up to the horizon.
PolyFit poly_solution_check(const RealSequence& seq, int m, long horizon,
                            double tol = 1e-9);

double binomial(long n, int k);

const char* to_string(Method m);
const char* to_string(Status s);

} // namespace fdlab::fracdiff

#endif
