#ifndef FDLAB_SERIES_HPP
#define FDLAB_SERIES_HPP

#include <cstddef>
#include <optional>
#include <vector>

namespace fdlab::series {

// Certifies |f_n| <= constant * n^exponent for every n past the stored head.
struct TailModel {
    double constant;
    double exponent;
};

// A real Taylor-coefficient sequence f_0..f_N with an optional power-law
// bound on the unstored tail. Summability of the full series (Wiener-algebra
// membership) requires the tail exponent to be < -1 when a tail is present.
class CoefficientSeries {
public:
    CoefficientSeries() = default;
    explicit CoefficientSeries(std::vector<double> coeffs,
                               std::optional<TailModel> tail = std::nullopt);

    static CoefficientSeries polynomial(std::vector<double> coeffs);
    // Coefficients of (1 - r t)^{-q}: g_n = r^n k^q(n), all positive.
    static CoefficientSeries geometric_kernel(double r, int q, std::size_t len);

    std::size_t size() const { return coeffs_.size(); }
    // f_n for stored n, 0 past the head (the tail model only bounds those).
    double coeff(std::size_t n) const { return n < coeffs_.size() ? coeffs_[n] : 0.0; }
    const std::vector<double>& coeffs() const { return coeffs_; }
    const std::optional<TailModel>& tail() const { return tail_; }

    bool summable() const; // finite, or tail exponent < -1

    double l1_head() const;
    // Upper bound on sum_{n>head} |f_n| from the tail model (0 if absent).
    double l1_tail_bound() const;
    double l1() const { return l1_head() + l1_tail_bound(); }
    // Upper bound on sum_{n>N} |f_n| (stored part beyond N plus tail bound).
    double tail_l1_from(std::size_t N) const;

    double eval(double t) const; // head only

    CoefficientSeries truncated(std::size_t N) const; // [f]_N, tail dropped
    // Cauchy product of the stored heads, cut at len coefficients. The result
    // carries no tail model.
    CoefficientSeries product(const CoefficientSeries& other, std::size_t len) const;

private:
    std::vector<double> coeffs_;
    std::optional<TailModel> tail_;
};

// f >= g coefficientwise over indices < window (missing coefficients are 0).
bool coefficientwise_geq(const CoefficientSeries& f, const CoefficientSeries& g,
                         std::size_t window);

// f > 0 in the coefficient order over the stored window: f_0 > 0 and
// f_n >= -slack for all stored n.
bool strictly_positive_head(const CoefficientSeries& f, double slack = 0.0);

} // namespace fdlab::series

#endif
