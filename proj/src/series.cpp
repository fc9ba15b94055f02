#include "fdlab/series.hpp"

#include "fdlab/cesaro.hpp"
#include "fdlab/errors.hpp"
#include "fdlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace fdlab::series {

CoefficientSeries::CoefficientSeries(std::vector<double> coeffs, std::optional<TailModel> tail)
    : coeffs_(std::move(coeffs)), tail_(tail) {
    if (coeffs_.empty()) throw DomainError("CoefficientSeries: empty coefficient list");
    for (double c : coeffs_)
        if (!std::isfinite(c)) throw DomainError("CoefficientSeries: non-finite coefficient");
}

CoefficientSeries CoefficientSeries::polynomial(std::vector<double> coeffs) {
    return CoefficientSeries(std::move(coeffs));
}

CoefficientSeries CoefficientSeries::geometric_kernel(double r, int q, std::size_t len) {
    if (!(r > 0.0 && r < 1.0) || q < 1)
        throw DomainError("geometric_kernel: need 0 < r < 1 and q >= 1");
    std::vector<double> c(len);
    double rp = 1.0;
    for (std::size_t n = 0; n < len; ++n) {
        c[n] = rp * cesaro::number(static_cast<double>(q), static_cast<long>(n));
        rp *= r;
    }
    // Geometric decay dominates any power law; record a generous power bound
    // |g_n| <= C n^{-2} valid past the stored head.
    double tail_c = 0.0;
    if (len >= 2) {
        double last = std::fabs(c[len - 1]);
        double nn = static_cast<double>(len - 1);
        // |g_n| <= |g_N| r^{n-N} k-ratio growth; bound crude but safe:
        tail_c = 2.0 * last * nn * nn / (1.0 - r);
    }
    return CoefficientSeries(std::move(c), TailModel{tail_c, -2.0});
}

bool CoefficientSeries::summable() const {
    return !tail_ || tail_->exponent < -1.0;
}

double CoefficientSeries::l1_head() const {
    double s = 0.0;
    for (double c : coeffs_) s += std::fabs(c);
    return s;
}

double CoefficientSeries::l1_tail_bound() const { return tail_l1_from(coeffs_.size() - 1); }

double CoefficientSeries::tail_l1_from(std::size_t N) const {
    double s = 0.0;
    for (std::size_t n = N + 1; n < coeffs_.size(); ++n) s += std::fabs(coeffs_[n]);
    if (tail_) {
        if (tail_->exponent >= -1.0)
            throw DivergenceError("CoefficientSeries: tail model is not absolutely summable");
        // sum_{n>M} C n^p <= C * M^{p+1}/(-p-1) for p < -1 (integral bound)
        double M = static_cast<double>(std::max(N, coeffs_.size() - 1));
        if (M < 1.0) M = 1.0;
        s += tail_->constant * std::pow(M, tail_->exponent + 1.0) / (-tail_->exponent - 1.0);
    }
    return s;
}

double CoefficientSeries::eval(double t) const {
    double acc = 0.0;
    for (std::size_t n = coeffs_.size(); n-- > 0;) acc = acc * t + coeffs_[n];
    return acc;
}

CoefficientSeries CoefficientSeries::truncated(std::size_t N) const {
    std::vector<double> c(coeffs_.begin(),
                          coeffs_.begin() + std::min(coeffs_.size(), N + 1));
    c.resize(N + 1, 0.0);
    return CoefficientSeries(std::move(c));
}

CoefficientSeries CoefficientSeries::product(const CoefficientSeries& other, std::size_t len) const {
    if (len == 0) throw DomainError("CoefficientSeries::product: zero length");
    std::vector<double> a(coeffs_);
    std::vector<double> b(other.coeffs_);
    a.resize(len, 0.0);
    b.resize(len, 0.0);
    std::vector<double> out(len);
    kernels::conv_prefix(a, b, out);
    return CoefficientSeries(std::move(out));
}

bool coefficientwise_geq(const CoefficientSeries& f, const CoefficientSeries& g,
                         std::size_t window) {
    for (std::size_t n = 0; n < window; ++n)
        if (f.coeff(n) < g.coeff(n)) return false;
    return true;
}

bool strictly_positive_head(const CoefficientSeries& f, double slack) {
    if (!(f.coeff(0) > 0.0)) return false;
    for (std::size_t n = 1; n < f.size(); ++n)
        if (f.coeff(n) < -slack) return false;
    return true;
}

} // namespace fdlab::series
