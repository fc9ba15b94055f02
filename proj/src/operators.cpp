#include "fdlab/operators.hpp"

#include "fdlab/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace fdlab::operators {

FiniteOperator::FiniteOperator(Eigen::MatrixXcd m, double radius_slack) : mat_(std::move(m)) {
    if (mat_.rows() != mat_.cols() || mat_.rows() == 0)
        throw DomainError("FiniteOperator: square nonempty matrix required");
    if (!mat_.allFinite()) throw DomainError("FiniteOperator: non-finite entry");
    if (mat_.rows() == 1) {
        spectral_radius_ = std::abs(mat_(0, 0));
    } else {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(mat_, /*computeEigenvectors=*/false);
        spectral_radius_ = es.eigenvalues().cwiseAbs().maxCoeff();
    }
    if (spectral_radius_ > 1.0 + radius_slack)
        throw SpectralRadiusError("FiniteOperator: spectral radius " +
                                  std::to_string(spectral_radius_) + " outside the closed disc");
    powers_.push_back(Eigen::MatrixXcd::Identity(mat_.rows(), mat_.cols()));
    norms_.push_back(1.0);
}

FiniteOperator::FiniteOperator(const FiniteOperator& other) {
    std::lock_guard<std::mutex> lock(other.mu_);
    mat_ = other.mat_;
    spectral_radius_ = other.spectral_radius_;
    powers_ = other.powers_;
    norms_ = other.norms_;
}

FiniteOperator& FiniteOperator::operator=(const FiniteOperator& other) {
    if (this == &other) return *this;
    FiniteOperator tmp(other);
    std::lock_guard<std::mutex> lock(mu_);
    mat_ = std::move(tmp.mat_);
    spectral_radius_ = tmp.spectral_radius_;
    powers_ = std::move(tmp.powers_);
    norms_ = std::move(tmp.norms_);
    return *this;
}

const Eigen::MatrixXcd& FiniteOperator::power_locked(int n) const {
    while (static_cast<int>(powers_.size()) <= n) {
        // Once a power vanishes exactly, every later one does too.
        if (powers_.back().isZero(0.0)) {
            powers_.push_back(powers_.back());
            norms_.push_back(0.0);
            continue;
        }
        powers_.push_back(powers_.back() * mat_);
        norms_.push_back(operator_norm(powers_.back()));
    }
    return powers_[static_cast<std::size_t>(n)];
}

Eigen::MatrixXcd FiniteOperator::power(int n) const {
    if (n < 0) throw DomainError("FiniteOperator::power: negative exponent");
    std::lock_guard<std::mutex> lock(mu_);
    return power_locked(n);
}

double FiniteOperator::power_norm(int n) const {
    if (n < 0) throw DomainError("FiniteOperator::power_norm: negative exponent");
    std::lock_guard<std::mutex> lock(mu_);
    power_locked(n);
    return norms_[static_cast<std::size_t>(n)];
}

std::optional<int> FiniteOperator::nilpotent_index() const {
    std::lock_guard<std::mutex> lock(mu_);
    for (int q = 1; q <= dim(); ++q) {
        power_locked(q);
        if (norms_[static_cast<std::size_t>(q)] == 0.0) return q;
    }
    return std::nullopt;
}

double operator_norm(const Eigen::MatrixXcd& m) {
    if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues()(0);
}

FiniteOperator read_matrix(std::istream& in) {
    long dim = 0;
    if (!(in >> dim) || dim <= 0) throw IoError("matrix read: bad dimension line");
    Eigen::MatrixXcd m(dim, dim);
    for (long i = 0; i < dim; ++i)
        for (long j = 0; j < dim; ++j) {
            double re, im;
            if (!(in >> re >> im)) throw IoError("matrix read: truncated entry list");
            m(i, j) = std::complex<double>(re, im);
        }
    return FiniteOperator(std::move(m));
}

FiniteOperator read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open matrix file: " + path);
    return read_matrix(in);
}

void write_matrix(std::ostream& out, const Eigen::MatrixXcd& m) {
    out << m.rows() << "\n";
    char buf[64];
    for (long i = 0; i < m.rows(); ++i)
        for (long j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g %.17g\n", m(i, j).real(), m(i, j).imag());
            out << buf;
        }
}

void write_matrix_file(const std::string& path, const Eigen::MatrixXcd& m) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open matrix file for writing: " + path);
    write_matrix(out, m);
}

} // namespace fdlab::operators
