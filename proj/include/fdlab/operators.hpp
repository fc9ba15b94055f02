#ifndef FDLAB_OPERATORS_HPP
#define FDLAB_OPERATORS_HPP

#include <Eigen/Dense>

#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace fdlab::operators {

// Dense square complex matrix with spectrum confined to the closed unit disc
// (enforced at construction, radius_slack beyond 1 tolerated) and a
// synchronized cache of powers and their operator norms. Immutable after
// construction except the cache, whose fills are idempotent.
class FiniteOperator {
public:
    explicit FiniteOperator(Eigen::MatrixXcd m, double radius_slack = 1e-9);

    FiniteOperator(const FiniteOperator& other);
    FiniteOperator& operator=(const FiniteOperator& other);

    int dim() const { return static_cast<int>(mat_.rows()); }
    const Eigen::MatrixXcd& matrix() const { return mat_; }
    double spectral_radius() const { return spectral_radius_; }

    Eigen::MatrixXcd power(int n) const;
    // Operator 2-norm of T^n.
    double power_norm(int n) const;
    // Smallest q <= dim with T^q exactly zero, when one exists.
    std::optional<int> nilpotent_index() const;

private:
    Eigen::MatrixXcd mat_;
    double spectral_radius_ = 0.0;
    mutable std::mutex mu_;
    mutable std::vector<Eigen::MatrixXcd> powers_;
    mutable std::vector<double> norms_;

    const Eigen::MatrixXcd& power_locked(int n) const;
};

double operator_norm(const Eigen::MatrixXcd& m);

// Plain-text matrix format: first line the dimension, then dim^2 entries
// "re im", row-major, one per line. Writers round-trip readers bit-exactly.
FiniteOperator read_matrix(std::istream& in);
FiniteOperator read_matrix_file(const std::string& path);
void write_matrix(std::ostream& out, const Eigen::MatrixXcd& m);
void write_matrix_file(const std::string& path, const Eigen::MatrixXcd& m);

} // namespace fdlab::operators

#endif
