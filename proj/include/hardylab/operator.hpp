#pragma once

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <memory>
#include <span>
#include <vector>

#include "hardylab/field.hpp"
#include "hardylab/grid_domain.hpp"

namespace hardylab {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Discrete -L_V = -Delta_h - V on the interior nodes, Dirichlet data on the boundary nodes.
class OperatorLV {
public:
    OperatorLV(std::shared_ptr<const GridDomain> domain, std::vector<double> potential);

    const GridDomain& domain() const { return *domain_; }
    std::shared_ptr<const GridDomain> domain_ptr() const { return domain_; }
    std::span<const double> potential() const { return potential_; }
    std::span<const double> diagonal() const { return diag_; }
    std::size_t size() const { return diag_.size(); }
    double coupling() const { return coef_; }
    const SparseMatrix& matrix() const { return matrix_; }

    /// y = (-L_V) u with the boundary values of `x_ext` (interior then boundary).
    void apply_extended(std::span<const double> x_ext, std::span<double> y) const;
    std::vector<double> apply(const Field& u) const;
    /// Homogeneous Dirichlet data.
    std::vector<double> apply_interior(std::span<const double> x) const;

    /// (B g)_i = sum over boundary links of g_b / h^2.
    std::vector<double> boundary_load(std::span<const double> g) const;
    /// (B^T y)_b = sum over interior links of y_i / h^2.
    std::vector<double> boundary_adjoint(std::span<const double> y) const;

private:
    std::shared_ptr<const GridDomain> domain_;
    std::vector<double> potential_;
    std::vector<double> diag_;
    double coef_ = 0.0;
    SparseMatrix matrix_;
};

/// Sparse LDL^T of A + diag(shift), pattern analysed once and refactorable.
class Factorization {
public:
    explicit Factorization(const SparseMatrix& a);
    Factorization(const Factorization&) = delete;
    Factorization& operator=(const Factorization&) = delete;

    /// Refactor with A + diag(shift). Returns false if the pivot sequence breaks down.
    bool refactor(std::span<const double> shift);
    bool ok() const { return ok_; }
    std::vector<double> solve(std::span<const double> rhs) const;
    void solve_in_place(std::span<double> x) const;
    /// Number of negative pivots (Sylvester inertia of the factored matrix).
    int negative_pivots() const;

private:
    SparseMatrix base_;
    SparseMatrix work_;
    std::vector<int> diag_pos_;
    Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
    bool ok_ = false;
};

/// Positive definiteness of A - sigma I via sparse Cholesky.
bool is_positive_definite(const SparseMatrix& a, double sigma = 0.0);

struct EigenPair {
    double value = 0.0;
    std::vector<double> vector;  // unit Euclidean norm, positive sum
    int iterations = 0;
    double residual = 0.0;  // ||A x - lambda x|| / (|lambda| ||x||)
};

struct EigenOptions {
    double tolerance = 1e-10;
    int max_iterations = 10000;
};

/// Smallest eigenpair by shifted inverse iteration. Throws on non-convergence.
EigenPair smallest_eigenpair(const SparseMatrix& a, const EigenOptions& opts = {});

}  // namespace hardylab
