#include "hardylab/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hardylab/error.hpp"
#include "hardylab/kernels.hpp"

namespace hardylab {

OperatorLV::OperatorLV(std::shared_ptr<const GridDomain> domain, std::vector<double> potential)
    : domain_(std::move(domain)), potential_(std::move(potential)) {
    const GridDomain& d = *domain_;
    const std::size_t n = d.n_interior();
    if (potential_.size() != n) throw LabError(Stage::spectral, "potential size mismatch");
    coef_ = 1.0 / (d.h * d.h);
    diag_.resize(n);
    const int w = d.width();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(n * (w + 1));
    for (std::size_t i = 0; i < n; ++i) {
        diag_[i] = 2.0 * d.dim * coef_ - potential_[i];
        trip.emplace_back(i, i, diag_[i]);
        for (int k = 0; k < w; ++k) {
            const std::int32_t v = d.links[i * w + k];
            if (v >= 0) trip.emplace_back(i, v, -coef_);
        }
    }
    matrix_.resize(n, n);
    matrix_.setFromTriplets(trip.begin(), trip.end());
    matrix_.makeCompressed();
}

void OperatorLV::apply_extended(std::span<const double> x_ext, std::span<double> y) const {
    kernels::StencilView s{diag_, domain_->gather, domain_->width(), coef_};
    kernels::stencil_apply(s, x_ext, y);
}

std::vector<double> OperatorLV::apply(const Field& u) const {
    std::vector<double> y(size());
    apply_extended(u.extended(), y);
    return y;
}

std::vector<double> OperatorLV::apply_interior(std::span<const double> x) const {
    std::vector<double> ext(x.begin(), x.end());
    ext.resize(size() + domain_->n_boundary(), 0.0);
    std::vector<double> y(size());
    apply_extended(ext, y);
    return y;
}

std::vector<double> OperatorLV::boundary_load(std::span<const double> g) const {
    const GridDomain& d = *domain_;
    const int w = d.width();
    std::vector<double> r(size(), 0.0);
    for (std::size_t i = 0; i < size(); ++i)
        for (int k = 0; k < w; ++k) {
            const std::int32_t v = d.links[i * w + k];
            if (v < 0) r[i] += g[-v - 1] * coef_;
        }
    return r;
}

std::vector<double> OperatorLV::boundary_adjoint(std::span<const double> y) const {
    const GridDomain& d = *domain_;
    const int w = d.width();
    std::vector<double> r(d.n_boundary(), 0.0);
    for (std::size_t i = 0; i < size(); ++i)
        for (int k = 0; k < w; ++k) {
            const std::int32_t v = d.links[i * w + k];
            if (v < 0) r[-v - 1] += y[i] * coef_;
        }
    return r;
}

Factorization::Factorization(const SparseMatrix& a) : base_(a), work_(a) {
    base_.makeCompressed();
    work_.makeCompressed();
    diag_pos_.assign(base_.cols(), -1);
    for (int j = 0; j < base_.outerSize(); ++j)
        for (int p = base_.outerIndexPtr()[j]; p < base_.outerIndexPtr()[j + 1]; ++p)
            if (base_.innerIndexPtr()[p] == j) diag_pos_[j] = p;
    ldlt_.analyzePattern(work_);
    ldlt_.factorize(work_);
    ok_ = ldlt_.info() == Eigen::Success;
}

bool Factorization::refactor(std::span<const double> shift) {
    const double* src = base_.valuePtr();
    double* dst = work_.valuePtr();
    std::copy(src, src + base_.nonZeros(), dst);
    for (std::size_t j = 0; j < diag_pos_.size(); ++j) dst[diag_pos_[j]] += shift[j];
    ldlt_.factorize(work_);
    ok_ = ldlt_.info() == Eigen::Success;
    return ok_;
}

std::vector<double> Factorization::solve(std::span<const double> rhs) const {
    std::vector<double> x(rhs.begin(), rhs.end());
    solve_in_place(x);
    return x;
}

void Factorization::solve_in_place(std::span<double> x) const {
    if (!ok_) throw LabError(Stage::green, "solve with a failed factorization");
    Eigen::Map<Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
    v = ldlt_.solve(v);
}

int Factorization::negative_pivots() const {
    const auto& d = ldlt_.vectorD();
    int neg = 0;
    for (Eigen::Index i = 0; i < d.size(); ++i)
        if (d[i] < 0) ++neg;
    return neg;
}

bool is_positive_definite(const SparseMatrix& a, double sigma) {
    SparseMatrix m = a;
    if (sigma != 0.0)
        for (int j = 0; j < m.outerSize(); ++j) m.coeffRef(j, j) -= sigma;
    Eigen::SimplicialLLT<SparseMatrix> llt(m);
    return llt.info() == Eigen::Success;
}

namespace {

double rayleigh(const SparseMatrix& a, const Eigen::VectorXd& x) {
    return x.dot(a * x) / x.dot(x);
}

}  // namespace

EigenPair smallest_eigenpair(const SparseMatrix& a, const EigenOptions& opts) {
    const Eigen::Index n = a.rows();
    double anorm = 0.0, gersh = 1e300;
    for (int j = 0; j < a.outerSize(); ++j) {
        double diag = 0.0, off = 0.0;
        for (SparseMatrix::InnerIterator it(a, j); it; ++it) {
            if (it.row() == j)
                diag = it.value();
            else
                off += std::abs(it.value());
        }
        anorm = std::max(anorm, std::abs(diag) + off);
        gersh = std::min(gersh, diag - off);
    }

    double sigma = 0.0;
    if (!is_positive_definite(a, 0.0)) {
        // lambda_min < 0: bracket it between a Gershgorin bound and zero.
        double lo = gersh - 1e-8 * anorm, hi = 0.0;
        while (!is_positive_definite(a, lo)) lo -= std::max(1.0, std::abs(lo));
        for (int it = 0; it < 200 && hi - lo > 0.05 * std::abs(hi) + 1e-14 * anorm; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (is_positive_definite(a, mid))
                lo = mid;
            else
                hi = mid;
        }
        sigma = lo;
    }

    SparseMatrix shifted = a;
    if (sigma != 0.0)
        for (int j = 0; j < shifted.outerSize(); ++j) shifted.coeffRef(j, j) -= sigma;
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(shifted);
    if (ldlt.info() != Eigen::Success)
        throw LabError(Stage::spectral, "shifted factorization failed in the eigensolver");

    Eigen::VectorXd x = Eigen::VectorXd::Ones(n).normalized();
    EigenPair ep;
    double lambda = rayleigh(a, x);
    const double floor = 1e-12 * anorm;
    // Below this the residual is rounding in A x itself.
    const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() * anorm;
    bool converged = false;
    for (int it = 1; it <= opts.max_iterations && !converged; ++it) {
        x = ldlt.solve(x);
        x.normalize();
        lambda = rayleigh(a, x);
        const double abs_res = (a * x - lambda * x).norm();
        ep.iterations = it;
        ep.residual = abs_res / std::max(std::abs(lambda), floor);
        converged = ep.residual < opts.tolerance || abs_res <= roundoff;
    }
    if (!converged)
        throw LabError(Stage::spectral, "inverse iteration did not converge (residual " +
                                            std::to_string(ep.residual) + ")");
    if (x.sum() < 0) x = -x;
    ep.value = lambda;
    ep.vector.assign(x.data(), x.data() + n);
    return ep;
}

}  // namespace hardylab
