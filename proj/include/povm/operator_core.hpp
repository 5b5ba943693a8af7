#pragma once

// Dense complex linear algebra on small Hermitian operators (d <= 16).
// Everything here is templated on the real scalar type; the rest of the
// library instantiates it with double through the aliases at the bottom.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "povm/errors.hpp"

namespace povm {

template <typename Real>
using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using ComplexVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RealMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

/// An ordered tuple of Hermitian operators, e.g. the components (Q_1..Q_N)
/// of a perturbation.
template <typename Real>
using HermitianTuple = std::vector<ComplexMatrix<Real>>;

inline constexpr Eigen::Index kMaxDimension = 16;

template <typename Derived>
typename Derived::RealScalar hermiticity_defect(const Eigen::MatrixBase<Derived> &op) {
    return (op - op.adjoint()).norm();
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived> &op, typename Derived::RealScalar tol) {
    if (op.rows() != op.cols()) {
        return false;
    }
    return hermiticity_defect(op) <= tol * (1 + op.norm());
}

template <typename Derived>
void require_hermitian(const Eigen::MatrixBase<Derived> &op, typename Derived::RealScalar tol) {
    if (op.rows() != op.cols()) {
        throw DimensionMismatch("operator is not square");
    }
    if (!is_hermitian(op, tol)) {
        throw NonHermitianInput("operator violates Hermitian symmetry beyond tolerance");
    }
}

/// Eigen-decomposition of a Hermitian operator, eigenvalues in descending order.
template <typename Real>
struct HermitianEigen {
    RealVector<Real> values;
    ComplexMatrix<Real> vectors; ///< column k pairs with values(k)
};

template <typename Derived>
HermitianEigen<typename Derived::RealScalar> eigh(const Eigen::MatrixBase<Derived> &op,
                                                   typename Derived::RealScalar tol_herm = 1e-10) {
    using Real = typename Derived::RealScalar;
    require_hermitian(op, tol_herm);
    const ComplexMatrix<Real> sym = (op + op.adjoint()) / Real(2);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> solver(sym);
    HermitianEigen<Real> out;
    out.values = solver.eigenvalues().reverse();
    out.vectors = solver.eigenvectors().rowwise().reverse();
    return out;
}

template <typename Derived>
typename Derived::RealScalar min_eigenvalue(const Eigen::MatrixBase<Derived> &op,
                                            typename Derived::RealScalar tol_herm = 1e-10) {
    using Real = typename Derived::RealScalar;
    require_hermitian(op, tol_herm);
    const ComplexMatrix<Real> sym = (op + op.adjoint()) / Real(2);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> solver(sym, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
}

/// PSD margin: min eigenvalue + tol * (1 + ||op||_F). Nonnegative iff PSD.
template <typename Derived>
typename Derived::RealScalar psd_margin(const Eigen::MatrixBase<Derived> &op,
                                        typename Derived::RealScalar tol,
                                        typename Derived::RealScalar tol_herm = 1e-10) {
    return min_eigenvalue(op, tol_herm) + tol * (1 + op.norm());
}

template <typename Derived>
bool is_psd(const Eigen::MatrixBase<Derived> &op, typename Derived::RealScalar tol,
            typename Derived::RealScalar tol_herm = 1e-10) {
    return psd_margin(op, tol, tol_herm) >= 0;
}

/// Re Tr[A^dagger B]; equals Tr[A B] for Hermitian arguments.
template <typename DerivedA, typename DerivedB>
typename DerivedA::RealScalar trace_inner(const Eigen::MatrixBase<DerivedA> &a,
                                          const Eigen::MatrixBase<DerivedB> &b) {
    return a.conjugate().cwiseProduct(b).sum().real();
}

/// Real coordinates of a Hermitian operator: the d diagonal entries followed
/// by sqrt(2) Re and sqrt(2) Im of each strictly-upper entry (row-major).
/// The map is an isometry from (Herm(d), Tr[AB]) onto R^{d^2}.
template <typename Derived>
RealVector<typename Derived::RealScalar> hermitian_coordinates(const Eigen::MatrixBase<Derived> &op) {
    using Real = typename Derived::RealScalar;
    const auto d = op.rows();
    RealVector<Real> v(d * d);
    const Real s = std::sqrt(Real(2));
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < d; ++j) {
        v(k++) = std::real(op(j, j));
    }
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index l = j + 1; l < d; ++l) {
            const auto z = (op(j, l) + std::conj(op(l, j))) / Real(2);
            v(k++) = s * z.real();
            v(k++) = s * z.imag();
        }
    }
    return v;
}

template <typename Derived>
ComplexMatrix<typename Derived::Scalar> from_hermitian_coordinates(const Eigen::MatrixBase<Derived> &v,
                                                                   Eigen::Index d) {
    using Real = typename Derived::Scalar;
    if (v.size() != d * d) {
        throw DimensionMismatch("coordinate vector length is not d^2");
    }
    ComplexMatrix<Real> op = ComplexMatrix<Real>::Zero(d, d);
    const Real s = std::sqrt(Real(2));
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < d; ++j) {
        op(j, j) = v(k++);
    }
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index l = j + 1; l < d; ++l) {
            const std::complex<Real> z(v(k) / s, v(k + 1) / s);
            k += 2;
            op(j, l) = z;
            op(l, j) = std::conj(z);
        }
    }
    return op;
}

/// Orthonormal basis of Herm(r) under Tr[AB] in generalized Gell-Mann order:
/// traceless diagonals diag(1,..,1,-k,0,..)/sqrt(k(k+1)), then the off-diagonal
/// pairs (E_jk+E_kj)/sqrt2, i(E_kj-E_jk)/sqrt2, then I/sqrt(r).
template <typename Real>
std::vector<ComplexMatrix<Real>> hermitian_basis(Eigen::Index r) {
    using C = std::complex<Real>;
    std::vector<ComplexMatrix<Real>> basis;
    basis.reserve(static_cast<std::size_t>(r * r));
    const Real s = std::sqrt(Real(2));
    for (Eigen::Index k = 1; k < r; ++k) {
        ComplexMatrix<Real> h = ComplexMatrix<Real>::Zero(r, r);
        const Real norm = std::sqrt(Real(k * (k + 1)));
        for (Eigen::Index j = 0; j < k; ++j) {
            h(j, j) = C(1 / norm);
        }
        h(k, k) = C(-Real(k) / norm);
        basis.push_back(std::move(h));
    }
    for (Eigen::Index j = 0; j < r; ++j) {
        for (Eigen::Index l = j + 1; l < r; ++l) {
            ComplexMatrix<Real> re = ComplexMatrix<Real>::Zero(r, r);
            re(j, l) = re(l, j) = C(1 / s);
            basis.push_back(std::move(re));
            ComplexMatrix<Real> im = ComplexMatrix<Real>::Zero(r, r);
            im(j, l) = C(0, -1 / s);
            im(l, j) = C(0, 1 / s);
            basis.push_back(std::move(im));
        }
    }
    if (r > 0) {
        basis.push_back(ComplexMatrix<Real>::Identity(r, r) / C(std::sqrt(Real(r))));
    }
    return basis;
}

template <typename Real>
RealVector<Real> tuple_coordinates(const HermitianTuple<Real> &tuple) {
    Eigen::Index total = 0;
    for (const auto &op : tuple) {
        total += op.rows() * op.rows();
    }
    RealVector<Real> v(total);
    Eigen::Index offset = 0;
    for (const auto &op : tuple) {
        const auto n = op.rows() * op.rows();
        v.segment(offset, n) = hermitian_coordinates(op);
        offset += n;
    }
    return v;
}

template <typename Real>
HermitianTuple<Real> tuple_from_coordinates(const RealVector<Real> &v, const HermitianTuple<Real> &shape) {
    HermitianTuple<Real> out;
    out.reserve(shape.size());
    Eigen::Index offset = 0;
    for (const auto &op : shape) {
        const auto d = op.rows();
        out.push_back(from_hermitian_coordinates(RealVector<Real>(v.segment(offset, d * d)), d));
        offset += d * d;
    }
    return out;
}

/// Kernel of a real matrix from its SVD. Singular values at or below
/// gap * max(1, sigma_max) are treated as zero. Columns are orthonormal.
template <typename Real>
struct RealKernel {
    RealMatrix<Real> basis;
    RealVector<Real> singular_values;
    Eigen::Index rank = 0;
};

template <typename Real>
RealKernel<Real> real_kernel(const RealMatrix<Real> &a, Real gap) {
    RealKernel<Real> out;
    const auto cols = a.cols();
    if (cols == 0) {
        out.basis.resize(0, 0);
        return out;
    }
    if (a.rows() == 0) {
        out.basis = RealMatrix<Real>::Identity(cols, cols);
        return out;
    }
    Eigen::JacobiSVD<RealMatrix<Real>> svd(a, Eigen::ComputeFullV);
    out.singular_values = svd.singularValues();
    const Real scale = std::max(Real(1), out.singular_values.size() ? out.singular_values(0) : Real(0));
    Eigen::Index rank = 0;
    for (Eigen::Index k = 0; k < out.singular_values.size(); ++k) {
        if (out.singular_values(k) > gap * scale) {
            ++rank;
        }
    }
    out.rank = rank;
    out.basis = svd.matrixV().rightCols(cols - rank);
    return out;
}

template <typename Real>
Eigen::Index numerical_rank(const RealMatrix<Real> &a, Real gap) {
    if (a.size() == 0) {
        return 0;
    }
    return real_kernel(a, gap).rank;
}

/// Flip the sign of a vector so that its largest-magnitude entry (first on
/// ties) is positive. Gives reproducible kernel bases.
template <typename Derived>
void canonical_sign(Eigen::MatrixBase<Derived> &v) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < v.size(); ++k) {
        if (std::abs(v(k)) > std::abs(v(best)) * (1 + 1e-12)) {
            best = k;
        }
    }
    if (v.size() > 0 && v(best) < 0) {
        v = -v;
    }
}

template <typename Real>
using TupleMap = std::function<HermitianTuple<Real>(const HermitianTuple<Real> &)>;

/// Orthonormal basis (trace inner product summed over slots) of
/// { t in span(domain_basis) : constraint(t) = 0 }. The constraint must be
/// real-linear. Returns an empty list when the kernel is trivial.
template <typename Real>
std::vector<HermitianTuple<Real>> hermitian_nullspace(const TupleMap<Real> &constraint,
                                                      const std::vector<HermitianTuple<Real>> &domain_basis,
                                                      Real gap = Real(1e-8)) {
    if (domain_basis.empty()) {
        return {};
    }
    const auto k = static_cast<Eigen::Index>(domain_basis.size());
    const auto dim = tuple_coordinates(domain_basis.front()).size();

    RealMatrix<Real> domain(dim, k);
    for (Eigen::Index j = 0; j < k; ++j) {
        domain.col(j) = tuple_coordinates(domain_basis[static_cast<std::size_t>(j)]);
    }
    // constraint(sum c_j b_j) = sum c_j constraint(b_j), so one image per
    // basis element fixes the whole map.
    const auto first_image = tuple_coordinates(constraint(domain_basis.front()));
    RealMatrix<Real> images(first_image.size(), k);
    images.col(0) = first_image;
    for (Eigen::Index j = 1; j < k; ++j) {
        images.col(j) = tuple_coordinates(constraint(domain_basis[static_cast<std::size_t>(j)]));
    }

    // Orthonormalize the domain: domain = Q R, images expressed on Q are images * R^{-1}.
    Eigen::HouseholderQR<RealMatrix<Real>> qr(domain);
    const RealMatrix<Real> q = qr.householderQ() * RealMatrix<Real>::Identity(dim, k);
    const RealMatrix<Real> r = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
    const RealMatrix<Real> images_q =
        r.transpose().template triangularView<Eigen::Lower>().solve(images.transpose()).transpose();

    // The SVD basis is an arbitrary rotation of the kernel. Replace it by the
    // Gram-Schmidt sequence of the kernel projections of the domain directions,
    // taken in order, so the basis depends only on the kernel itself.
    const RealMatrix<Real> kb = real_kernel<Real>(images_q, gap).basis;
    const auto m = kb.cols();
    RealMatrix<Real> canonical(k, m);
    Eigen::Index found = 0;
    for (Eigen::Index j = 0; j < k && found < m; ++j) {
        RealVector<Real> v = kb * kb.row(j).transpose();
        for (int pass = 0; pass < 2; ++pass) {
            v -= canonical.leftCols(found) * (canonical.leftCols(found).transpose() * v);
        }
        const Real norm = v.norm();
        if (norm > Real(1e-6)) {
            canonical.col(found++) = v / norm;
        }
    }
    std::vector<HermitianTuple<Real>> out;
    out.reserve(static_cast<std::size_t>(found));
    for (Eigen::Index j = 0; j < found; ++j) {
        RealVector<Real> coords = q * canonical.col(j);
        canonical_sign(coords);
        out.push_back(tuple_from_coordinates(coords, domain_basis.front()));
    }
    return out;
}

// Pauli matrices in the computational basis {|0>, |1>}.
template <typename Real>
ComplexMatrix<Real> pauli(int axis) {
    using C = std::complex<Real>;
    ComplexMatrix<Real> m(2, 2);
    switch (axis) {
    case 0:
        m << C(0), C(1), C(1), C(0);
        break;
    case 1:
        m << C(0), C(0, -1), C(0, 1), C(0);
        break;
    case 2:
        m << C(1), C(0), C(0), C(-1);
        break;
    default:
        throw InvalidInput("Pauli axis must be 0, 1 or 2");
    }
    return m;
}

using Operator = ComplexMatrix<double>;
using Ket = ComplexVector<double>;

} // namespace povm
