#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "tampc/core.hpp"

namespace tampc {

/**
 * Square matrix with `bandwidth` sub- and super-diagonals, stored LAPACK-style:
 * entry (i, j) lives at band(bandwidth + i - j, j).
 *
 * A matrix created with `symmetric = true` mirrors every write, so the flag is
 * consistent with the stored coefficients by construction.
 */
template <typename Scalar>
class BandedMatrix {
public:
  using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  BandedMatrix(Eigen::Index dimension, Eigen::Index bandwidth, bool symmetric)
      : dimension_(dimension),
        bandwidth_(bandwidth),
        symmetric_(symmetric),
        band_(DenseMatrix::Zero(2 * bandwidth + 1, dimension)) {
    if (dimension < 1) throw InvalidArgument("banded matrix dimension must be >= 1");
    if (bandwidth < 0) throw InvalidArgument("banded matrix bandwidth must be >= 0");
  }

  [[nodiscard]] Eigen::Index dimension() const { return dimension_; }
  [[nodiscard]] Eigen::Index bandwidth() const { return bandwidth_; }
  [[nodiscard]] bool symmetric() const { return symmetric_; }

  [[nodiscard]] bool in_band(Eigen::Index i, Eigen::Index j) const {
    return i >= 0 && j >= 0 && i < dimension_ && j < dimension_ && std::abs(i - j) <= bandwidth_;
  }

  [[nodiscard]] Scalar operator()(Eigen::Index i, Eigen::Index j) const {
    return in_band(i, j) ? band_(bandwidth_ + i - j, j) : Scalar(0);
  }

  void set(Eigen::Index i, Eigen::Index j, Scalar value) {
    check(i, j);
    band_(bandwidth_ + i - j, j) = value;
    if (symmetric_) band_(bandwidth_ + j - i, i) = value;
  }

  void add(Eigen::Index i, Eigen::Index j, Scalar value) {
    check(i, j);
    band_(bandwidth_ + i - j, j) += value;
    if (symmetric_ && i != j) band_(bandwidth_ + j - i, i) += value;
  }

  [[nodiscard]] DenseVector operator*(const DenseVector& v) const {
    DenseVector out = DenseVector::Zero(dimension_);
    for (Eigen::Index i = 0; i < dimension_; ++i) {
      const Eigen::Index lo = std::max<Eigen::Index>(0, i - bandwidth_);
      const Eigen::Index hi = std::min<Eigen::Index>(dimension_ - 1, i + bandwidth_);
      for (Eigen::Index j = lo; j <= hi; ++j) out(i) += band_(bandwidth_ + i - j, j) * v(j);
    }
    return out;
  }

  [[nodiscard]] BandedMatrix operator*(Scalar c) const {
    BandedMatrix out = *this;
    out.band_ *= c;
    return out;
  }

  [[nodiscard]] BandedMatrix operator+(const BandedMatrix& other) const {
    if (other.dimension_ != dimension_ || other.bandwidth_ != bandwidth_) {
      throw InvalidArgument("banded matrix shapes differ");
    }
    BandedMatrix out(dimension_, bandwidth_, symmetric_ && other.symmetric_);
    out.band_ = band_ + other.band_;
    return out;
  }

  [[nodiscard]] BandedMatrix operator-(const BandedMatrix& other) const {
    return *this + other * Scalar(-1);
  }

  /// Principal submatrix on rows/columns [first, first + count).
  [[nodiscard]] BandedMatrix block(Eigen::Index first, Eigen::Index count) const {
    BandedMatrix out(count, bandwidth_, symmetric_);
    out.band_ = band_.middleCols(first, count);
    for (Eigen::Index j = 0; j < count; ++j) {
      for (Eigen::Index r = 0; r < 2 * bandwidth_ + 1; ++r) {
        const Eigen::Index i = r - bandwidth_ + j;
        if (i < 0 || i >= count) out.band_(r, j) = Scalar(0);
      }
    }
    return out;
  }

  [[nodiscard]] DenseMatrix to_dense() const {
    DenseMatrix out = DenseMatrix::Zero(dimension_, dimension_);
    for (Eigen::Index j = 0; j < dimension_; ++j) {
      for (Eigen::Index i = std::max<Eigen::Index>(0, j - bandwidth_);
           i <= std::min<Eigen::Index>(dimension_ - 1, j + bandwidth_); ++i) {
        out(i, j) = band_(bandwidth_ + i - j, j);
      }
    }
    return out;
  }

  [[nodiscard]] Eigen::SparseMatrix<Scalar> to_sparse() const {
    std::vector<Eigen::Triplet<Scalar>> entries;
    entries.reserve(static_cast<std::size_t>(dimension_ * (2 * bandwidth_ + 1)));
    for (Eigen::Index j = 0; j < dimension_; ++j) {
      for (Eigen::Index i = std::max<Eigen::Index>(0, j - bandwidth_);
           i <= std::min<Eigen::Index>(dimension_ - 1, j + bandwidth_); ++i) {
        const Scalar v = band_(bandwidth_ + i - j, j);
        if (v != Scalar(0)) entries.emplace_back(i, j, v);
      }
    }
    Eigen::SparseMatrix<Scalar> out(dimension_, dimension_);
    out.setFromTriplets(entries.begin(), entries.end());
    return out;
  }

  /// Exact (bitwise) symmetry of the stored coefficients.
  [[nodiscard]] bool is_symmetric() const {
    for (Eigen::Index i = 0; i < dimension_; ++i) {
      for (Eigen::Index j = i + 1; j <= std::min<Eigen::Index>(dimension_ - 1, i + bandwidth_); ++j) {
        if ((*this)(i, j) != (*this)(j, i)) return false;
      }
    }
    return true;
  }

private:
  void check(Eigen::Index i, Eigen::Index j) const {
    if (!in_band(i, j)) {
      std::ostringstream msg;
      msg << "entry (" << i << ", " << j << ") lies outside the band";
      throw InvalidArgument(msg.str());
    }
  }

  Eigen::Index dimension_;
  Eigen::Index bandwidth_;
  bool symmetric_;
  DenseMatrix band_;
};

template <typename Scalar>
struct BandedSystem {
  BandedMatrix<Scalar> matrix;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> rhs;
};

/// Pivots with magnitude below this are treated as singular.
inline constexpr double kSingularPivot = 1e-14;

/**
 * Banded LU without row exchanges. Intended for the symmetric positive definite
 * and diagonally dominant systems arising from P1 discretizations; throws
 * SingularMatrixError when a pivot falls below kSingularPivot.
 */
template <typename Scalar>
[[nodiscard]] Eigen::Matrix<Scalar, Eigen::Dynamic, 1> solve_banded(const BandedSystem<Scalar>& system) {
  const auto& a = system.matrix;
  const Eigen::Index n = a.dimension();
  const Eigen::Index bw = a.bandwidth();
  if (system.rhs.size() != n) throw InvalidArgument("right-hand side size does not match matrix");

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> lu = a.to_dense();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x = system.rhs;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Scalar pivot = lu(k, k);
    using std::abs;
    if (abs(pivot) < Scalar(kSingularPivot)) {
      std::ostringstream msg;
      msg << "singular banded system: pivot " << pivot << " at row " << k;
      throw SingularMatrixError(msg.str());
    }
    const Eigen::Index last = std::min<Eigen::Index>(n - 1, k + bw);
    for (Eigen::Index i = k + 1; i <= last; ++i) {
      const Scalar factor = lu(i, k) / pivot;
      if (factor == Scalar(0)) continue;
      for (Eigen::Index j = k + 1; j <= last; ++j) lu(i, j) -= factor * lu(k, j);
      x(i) -= factor * x(k);
    }
  }
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    const Eigen::Index last = std::min<Eigen::Index>(n - 1, k + bw);
    Scalar sum = x(k);
    for (Eigen::Index j = k + 1; j <= last; ++j) sum -= lu(k, j) * x(j);
    x(k) = sum / lu(k, k);
  }
  return x;
}

/// P1 mass matrix on all nodes of the mesh (boundary nodes included).
template <typename Scalar = double>
[[nodiscard]] BandedMatrix<Scalar> assemble_mass(const SpatialMesh& mesh) {
  const auto n = static_cast<Eigen::Index>(mesh.n_nodes());
  const Scalar h = Scalar(mesh.dx());
  BandedMatrix<Scalar> m(n, 1, true);
  for (Eigen::Index e = 0; e + 1 < n; ++e) {
    m.add(e, e, h / Scalar(3));
    m.add(e + 1, e + 1, h / Scalar(3));
    m.add(e, e + 1, h / Scalar(6));
  }
  return m;
}

/// P1 stiffness matrix (integral of u' v') on all nodes.
template <typename Scalar = double>
[[nodiscard]] BandedMatrix<Scalar> assemble_stiffness(const SpatialMesh& mesh) {
  const auto n = static_cast<Eigen::Index>(mesh.n_nodes());
  const Scalar inv_h = Scalar(1) / Scalar(mesh.dx());
  BandedMatrix<Scalar> k(n, 1, true);
  for (Eigen::Index e = 0; e + 1 < n; ++e) {
    k.add(e, e, inv_h);
    k.add(e + 1, e + 1, inv_h);
    k.add(e, e + 1, -inv_h);
  }
  return k;
}

/// Row sums of the P1 mass matrix.
template <typename Scalar = double>
[[nodiscard]] Eigen::Matrix<Scalar, Eigen::Dynamic, 1> lumped_mass(const SpatialMesh& mesh) {
  const auto n = static_cast<Eigen::Index>(mesh.n_nodes());
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> d =
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Constant(n, Scalar(mesh.dx()));
  d(0) = d(n - 1) = Scalar(mesh.dx() / 2.0);
  return d;
}

/**
 * Nodal Laplacian -(K v)_j / (lumped mass)_j at interior nodes; boundary
 * entries are 0 (all estimator inputs satisfy homogeneous Dirichlet data).
 */
template <typename Derived>
[[nodiscard]] Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> discrete_laplacian(
    const Eigen::MatrixBase<Derived>& values, const SpatialMesh& mesh) {
  using Scalar = typename Derived::Scalar;
  const auto n = static_cast<Eigen::Index>(mesh.n_nodes());
  if (values.size() != n) throw InvalidArgument("nodal vector does not match mesh");
  const Scalar inv_h2 = Scalar(1) / Scalar(mesh.dx() * mesh.dx());
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n);
  for (Eigen::Index j = 1; j + 1 < n; ++j) {
    out(j) = (values(j - 1) - Scalar(2) * values(j) + values(j + 1)) * inv_h2;
  }
  return out;
}

/**
 * L²(t0, t1; L²(0,1)) norm of a nodal field: trapezoidal rule in time over
 * q_i = v_iᵀ M v_i with the exact P1 mass matrix in space.
 */
[[nodiscard]] double l2_norm_spacetime(const SpaceTimeField& field);
[[nodiscard]] double l2_norm_spacetime_squared(const SpaceTimeField& field);

/// v_iᵀ M v_i for a single nodal vector.
[[nodiscard]] double l2_norm_squared(const Vector& values, const SpatialMesh& mesh);

}  // namespace tampc
