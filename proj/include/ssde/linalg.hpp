#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssde {

/// Dense row-major real matrix. Small sizes only (p up to a few dozen).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::initializer_list<double> values);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  Matrix transpose() const;
  double frobenius_norm() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, double s) { return a *= s; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }
  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Real symmetric matrix; every write goes to both (i,j) and (j,i).
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t dim) : m_(dim, dim) {
    if (dim == 0) throw std::invalid_argument("SymmetricMatrix: dim must be >= 1");
  }
  /// Symmetrizes (A + A^T)/2.
  static SymmetricMatrix from_matrix(const Matrix& a);
  static SymmetricMatrix diagonal(std::span<const double> d);

  std::size_t dim() const { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  void set(std::size_t i, std::size_t j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }
  const Matrix& matrix() const { return m_; }
  double trace() const;

  friend bool operator==(const SymmetricMatrix&, const SymmetricMatrix&) = default;

 private:
  Matrix m_;
};

using Complex = std::complex<double>;

/// Complex Hermitian matrix; the diagonal is kept real and (j,i) = conj(i,j).
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(std::size_t dim);
  static HermitianMatrix diagonal(std::span<const double> d);

  std::size_t dim() const { return dim_; }
  Complex operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }
  void set(std::size_t i, std::size_t j, Complex v);
  double trace() const;

  /// Real 2p x 2p symmetric embedding [[Re, -Im], [Im, Re]].
  SymmetricMatrix embed() const;
  /// Inverse of embed(); averages the redundant blocks.
  static HermitianMatrix from_embedding(const Matrix& e);

  friend bool operator==(const HermitianMatrix&, const HermitianMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<Complex> data_;
};

/// Eigenvalues ascending; eigenvectors are the columns of `vectors`.
struct SpectralState {
  std::vector<double> values;
  Matrix vectors;

  std::size_t dim() const { return values.size(); }
  Matrix reconstruct() const;
};

class EigenError : public std::runtime_error {
 public:
  EigenError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class LinalgError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using ScalarFunction = std::function<double(double)>;

/// Cyclic Jacobi eigensolver. Columns are sign-normalized so the largest
/// magnitude entry is positive (first such row on ties).
SpectralState eigendecompose(const SymmetricMatrix& x, double tol = 1e-14);

/// H f(Lambda) H^T for an existing decomposition.
SymmetricMatrix apply_spectral_function(const SpectralState& s, const ScalarFunction& f);
SymmetricMatrix apply_spectral_function(const SymmetricMatrix& x, const ScalarFunction& f);

/// Eigenvalues of a Hermitian matrix, ascending (via the real embedding).
std::vector<double> hermitian_eigenvalues(const HermitianMatrix& x);

/// Orthogonal polar factor of h, i.e. the nearest orthogonal matrix.
Matrix reorthonormalize(const Matrix& h);

/// ||H^T H - I||_F
double orthonormality_defect(const Matrix& h);

}  // namespace ssde
