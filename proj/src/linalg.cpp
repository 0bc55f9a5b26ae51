#include "ssde/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ssde {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::initializer_list<double> values)
    : rows_(rows), cols_(cols), data_(values) {
  if (data_.size() != rows * cols) throw LinalgError("Matrix: initializer size mismatch");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

Matrix& Matrix::operator+=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw LinalgError("Matrix +=: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw LinalgError("Matrix -=: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols_ != b.rows_) throw LinalgError("Matrix *: shape mismatch");
  Matrix c(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

SymmetricMatrix SymmetricMatrix::from_matrix(const Matrix& a) {
  if (a.rows() != a.cols()) throw LinalgError("SymmetricMatrix: matrix not square");
  SymmetricMatrix s(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    s.m_(i, i) = a(i, i);
    for (std::size_t j = i + 1; j < a.cols(); ++j) s.set(i, j, 0.5 * (a(i, j) + a(j, i)));
  }
  return s;
}

SymmetricMatrix SymmetricMatrix::diagonal(std::span<const double> d) {
  SymmetricMatrix s(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) s.set(i, i, d[i]);
  return s;
}

double SymmetricMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) t += m_(i, i);
  return t;
}

HermitianMatrix::HermitianMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {
  if (dim == 0) throw std::invalid_argument("HermitianMatrix: dim must be >= 1");
}

HermitianMatrix HermitianMatrix::diagonal(std::span<const double> d) {
  HermitianMatrix h(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) h.set(i, i, d[i]);
  return h;
}

void HermitianMatrix::set(std::size_t i, std::size_t j, Complex v) {
  if (i == j) {
    data_[i * dim_ + i] = Complex(v.real(), 0.0);
    return;
  }
  data_[i * dim_ + j] = v;
  data_[j * dim_ + i] = std::conj(v);
}

double HermitianMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += data_[i * dim_ + i].real();
  return t;
}

SymmetricMatrix HermitianMatrix::embed() const {
  const std::size_t p = dim_;
  Matrix e(2 * p, 2 * p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      const Complex z = (*this)(i, j);
      e(i, j) = z.real();
      e(i + p, j + p) = z.real();
      e(i, j + p) = -z.imag();
      e(i + p, j) = z.imag();
    }
  return SymmetricMatrix::from_matrix(e);
}

HermitianMatrix HermitianMatrix::from_embedding(const Matrix& e) {
  if (e.rows() != e.cols() || e.rows() % 2 != 0) throw LinalgError("from_embedding: bad shape");
  const std::size_t p = e.rows() / 2;
  HermitianMatrix h(p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) {
      // Average the four real blocks and the two triangles.
      const double re =
          0.25 * (e(i, j) + e(i + p, j + p) + e(j, i) + e(j + p, i + p));
      const double im =
          0.25 * (e(i + p, j) - e(i, j + p) - e(j + p, i) + e(j, i + p));
      h.set(i, j, Complex(re, i == j ? 0.0 : im));
    }
  return h;
}

Matrix SpectralState::reconstruct() const {
  const std::size_t p = dim();
  Matrix out(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < p; ++k) s += vectors(i, k) * values[k] * vectors(j, k);
      out(i, j) = s;
    }
  return out;
}

namespace {

constexpr int kMaxSweeps = 100;

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

// Zeroes a(p,q) with one Jacobi rotation and accumulates it into v.
void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const std::size_t n = a.rows();

  for (std::size_t k = 0; k < n; ++k) {
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double apk = a(p, k);
    const double aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace

SpectralState eigendecompose(const SymmetricMatrix& x, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("eigendecompose: tol must be > 0");
  const std::size_t n = x.dim();
  Matrix a = x.matrix();
  Matrix v = Matrix::identity(n);
  const double scale = x.matrix().frobenius_norm();

  bool converged = n == 1 || scale == 0.0;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    if (off_diagonal_norm(a) <= tol * scale) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Negligible relative to both diagonal entries: drop it.
        const double g = 100.0 * std::abs(apq);
        if (sweep > 3 && std::abs(a(p, p)) + g == std::abs(a(p, p)) &&
            std::abs(a(q, q)) + g == std::abs(a(q, q))) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        rotate(a, v, p, q);
      }
  }
  if (!converged && off_diagonal_norm(a) <= tol * scale) converged = true;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return a(l, l) < a(r, r); });

  SpectralState out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.values[k] = a(src, src);
    std::size_t lead = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(v(i, src)) > std::abs(v(lead, src))) lead = i;
    const double sign = v(lead, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = sign * v(i, src);
  }

  if (!converged) {
    const double residual = (out.reconstruct() - x.matrix()).frobenius_norm();
    throw EigenError("eigendecompose: Jacobi iteration did not converge", residual);
  }
  return out;
}

SymmetricMatrix apply_spectral_function(const SpectralState& s, const ScalarFunction& f) {
  const std::size_t p = s.dim();
  std::vector<double> fv(p);
  for (std::size_t k = 0; k < p; ++k) fv[k] = f(s.values[k]);
  SymmetricMatrix out(p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < p; ++k) acc += s.vectors(i, k) * fv[k] * s.vectors(j, k);
      out.set(i, j, acc);
    }
  return out;
}

SymmetricMatrix apply_spectral_function(const SymmetricMatrix& x, const ScalarFunction& f) {
  return apply_spectral_function(eigendecompose(x), f);
}

std::vector<double> hermitian_eigenvalues(const HermitianMatrix& x) {
  const SpectralState s = eigendecompose(x.embed());
  // Every eigenvalue of x appears twice in the embedding.
  std::vector<double> out(x.dim());
  for (std::size_t k = 0; k < x.dim(); ++k) out[k] = 0.5 * (s.values[2 * k] + s.values[2 * k + 1]);
  return out;
}

double orthonormality_defect(const Matrix& h) {
  Matrix g = h.transpose() * h;
  g -= Matrix::identity(h.cols());
  return g.frobenius_norm();
}

Matrix reorthonormalize(const Matrix& h) {
  if (h.rows() != h.cols()) throw LinalgError("reorthonormalize: matrix not square");
  if (!(orthonormality_defect(h) < 0.5))
    throw LinalgError("reorthonormalize: input too far from orthogonal (degenerate)");
  const SymmetricMatrix gram = SymmetricMatrix::from_matrix(h.transpose() * h);
  const SpectralState s = eigendecompose(gram);
  if (s.values.front() <= 0.0) throw LinalgError("reorthonormalize: singular input");
  Matrix q = h * apply_spectral_function(s, [](double v) { return 1.0 / std::sqrt(v); }).matrix();
  // One Newton-Schulz pass cleans up the rounding left by the inverse square root.
  const Matrix qtq = q.transpose() * q;
  q = q * (1.5 * Matrix::identity(q.cols()) - 0.5 * qtq);
  return q;
}

}  // namespace ssde
