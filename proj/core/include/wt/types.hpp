#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

namespace wt {

using Cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr Cplx iu{0.0, 1.0};

// Largest singular value. All matrices here are small (m <= 8), so the
// dense SVD cost is negligible.
inline double op_norm(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

inline Matrix herm_part(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

// (A - A^*) / 2i, the matrix analogue of Im.
inline Matrix imag_part(const Matrix& a) {
  return (a - a.adjoint()) / Cplx(0.0, 2.0);
}

inline double hermiticity_defect(const Matrix& a) {
  return op_norm(a - a.adjoint());
}

// Hermitian positive semidefinite within tol: symmetry defect and the most
// negative eigenvalue of the hermitian part both bounded by tol.
inline bool is_hpsd(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  if (hermiticity_defect(a) > tol) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm_part(a));
  return es.eigenvalues().minCoeff() >= -tol;
}

inline double unitarity_defect(const Matrix& u) {
  return op_norm(u.adjoint() * u - Matrix::Identity(u.rows(), u.cols()));
}

// Principal square root of a hermitian PSD matrix; eigenvalues are clamped
// at zero to absorb roundoff.
inline Matrix sqrt_hpsd(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm_part(a));
  Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

inline Matrix inv_sqrt_hpd(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm_part(a));
  Eigen::VectorXd d = es.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

// Nearest unitary in Frobenius norm (polar factor).
inline Matrix polar_unitary(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

// Deterministic RNG. Distributions are hand-rolled on top of the raw 64-bit
// stream so sequences are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next_u64() {
    // splitmix64: tiny, seedable, and fully portable.
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  double u01() {  // in (0,1)
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = u01(), u2 = u01();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * pi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * pi * u2);
  }

  Cplx cnormal() {
    double re = normal();
    double im = normal();
    return {re, im};
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Haar-ish unitary: QR of a complex Ginibre matrix with the R diagonal
// phases absorbed so the factorization is unique.
inline Matrix random_unitary(int m, Rng& rng) {
  Matrix g(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) g(i, j) = rng.cnormal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < m; ++j) {
    Cplx d = r(j, j);
    Cplx ph = (std::abs(d) > 0) ? d / std::abs(d) : Cplx(1, 0);
    q.col(j) *= ph;
  }
  return q;
}

// Uniformly sampled function on x0 + dx * {0, 1, ..., n-1}.
struct SampledFunction {
  double x0 = 0.0;
  double dx = 1.0;
  std::vector<Cplx> values;

  double x(std::size_t i) const { return x0 + dx * static_cast<double>(i); }
  std::size_t size() const { return values.size(); }
  double max_abs() const {
    double m = 0.0;
    for (const Cplx& v : values) m = std::max(m, std::abs(v));
    return m;
  }
};

}  // namespace wt
