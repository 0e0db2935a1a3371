#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>

#include "rfqprice/error.hpp"

namespace rfqprice {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace detail {

inline double norm1(const Matrix& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

// Padé approximants r_m(A) = (V - U)^{-1} (V + U) of degree 3, 5, 7, 9, 13.
// Coefficients and switching thresholds from Higham, SIAM J. Matrix Anal. Appl. 26 (2005).
inline void pade3(const Matrix& a, Matrix& u, Matrix& v) {
  constexpr std::array<double, 4> b{120.0, 60.0, 12.0, 1.0};
  const Matrix id = Matrix::Identity(a.rows(), a.cols());
  const Matrix a2 = a * a;
  u = a * (b[3] * a2 + b[1] * id);
  v = b[2] * a2 + b[0] * id;
}

inline void pade5(const Matrix& a, Matrix& u, Matrix& v) {
  constexpr std::array<double, 6> b{30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
  const Matrix id = Matrix::Identity(a.rows(), a.cols());
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  u = a * (b[5] * a4 + b[3] * a2 + b[1] * id);
  v = b[4] * a4 + b[2] * a2 + b[0] * id;
}

inline void pade7(const Matrix& a, Matrix& u, Matrix& v) {
  constexpr std::array<double, 8> b{17297280.0, 8648640.0, 1995840.0, 277200.0,
                                    25200.0,    1512.0,    56.0,      1.0};
  const Matrix id = Matrix::Identity(a.rows(), a.cols());
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  u = a * (b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  v = b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
}

inline void pade9(const Matrix& a, Matrix& u, Matrix& v) {
  constexpr std::array<double, 10> b{17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                     30270240.0,    2162160.0,    110880.0,     3960.0,
                                     90.0,          1.0};
  const Matrix id = Matrix::Identity(a.rows(), a.cols());
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix a8 = a6 * a2;
  u = a * (b[9] * a8 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  v = b[8] * a8 + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
}

inline void pade13(const Matrix& a, Matrix& u, Matrix& v) {
  constexpr std::array<double, 14> b{64764752532480000.0, 32382376266240000.0,
                                     7771770303897600.0,  1187353796428800.0,
                                     129060195264000.0,   10559470521600.0,
                                     670442572800.0,      33522128640.0,
                                     1323241920.0,        40840800.0,
                                     960960.0,            16380.0,
                                     182.0,               1.0};
  const Matrix id = Matrix::Identity(a.rows(), a.cols());
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix inner_u = b[13] * a6 + b[11] * a4 + b[9] * a2;
  u = a * (a6 * inner_u + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  const Matrix inner_v = b[12] * a6 + b[10] * a4 + b[8] * a2;
  v = a6 * inner_v + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
}

}  // namespace detail

/// Matrix exponential by scaling and squaring with a Padé approximant of
/// degree at most 13, choosing the lowest degree whose backward error bound
/// holds for the 1-norm of the argument.
inline Matrix expm(const Matrix& a) {
  if (a.rows() != a.cols()) throw StructuralError("expm: matrix must be square");
  if (a.size() == 0) return a;
  if (!a.allFinite()) throw NumericalError("expm: non-finite matrix entry");

  const double norm = detail::norm1(a);
  Matrix u, v;
  int squarings = 0;
  if (norm <= 1.495585217958292e-2) {
    detail::pade3(a, u, v);
  } else if (norm <= 2.539398330063230e-1) {
    detail::pade5(a, u, v);
  } else if (norm <= 9.504178996162932e-1) {
    detail::pade7(a, u, v);
  } else if (norm <= 2.097847961257068e0) {
    detail::pade9(a, u, v);
  } else {
    constexpr double theta13 = 5.371920351148152;
    if (norm > theta13) squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
    detail::pade13(a / std::ldexp(1.0, squarings), u, v);
  }
  Matrix result = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

/// Returns the top-right block of exp([[a, e], [0, b]] * t), i.e. the integral
/// of exp(a (t - s)) e exp(b s) for s in [0, t]. The top-left block exp(a t)
/// is written to `left` when non-null.
inline Matrix expm_integral(const Matrix& a, const Matrix& e, const Matrix& b, double t,
                            Matrix* left = nullptr) {
  const auto n = a.rows();
  const auto m = b.rows();
  if (e.rows() != n || e.cols() != m) throw StructuralError("expm_integral: block size mismatch");
  Matrix block = Matrix::Zero(n + m, n + m);
  block.topLeftCorner(n, n) = a * t;
  block.topRightCorner(n, m) = e * t;
  block.bottomRightCorner(m, m) = b * t;
  const Matrix ex = expm(block);
  if (left != nullptr) *left = ex.topLeftCorner(n, n);
  return ex.topRightCorner(n, m);
}

}  // namespace rfqprice
