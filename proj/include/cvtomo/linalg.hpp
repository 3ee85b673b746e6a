#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace cvtomo {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

// Nodes and weights for the rule  \int f(x) e^{-x^2} dx ~ sum_k w_k f(x_k).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  // log(w_k) + x_k^2, i.e. the weights for integrating f(x) itself.
  std::vector<double> log_plain_weights;
};

GaussHermiteRule gauss_hermite(int order);

double hermitian_defect(const CMatrix& m);

// Eigenvalues (ascending) of the Hermitian part of m.
RVector hermitian_eigenvalues(const CMatrix& m);

// Sum of |eigenvalues| of a Hermitian matrix.
double trace_norm(const CMatrix& m);

// Largest |eigenvalue| of a Hermitian matrix.
double spectral_norm_hermitian(const CMatrix& m);

// Projection of a real vector onto {x >= 0, sum x = total}.
RVector project_to_simplex(const RVector& v, double total = 1.0);

// Kronecker product, first argument is the slow index.
CMatrix kron(const CMatrix& a, const CMatrix& b);
CVector kron(const CVector& a, const CVector& b);

} // namespace cvtomo
