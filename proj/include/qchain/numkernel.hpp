#pragma once

// Dense complex matrix algebra and Hermitian spectral calculus.
//
// All logarithms are base 2. Matrix functions act on the support of their
// argument: eigenvalues at or below kSupportCutoff * lambda_max are treated as
// exact zeros, which gives generalized inverses for negative powers.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qchain/error.hpp"

namespace qchain {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kSupportCutoff = 1e-10;
inline constexpr double kHermitianTol = 1e-10;

struct HermitianEigen {
  RealVector values;  // ascending
  Matrix vectors;     // columns are eigenvectors
};

/// Diagonalizes a Hermitian matrix after symmetrizing it as (M + M^dagger)/2.
/// Throws NonHermitianInput if any entry of M - M^dagger exceeds
/// kHermitianTol * max(1, max|M_ij|).
HermitianEigen hermitian_eig(const Matrix& m);

/// Largest entrywise |M - M^dagger|.
double hermiticity_defect(const Matrix& m);

Matrix hermitian_part(const Matrix& m);

/// Rebuilds V f(lambda) V^dagger where f is applied on the support only; off-support
/// eigenvalues map to zero.
Matrix apply_on_support(const HermitianEigen& eig, const std::function<double(double)>& f);

/// Generalized power of a PSD matrix. t = 0 yields the support projector.
Matrix psd_power(const Matrix& m, double t);
Matrix psd_power(const HermitianEigen& eig, double t);

/// Base-2 logarithm on the support.
Matrix psd_log(const Matrix& m);
Matrix psd_log(const HermitianEigen& eig);

Matrix support_projector(const HermitianEigen& eig);

/// Number of eigenvalues above the support cutoff.
std::size_t support_rank(const HermitianEigen& eig);

/// Support threshold used for eig: kSupportCutoff times the largest eigenvalue (clipped at 0).
double support_threshold(const HermitianEigen& eig);

struct LoewnerReport {
  bool holds = false;
  double min_eigenvalue = 0.0;
};

/// Decides A >= B in the Loewner order up to tol on lambda_min(A - B).
LoewnerReport loewner_geq(const Matrix& a, const Matrix& b, double tol);

Matrix kron(const Matrix& a, const Matrix& b);

/// Traces out subsystem `traced` of a multipartite operator with local dimensions dims.
Matrix partial_trace(const Matrix& m, std::span<const std::size_t> dims, std::size_t traced);

Complex trace(const Matrix& m);
Matrix adjoint(const Matrix& m);
double frobenius_norm(const Matrix& m);

Matrix identity(std::size_t dim);

bool all_finite(const Matrix& m);

/// max_ij |A_ij - B_ij|
double max_abs_diff(const Matrix& a, const Matrix& b);

void require_same_shape(const Matrix& a, const Matrix& b, const char* where);

}  // namespace qchain
