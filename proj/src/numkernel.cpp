#include "qchain/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace qchain {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonHermitianInput: return "NonHermitianInput";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::AlphabetMismatch: return "AlphabetMismatch";
    case ErrorCode::NearOneOrder: return "NearOneOrder";
    case ErrorCode::SupportViolation: return "SupportViolation";
    case ErrorCode::NonCommutingInputs: return "NonCommutingInputs";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::NonUnitalCandidate: return "NonUnitalCandidate";
    case ErrorCode::OrderOutOfRange: return "OrderOutOfRange";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::MalformedInput: return "MalformedInput";
  }
  return "Unknown";
}

double hermiticity_defect(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

HermitianEigen hermitian_eig(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "hermitian_eig: matrix is not square");
  }
  if (m.size() == 0) return {RealVector(0), Matrix(0, 0)};
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double defect = hermiticity_defect(m);
  if (!(defect <= kHermitianTol * scale)) {
    throw Error(ErrorCode::NonHermitianInput,
                "hermitian_eig: asymmetry " + std::to_string(defect) + " exceeds tolerance");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m));
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::InvalidArgument, "hermitian_eig: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double support_threshold(const HermitianEigen& eig) {
  if (eig.values.size() == 0) return 0.0;
  return kSupportCutoff * std::max(0.0, eig.values.maxCoeff());
}

std::size_t support_rank(const HermitianEigen& eig) {
  const double cut = support_threshold(eig);
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) > cut) ++r;
  }
  return r;
}

Matrix apply_on_support(const HermitianEigen& eig, const std::function<double(double)>& f) {
  const auto n = eig.values.size();
  const double cut = support_threshold(eig);
  RealVector mapped = RealVector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (eig.values(i) > cut) mapped(i) = f(eig.values(i));
  }
  Matrix out = eig.vectors * mapped.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
  return hermitian_part(out);
}

Matrix psd_power(const HermitianEigen& eig, double t) {
  return apply_on_support(eig, [t](double x) { return std::pow(x, t); });
}

Matrix psd_power(const Matrix& m, double t) { return psd_power(hermitian_eig(m), t); }

Matrix psd_log(const HermitianEigen& eig) {
  return apply_on_support(eig, [](double x) { return std::log2(x); });
}

Matrix psd_log(const Matrix& m) { return psd_log(hermitian_eig(m)); }

Matrix support_projector(const HermitianEigen& eig) {
  return apply_on_support(eig, [](double) { return 1.0; });
}

LoewnerReport loewner_geq(const Matrix& a, const Matrix& b, double tol) {
  require_same_shape(a, b, "loewner_geq");
  const HermitianEigen eig = hermitian_eig(a - b);
  LoewnerReport report;
  report.min_eigenvalue = eig.values.size() ? eig.values(0) : 0.0;
  report.holds = report.min_eigenvalue >= -tol;
  return report;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix partial_trace(const Matrix& m, std::span<const std::size_t> dims, std::size_t traced) {
  if (traced >= dims.size()) {
    throw Error(ErrorCode::InvalidArgument, "partial_trace: subsystem index out of range");
  }
  const std::size_t total =
      std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
  if (m.rows() != static_cast<Eigen::Index>(total) || m.cols() != m.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "partial_trace: dims do not match matrix size");
  }
  // Index layout: (outer, traced, inner) with row-major subsystem ordering.
  std::size_t outer = 1;
  for (std::size_t k = 0; k < traced; ++k) outer *= dims[k];
  const std::size_t mid = dims[traced];
  const std::size_t inner = total / (outer * mid);
  const auto reduced = static_cast<Eigen::Index>(outer * inner);
  Matrix out = Matrix::Zero(reduced, reduced);
  for (std::size_t a = 0; a < outer; ++a) {
    for (std::size_t c = 0; c < inner; ++c) {
      for (std::size_t a2 = 0; a2 < outer; ++a2) {
        for (std::size_t c2 = 0; c2 < inner; ++c2) {
          Complex acc = 0.0;
          for (std::size_t b = 0; b < mid; ++b) {
            acc += m(static_cast<Eigen::Index>((a * mid + b) * inner + c),
                     static_cast<Eigen::Index>((a2 * mid + b) * inner + c2));
          }
          out(static_cast<Eigen::Index>(a * inner + c),
              static_cast<Eigen::Index>(a2 * inner + c2)) = acc;
        }
      }
    }
  }
  return out;
}

Complex trace(const Matrix& m) { return m.trace(); }

Matrix adjoint(const Matrix& m) { return m.adjoint(); }

double frobenius_norm(const Matrix& m) { return m.norm(); }

Matrix identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return Matrix::Identity(n, n);
}

bool all_finite(const Matrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* where) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(where) + ": shapes " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                    std::to_string(b.cols()) + " differ");
  }
}

}  // namespace qchain
