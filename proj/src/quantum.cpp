#include "qchain/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qchain {

// ---------------------------------------------------------------------------
// DensityOperator

DensityOperator::DensityOperator(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::InvalidState, "density operator must be a nonempty square matrix");
  }
  if (!all_finite(m)) throw Error(ErrorCode::InvalidState, "density operator has non-finite entries");
  if (hermiticity_defect(m) > kTol) {
    throw Error(ErrorCode::InvalidState, "density operator is not Hermitian");
  }
  matrix_ = hermitian_part(m);
  eigen_ = hermitian_eig(matrix_);
  if (eigen_.values(0) < -kTol) {
    throw Error(ErrorCode::InvalidState, "density operator has negative eigenvalue " +
                                             std::to_string(eigen_.values(0)));
  }
  if (std::abs(matrix_.trace().real() - 1.0) > kTol) {
    throw Error(ErrorCode::InvalidState, "density operator trace is not 1");
  }
  support_ = qchain::support_projector(eigen_);
}

DensityOperator DensityOperator::normalized(const Matrix& m) {
  const double tr = m.trace().real();
  if (!(tr > 0.0)) throw Error(ErrorCode::InvalidState, "cannot normalize operator with trace <= 0");
  return DensityOperator(hermitian_part(m) / tr);
}

DensityOperator DensityOperator::maximally_mixed(std::size_t dim) {
  return DensityOperator(identity(dim) / static_cast<double>(dim));
}

DensityOperator DensityOperator::basis_state(std::size_t dim, std::size_t index) {
  if (index >= dim) throw Error(ErrorCode::InvalidArgument, "basis_state: index out of range");
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
  return DensityOperator(m);
}

DensityOperator DensityOperator::pure(const Eigen::VectorXcd& psi) {
  const double n = psi.norm();
  if (!(n > 0.0)) throw Error(ErrorCode::InvalidState, "pure: zero vector");
  const Eigen::VectorXcd v = psi / n;
  return DensityOperator(v * v.adjoint());
}

// ---------------------------------------------------------------------------
// PositiveMapRep

PositiveMapRep::PositiveMapRep(std::vector<Matrix> kraus, bool pre_transpose)
    : kraus_(std::move(kraus)), pre_transpose_(pre_transpose) {
  if (kraus_.empty()) throw Error(ErrorCode::InvalidArgument, "map needs at least one Kraus operator");
  dim_out_ = static_cast<std::size_t>(kraus_.front().rows());
  dim_in_ = static_cast<std::size_t>(kraus_.front().cols());
  if (dim_in_ == 0 || dim_out_ == 0) throw Error(ErrorCode::InvalidArgument, "empty Kraus operator");
  for (const auto& k : kraus_) {
    if (static_cast<std::size_t>(k.rows()) != dim_out_ || static_cast<std::size_t>(k.cols()) != dim_in_) {
      throw Error(ErrorCode::DimensionMismatch, "Kraus operators have inconsistent shapes");
    }
    if (!all_finite(k)) throw Error(ErrorCode::MalformedInput, "Kraus operator has non-finite entries");
  }
  Matrix kdk = Matrix::Zero(static_cast<Eigen::Index>(dim_in_), static_cast<Eigen::Index>(dim_in_));
  Matrix kkd = Matrix::Zero(static_cast<Eigen::Index>(dim_out_), static_cast<Eigen::Index>(dim_out_));
  for (const auto& k : kraus_) {
    kdk.noalias() += k.adjoint() * k;
    kkd.noalias() += k * k.adjoint();
  }
  // The transpose preserves both the trace and the identity, so the flags are the
  // same with or without it.
  trace_preserving_ = (kdk - qchain::identity(dim_in_)).norm() <= kTol;
  unital_ = dim_in_ == dim_out_ && (kkd - qchain::identity(dim_out_)).norm() <= kTol;
  if (!pre_transpose_) {
    completely_positive_ = true;
  } else {
    const HermitianEigen eig = hermitian_eig(choi());
    const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
    completely_positive_ = eig.values(0) >= -kTol * scale;
  }
}

PositiveMapRep PositiveMapRep::identity(std::size_t dim) {
  return PositiveMapRep({qchain::identity(dim)});
}

PositiveMapRep PositiveMapRep::unitary(const Matrix& u) { return PositiveMapRep({u}); }

PositiveMapRep PositiveMapRep::fully_depolarizing(std::size_t dim) {
  // Kraus operators |i><j| / sqrt(d).
  std::vector<Matrix> kraus;
  const auto n = static_cast<Eigen::Index>(dim);
  const double s = 1.0 / std::sqrt(static_cast<double>(dim));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      Matrix k = Matrix::Zero(n, n);
      k(i, j) = s;
      kraus.push_back(std::move(k));
    }
  }
  return PositiveMapRep(std::move(kraus));
}

PositiveMapRep PositiveMapRep::unitary_mixture(const std::vector<Matrix>& unitaries,
                                               const std::vector<double>& weights) {
  if (unitaries.size() != weights.size() || unitaries.empty()) {
    throw Error(ErrorCode::InvalidArgument, "unitary_mixture: weights and unitaries differ in count");
  }
  std::vector<Matrix> kraus;
  for (std::size_t k = 0; k < unitaries.size(); ++k) {
    if (weights[k] < 0.0) throw Error(ErrorCode::InvalidArgument, "unitary_mixture: negative weight");
    if (weights[k] > 0.0) kraus.push_back(std::sqrt(weights[k]) * unitaries[k]);
  }
  return PositiveMapRep(std::move(kraus));
}

PositiveMapRep PositiveMapRep::classical(const std::vector<std::vector<double>>& w) {
  if (w.empty() || w.front().empty()) throw Error(ErrorCode::InvalidArgument, "classical: empty channel");
  const auto n_out = static_cast<Eigen::Index>(w.size());
  const auto n_in = static_cast<Eigen::Index>(w.front().size());
  std::vector<Matrix> kraus;
  for (Eigen::Index y = 0; y < n_out; ++y) {
    if (static_cast<Eigen::Index>(w[static_cast<std::size_t>(y)].size()) != n_in) {
      throw Error(ErrorCode::DimensionMismatch, "classical: ragged transition matrix");
    }
    for (Eigen::Index x = 0; x < n_in; ++x) {
      const double p = w[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)];
      if (p < 0.0) throw Error(ErrorCode::InvalidArgument, "classical: negative transition probability");
      if (p == 0.0) continue;
      Matrix k = Matrix::Zero(n_out, n_in);
      k(y, x) = std::sqrt(p);
      kraus.push_back(std::move(k));
    }
  }
  return PositiveMapRep(std::move(kraus));
}

Matrix PositiveMapRep::apply(const Matrix& x) const {
  if (static_cast<std::size_t>(x.rows()) != dim_in_ || static_cast<std::size_t>(x.cols()) != dim_in_) {
    throw Error(ErrorCode::DimensionMismatch,
                "apply_map: input is " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                    ", map expects " + std::to_string(dim_in_));
  }
  const Matrix in = pre_transpose_ ? Matrix(x.transpose()) : x;
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dim_out_), static_cast<Eigen::Index>(dim_out_));
  for (const auto& k : kraus_) out.noalias() += k * in * k.adjoint();
  return out;
}

DensityOperator PositiveMapRep::apply(const DensityOperator& rho) const {
  if (!trace_preserving_) {
    throw Error(ErrorCode::InvalidArgument, "apply: state outputs need a trace-preserving map");
  }
  // Renormalization only absorbs round-off here (trace error <= kTol).
  return DensityOperator::normalized(apply(rho.matrix()));
}

Matrix PositiveMapRep::choi() const {
  const auto din = static_cast<Eigen::Index>(dim_in_);
  const auto dout = static_cast<Eigen::Index>(dim_out_);
  Matrix c = Matrix::Zero(din * dout, din * dout);
  for (Eigen::Index i = 0; i < din; ++i) {
    for (Eigen::Index j = 0; j < din; ++j) {
      Matrix eij = Matrix::Zero(din, din);
      eij(i, j) = 1.0;
      c.block(i * dout, j * dout, dout, dout) = apply(eij);
    }
  }
  return c;
}

PositiveMapRep PositiveMapRep::with_pre_transpose(bool on) const {
  return PositiveMapRep(kraus_, on);
}

Matrix apply_map(const PositiveMapRep& map, const Matrix& x) { return map.apply(x); }
Matrix choi(const PositiveMapRep& map) { return map.choi(); }
bool is_cp(const PositiveMapRep& map) { return map.is_completely_positive(); }
bool is_tp(const PositiveMapRep& map) { return map.is_trace_preserving(); }
bool is_unital(const PositiveMapRep& map) { return map.is_unital(); }

PositiveMapRep tensor(const PositiveMapRep& e, const PositiveMapRep& f) {
  if (e.pre_transpose() != f.pre_transpose()) {
    throw Error(ErrorCode::InvalidArgument,
                "tensor: factors must agree on pre_transpose (partial transposes are not representable)");
  }
  if (e.dim_in() * f.dim_in() > kMaxDimension || e.dim_out() * f.dim_out() > kMaxDimension) {
    throw Error(ErrorCode::DimensionTooLarge, "tensor: product map exceeds dimension guard");
  }
  std::vector<Matrix> kraus;
  kraus.reserve(e.kraus().size() * f.kraus().size());
  for (const auto& a : e.kraus()) {
    for (const auto& b : f.kraus()) kraus.push_back(kron(a, b));
  }
  return PositiveMapRep(std::move(kraus), e.pre_transpose());
}

PositiveMapRep tensor_with_identity(const PositiveMapRep& e, std::size_t ref_dim) {
  if (e.pre_transpose()) {
    throw Error(ErrorCode::InvalidArgument,
                "tensor_with_identity: stabilization needs a completely positive Kraus representation");
  }
  return tensor(e, PositiveMapRep::identity(ref_dim));
}

// ---------------------------------------------------------------------------
// Spectrum, pinching, joint eigenbasis

SpectrumInfo spectrum(const HermitianEigen& eig, double cluster_tol) {
  if (!(cluster_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "spectrum: cluster_tol must be positive");
  SpectrumInfo info;
  const Eigen::Index n = eig.values.size();
  if (n == 0) return info;
  const double scale = std::max(std::abs(eig.values(0)), std::abs(eig.values(n - 1)));
  const double gap = cluster_tol * scale;
  std::vector<Eigen::Index> current{0};
  auto flush = [&] {
    double mean = 0.0;
    Matrix p = Matrix::Zero(n, n);
    for (Eigen::Index c : current) {
      mean += eig.values(c);
      p.noalias() += eig.vectors.col(c) * eig.vectors.col(c).adjoint();
    }
    info.distinct_values.push_back(mean / static_cast<double>(current.size()));
    info.projectors.push_back(hermitian_part(p));
    info.members.push_back(current);
  };
  for (Eigen::Index i = 1; i < n; ++i) {
    if (eig.values(i) - eig.values(i - 1) <= gap) {
      current.push_back(i);
    } else {
      flush();
      current = {i};
    }
  }
  flush();
  return info;
}

SpectrumInfo spectrum(const DensityOperator& sigma, double cluster_tol) {
  return spectrum(sigma.eigen(), cluster_tol);
}

Matrix pinch(const SpectrumInfo& spec, const Matrix& x) {
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (const auto& p : spec.projectors) out.noalias() += p * x * p;
  return out;
}

DensityOperator pinch(const DensityOperator& sigma, const DensityOperator& rho) {
  if (sigma.dim() != rho.dim()) throw Error(ErrorCode::DimensionMismatch, "pinch: dimensions differ");
  return DensityOperator::normalized(pinch(spectrum(sigma), rho.matrix()));
}

Matrix joint_eigenbasis(const DensityOperator& sigma, const DensityOperator& tau) {
  if (sigma.dim() != tau.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "joint_eigenbasis: dimensions differ");
  }
  const Matrix comm = sigma.matrix() * tau.matrix() - tau.matrix() * sigma.matrix();
  if (comm.cwiseAbs().maxCoeff() > 1e-8) {
    throw Error(ErrorCode::NonCommutingInputs, "joint_eigenbasis: inputs do not commute");
  }
  const SpectrumInfo spec = spectrum(sigma);
  const auto n = static_cast<Eigen::Index>(sigma.dim());
  Matrix basis(n, n);
  Eigen::Index col = 0;
  for (const auto& members : spec.members) {
    const auto k = static_cast<Eigen::Index>(members.size());
    Matrix block(n, k);
    for (Eigen::Index j = 0; j < k; ++j) block.col(j) = sigma.eigen().vectors.col(members[static_cast<std::size_t>(j)]);
    const Matrix restricted = hermitian_part(block.adjoint() * tau.matrix() * block);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(restricted);
    basis.middleCols(col, k) = block * solver.eigenvectors();
    col += k;
  }
  return basis;
}

bool is_orthonormal(const Matrix& basis, double tol) {
  if (basis.rows() != basis.cols()) return false;
  const Matrix g = basis.adjoint() * basis;
  return (g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() <= tol;
}

Distribution measure(const Matrix& basis, const Matrix& x) {
  if (basis.rows() != x.rows() || x.rows() != x.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "measure: basis and operator dimensions differ");
  }
  std::vector<double> probs(static_cast<std::size_t>(basis.cols()));
  for (Eigen::Index i = 0; i < basis.cols(); ++i) {
    const double p = (basis.col(i).adjoint() * x * basis.col(i))(0, 0).real();
    probs[static_cast<std::size_t>(i)] = p < kMeasureFloor ? 0.0 : p;
  }
  return Distribution(std::move(probs));
}

Distribution measure(const Matrix& basis, const DensityOperator& rho) {
  return measure(basis, rho.matrix());
}

DensityOperator measurement_map(const Matrix& basis, const DensityOperator& rho) {
  const Distribution p = measure(basis, rho);
  Matrix out = Matrix::Zero(basis.rows(), basis.rows());
  for (Eigen::Index i = 0; i < basis.cols(); ++i) {
    out.noalias() += p[static_cast<std::size_t>(i)] * (basis.col(i) * basis.col(i).adjoint());
  }
  return DensityOperator::normalized(out);
}

// ---------------------------------------------------------------------------
// Tensor powers

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  if (a.dim() * b.dim() > kMaxDimension) {
    throw Error(ErrorCode::DimensionTooLarge, "tensor: product state exceeds dimension guard");
  }
  return DensityOperator::normalized(kron(a.matrix(), b.matrix()));
}

DensityOperator tensor_power(const DensityOperator& rho, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "tensor_power: n must be at least 1");
  std::size_t dim = 1;
  for (std::size_t k = 0; k < n; ++k) {
    dim *= rho.dim();
    if (dim > kMaxDimension) {
      throw Error(ErrorCode::DimensionTooLarge, "tensor_power: dimension exceeds " + std::to_string(kMaxDimension));
    }
  }
  Matrix out = rho.matrix();
  for (std::size_t k = 1; k < n; ++k) out = kron(out, rho.matrix());
  return DensityOperator::normalized(out);
}

PositiveMapRep tensor_power(const PositiveMapRep& map, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "tensor_power: n must be at least 1");
  PositiveMapRep out = map;
  for (std::size_t k = 1; k < n; ++k) out = tensor(out, map);
  return out;
}

}  // namespace qchain
