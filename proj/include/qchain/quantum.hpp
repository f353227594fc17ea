#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qchain/distribution.hpp"
#include "qchain/numkernel.hpp"

namespace qchain {

/// Largest Hilbert-space dimension accepted by tensor-power constructions.
inline constexpr std::size_t kMaxDimension = 64;

/// Positive semidefinite, unit-trace operator. The eigendecomposition is computed once
/// at construction, so instances are immutable and safe to share across threads.
class DensityOperator {
 public:
  static constexpr double kTol = 1e-10;

  /// Validates Hermiticity, positivity and unit trace (each within kTol).
  explicit DensityOperator(const Matrix& m);

  /// Rescales a nonzero PSD matrix to unit trace before validating it.
  static DensityOperator normalized(const Matrix& m);

  static DensityOperator maximally_mixed(std::size_t dim);
  static DensityOperator basis_state(std::size_t dim, std::size_t index);
  static DensityOperator pure(const Eigen::VectorXcd& psi);

  const Matrix& matrix() const noexcept { return matrix_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
  const HermitianEigen& eigen() const noexcept { return eigen_; }
  const Matrix& support_projector() const noexcept { return support_; }

 private:
  Matrix matrix_;
  HermitianEigen eigen_;
  Matrix support_;
};

/// A linear map X -> sum_k K_k T(X) K_k^dagger where T is either the identity or the
/// transpose (pre_transpose). Flags are evaluated at construction.
class PositiveMapRep {
 public:
  static constexpr double kTol = 1e-9;

  explicit PositiveMapRep(std::vector<Matrix> kraus, bool pre_transpose = false);

  static PositiveMapRep identity(std::size_t dim);
  static PositiveMapRep unitary(const Matrix& u);
  /// Replaces every input by I/d (trace-scaled).
  static PositiveMapRep fully_depolarizing(std::size_t dim);
  /// Convex mixture of unitary channels; weights must sum to 1.
  static PositiveMapRep unitary_mixture(const std::vector<Matrix>& unitaries,
                                        const std::vector<double>& weights);
  /// Embeds a classical channel W(y|x) (columns indexed by x) as a measure-and-prepare map.
  static PositiveMapRep classical(const std::vector<std::vector<double>>& w);

  const std::vector<Matrix>& kraus() const noexcept { return kraus_; }
  bool pre_transpose() const noexcept { return pre_transpose_; }
  std::size_t dim_in() const noexcept { return dim_in_; }
  std::size_t dim_out() const noexcept { return dim_out_; }

  bool is_trace_preserving() const noexcept { return trace_preserving_; }
  bool is_unital() const noexcept { return unital_; }
  bool is_completely_positive() const noexcept { return completely_positive_; }

  Matrix apply(const Matrix& x) const;
  DensityOperator apply(const DensityOperator& rho) const;

  /// Choi operator sum_ij |i><j| (x) Phi(|i><j|), input factor first.
  Matrix choi() const;

  /// Same Kraus set with the transpose composed on the input.
  PositiveMapRep with_pre_transpose(bool on) const;

 private:
  std::vector<Matrix> kraus_;
  bool pre_transpose_ = false;
  std::size_t dim_in_ = 0;
  std::size_t dim_out_ = 0;
  bool trace_preserving_ = false;
  bool unital_ = false;
  bool completely_positive_ = false;
};

Matrix apply_map(const PositiveMapRep& map, const Matrix& x);
Matrix choi(const PositiveMapRep& map);
bool is_cp(const PositiveMapRep& map);
bool is_tp(const PositiveMapRep& map);
bool is_unital(const PositiveMapRep& map);

/// E (x) F on the tensor product of inputs. Both factors must agree on pre_transpose,
/// since a transpose on one factor only is not a pre_transpose of the product.
PositiveMapRep tensor(const PositiveMapRep& e, const PositiveMapRep& f);

/// E (x) id_R. Requires a map without pre_transpose.
PositiveMapRep tensor_with_identity(const PositiveMapRep& e, std::size_t ref_dim);

struct SpectrumInfo {
  std::vector<double> distinct_values;  // ascending cluster means
  std::vector<Matrix> projectors;
  std::vector<std::vector<Eigen::Index>> members;  // eigenvector columns per cluster
  std::size_t count() const noexcept { return distinct_values.size(); }
};

inline constexpr double kClusterTol = 1e-8;

/// Groups eigenvalues whose consecutive gap is at most cluster_tol * lambda_max.
SpectrumInfo spectrum(const HermitianEigen& eig, double cluster_tol = kClusterTol);
SpectrumInfo spectrum(const DensityOperator& sigma, double cluster_tol = kClusterTol);

/// Spectral pinching rho -> sum_lambda P_lambda rho P_lambda.
DensityOperator pinch(const DensityOperator& sigma, const DensityOperator& rho);
Matrix pinch(const SpectrumInfo& spec, const Matrix& x);

/// Orthonormal basis (as columns) of common eigenvectors of two commuting states.
Matrix joint_eigenbasis(const DensityOperator& sigma, const DensityOperator& tau);

/// Outcome distribution <x|rho|x> of the rank-one projective measurement in `basis`.
/// Probabilities below kMeasureFloor are set to exactly zero.
inline constexpr double kMeasureFloor = 1e-13;
Distribution measure(const Matrix& basis, const DensityOperator& rho);
Distribution measure(const Matrix& basis, const Matrix& x);

/// The rank-one projective measurement map as a state: sum_x <x|rho|x> |x><x|.
DensityOperator measurement_map(const Matrix& basis, const DensityOperator& rho);

bool is_orthonormal(const Matrix& basis, double tol = 1e-9);

DensityOperator tensor_power(const DensityOperator& rho, std::size_t n);
PositiveMapRep tensor_power(const PositiveMapRep& map, std::size_t n);
DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);

// Random instances. All generators are pure functions of their seed.

/// Haar-random unitary (QR of a Ginibre matrix with phase correction).
Matrix random_unitary(std::size_t dim, std::uint64_t seed);

/// Partial trace of a Haar-random purification on C^dim (x) C^rank.
DensityOperator random_state(std::size_t dim, std::size_t rank, std::uint64_t seed);

/// Full-rank random state whose condition number is at most max_condition (mixes in the
/// maximally mixed state only when needed).
DensityOperator random_full_rank_state(std::size_t dim, std::uint64_t seed,
                                       double max_condition = 1e4);

/// Channel from a Haar-random Stinespring isometry C^d_in -> C^d_out (x) C^d_env.
PositiveMapRep random_channel(std::size_t d_in, std::size_t d_out, std::size_t d_env,
                              std::uint64_t seed);

/// Mixture of `count` Haar unitaries with random simplex weights.
PositiveMapRep random_unital_channel(std::size_t dim, std::size_t count, std::uint64_t seed);

}  // namespace qchain
