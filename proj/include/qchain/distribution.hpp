#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qchain {

/// Probability vector over a finite alphabet. Entries down to -1e-12 are accepted and
/// clipped to zero; the total must be 1 within 1e-9.
class Distribution {
 public:
  Distribution() = default;
  explicit Distribution(std::vector<double> probs);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const noexcept { return probs_; }
  double total() const;

  static Distribution uniform(std::size_t n);
  static Distribution point_mass(std::size_t n, std::size_t at);

 private:
  std::vector<double> probs_;
};

}  // namespace qchain
