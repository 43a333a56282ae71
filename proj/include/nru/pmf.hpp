#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nru {

// Probability mass function over integer resource units 0..size()-1.
class DiscretePmf {
 public:
  static constexpr double kSumTolerance = 1e-12;

  DiscretePmf() = default;

  // Takes probabilities as given; throws domain error unless they are a
  // proper pmf (nonnegative, summing to 1 within kSumTolerance).
  explicit DiscretePmf(std::vector<double> probabilities);

  // Rescales nonnegative masses to unit sum. Throws on zero total mass.
  static DiscretePmf normalized(std::vector<double> masses);
  static DiscretePmf point_mass(std::size_t at);

  std::size_t size() const noexcept { return p_.size(); }
  bool empty() const noexcept { return p_.empty(); }
  // Zero outside the stored support.
  double operator[](std::size_t j) const noexcept { return j < p_.size() ? p_[j] : 0.0; }
  std::span<const double> probabilities() const noexcept { return p_; }

  std::size_t max_support() const noexcept;
  double mean() const noexcept;
  double cdf(std::ptrdiff_t j) const noexcept;

  friend bool operator==(const DiscretePmf&, const DiscretePmf&) = default;

 private:
  std::vector<double> p_;
};

// Finite kernel of a convolution capped at some resource budget: mass[j] for
// j <= cap plus whatever fell beyond the cap.
struct TruncatedPmf {
  std::vector<double> mass;
  double truncated = 0.0;
};

TruncatedPmf convolve(std::span<const double> a, std::span<const double> b, std::size_t cap);
DiscretePmf convolve(const DiscretePmf& a, const DiscretePmf& b);
// k-fold self convolution truncated at cap; k = 0 is the unit mass at 0.
TruncatedPmf k_fold(const DiscretePmf& p, unsigned k, std::size_t cap);

// Weighted mixture sum_i w_i p_i / sum_i w_i.
DiscretePmf mixture(std::span<const double> weights, std::span<const DiscretePmf> components);

}  // namespace nru
