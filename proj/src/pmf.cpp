#include "nru/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nru/error.hpp"

namespace nru {

DiscretePmf::DiscretePmf(std::vector<double> probabilities) : p_(std::move(probabilities)) {
  double total = 0.0;
  for (double v : p_) {
    require(std::isfinite(v) && v >= 0.0, ErrorCode::domain, "pmf entries must be finite and nonnegative");
    total += v;
  }
  if (std::abs(total - 1.0) > kSumTolerance)
    fail(ErrorCode::domain, "pmf does not sum to 1 (sum=" + std::to_string(total) + ")");
}

DiscretePmf DiscretePmf::normalized(std::vector<double> masses) {
  double total = 0.0;
  for (double v : masses) {
    require(std::isfinite(v) && v >= 0.0, ErrorCode::domain, "pmf masses must be finite and nonnegative");
    total += v;
  }
  require(total > 0.0, ErrorCode::domain, "cannot normalize zero mass");
  for (double& v : masses) v /= total;
  DiscretePmf out;
  out.p_ = std::move(masses);
  return out;
}

DiscretePmf DiscretePmf::point_mass(std::size_t at) {
  std::vector<double> p(at + 1, 0.0);
  p[at] = 1.0;
  return DiscretePmf(std::move(p));
}

std::size_t DiscretePmf::max_support() const noexcept {
  for (std::size_t j = p_.size(); j-- > 0;)
    if (p_[j] > 0.0) return j;
  return 0;
}

double DiscretePmf::mean() const noexcept {
  double m = 0.0;
  for (std::size_t j = 0; j < p_.size(); ++j) m += static_cast<double>(j) * p_[j];
  return m;
}

double DiscretePmf::cdf(std::ptrdiff_t j) const noexcept {
  if (j < 0) return 0.0;
  const auto end = std::min<std::size_t>(static_cast<std::size_t>(j) + 1, p_.size());
  return std::accumulate(p_.begin(), p_.begin() + static_cast<std::ptrdiff_t>(end), 0.0);
}

TruncatedPmf convolve(std::span<const double> a, std::span<const double> b, std::size_t cap) {
  TruncatedPmf out;
  out.mass.assign(cap + 1, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double v = a[i] * b[j];
      total += v;
      if (i + j <= cap) out.mass[i + j] += v;
    }
  }
  const double kept = std::accumulate(out.mass.begin(), out.mass.end(), 0.0);
  out.truncated = std::max(0.0, total - kept);
  return out;
}

DiscretePmf convolve(const DiscretePmf& a, const DiscretePmf& b) {
  if (a.empty() || b.empty()) fail(ErrorCode::domain, "convolution of empty pmf");
  auto full = convolve(a.probabilities(), b.probabilities(), a.size() + b.size() - 2);
  return DiscretePmf::normalized(std::move(full.mass));
}

TruncatedPmf k_fold(const DiscretePmf& p, unsigned k, std::size_t cap) {
  TruncatedPmf acc;
  acc.mass.assign(cap + 1, 0.0);
  acc.mass[0] = 1.0;
  for (unsigned step = 0; step < k; ++step) {
    const double carried = acc.truncated;
    acc = convolve(acc.mass, p.probabilities(), cap);
    acc.truncated += carried;
  }
  return acc;
}

DiscretePmf mixture(std::span<const double> weights, std::span<const DiscretePmf> components) {
  require(weights.size() == components.size(), ErrorCode::domain, "mixture weight/component count mismatch");
  std::size_t n = 0;
  for (const auto& c : components) n = std::max(n, c.size());
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    require(weights[i] >= 0.0, ErrorCode::domain, "negative mixture weight");
    for (std::size_t j = 0; j < components[i].size(); ++j) out[j] += weights[i] * components[i][j];
  }
  return DiscretePmf::normalized(std::move(out));
}

}  // namespace nru
