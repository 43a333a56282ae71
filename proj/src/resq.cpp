#include "nru/resq.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nru/error.hpp"

namespace nru {

GTable::GTable(unsigned servers, std::size_t resources, double load, const DiscretePmf& pmf)
    : k_(servers), r_(resources), rho_(load) {
  require(servers >= 1, ErrorCode::domain, "need at least one server");
  require(resources >= 1, ErrorCode::domain, "need at least one resource unit");
  require(load >= 0.0 && std::isfinite(load), ErrorCode::domain, "offered load must be finite and nonnegative");
  require(!pmf.empty(), ErrorCode::domain, "demand pmf is empty");

  std::vector<double> log_term(k_ + 1, 0.0);
  for (unsigned i = 1; i <= k_; ++i)
    log_term[i] = load > 0.0 ? log_term[i - 1] + std::log(load) - std::log(static_cast<double>(i))
                             : -std::numeric_limits<double>::infinity();
  log_scale_ = *std::max_element(log_term.begin(), log_term.end());
  term_.resize(k_ + 1);
  for (unsigned i = 0; i <= k_; ++i) term_[i] = std::exp(log_term[i] - log_scale_);

  conv_.resize(k_ + 1);
  conv_[0].assign(r_ + 1, 0.0);
  conv_[0][0] = 1.0;
  for (unsigned i = 1; i <= k_; ++i) conv_[i] = convolve(conv_[i - 1], pmf.probabilities(), r_).mass;

  const std::size_t width = r_ + 1;
  g_.assign((k_ + 1) * width, 0.0);
  for (unsigned n = 0; n <= k_; ++n) {
    double cum = 0.0;
    for (std::size_t r = 0; r <= r_; ++r) {
      cum += conv_[n][r];
      const double prev = n > 0 ? g_[(n - 1) * width + r] : 0.0;
      g_[n * width + r] = prev + term_[n] * cum;
    }
  }

  tail_.assign(width, 0.0);
  for (unsigned n = 0; n < k_; ++n) {
    double above = 0.0;
    for (std::size_t r = r_; r-- > 0;) {
      above += conv_[n][r + 1];
      tail_[r] += term_[n] * above;
    }
  }
  for (double v : conv_[k_]) full_ += term_[k_] * v;
}

double GTable::blocked_relative(std::ptrdiff_t room) const {
  if (room < 0) return 1.0;
  const auto rr = std::min<std::size_t>(static_cast<std::size_t>(room), r_);
  const double total = scaled(static_cast<int>(k_), static_cast<std::ptrdiff_t>(r_));
  return std::clamp((full_ + tail_[rr]) / total, 0.0, 1.0);
}

double GTable::scaled(int n, std::ptrdiff_t r) const {
  if (n < 0 || r < 0) return 0.0;
  const auto nn = std::min<std::size_t>(static_cast<std::size_t>(n), k_);
  const auto rr = std::min<std::size_t>(static_cast<std::size_t>(r), r_);
  return g_[nn * (r_ + 1) + rr];
}

double GTable::value(int n, std::ptrdiff_t r) const { return scaled(n, r) * std::exp(log_scale_); }

double GTable::relative(int n, std::ptrdiff_t r) const {
  return scaled(n, r) / scaled(static_cast<int>(k_), static_cast<std::ptrdiff_t>(r_));
}

double GTable::state_probability(unsigned k, std::size_t r) const {
  if (k > k_ || r > r_) return 0.0;
  return term_[k] * conv_[k][r] / scaled(static_cast<int>(k_), static_cast<std::ptrdiff_t>(r_));
}

double StationaryDistribution::total() const noexcept {
  double s = 0.0;
  for (const auto& row : p)
    for (double v : row) s += v;
  return s;
}

StationaryDistribution stationary_distribution(const GTable& g) {
  if (static_cast<double>(g.servers()) * static_cast<double>(g.resources()) > kMaxMaterializedStates)
    fail(ErrorCode::capacity, "state space too large to materialize; use the G-form");
  StationaryDistribution st;
  st.p.assign(g.servers() + 1, std::vector<double>(g.resources() + 1, 0.0));
  for (unsigned k = 0; k <= g.servers(); ++k)
    for (std::size_t r = 0; r <= g.resources(); ++r) st.p[k][r] = g.state_probability(k, r);
  return st;
}

double demand_loss_probability(const GTable& g, std::size_t units) {
  const auto room = static_cast<std::ptrdiff_t>(g.resources()) - static_cast<std::ptrdiff_t>(units);
  return g.blocked_relative(room);
}

double class_loss_probability(const GTable& g, const DiscretePmf& class_pmf) {
  double lost = 0.0;
  for (std::size_t i = 0; i < class_pmf.size(); ++i) {
    if (class_pmf[i] == 0.0) continue;
    const auto room = static_cast<std::ptrdiff_t>(g.resources()) - static_cast<std::ptrdiff_t>(i);
    lost += class_pmf[i] * g.blocked_relative(room);
  }
  return std::clamp(lost, 0.0, 1.0);
}

double class_loss_probability(const StationaryDistribution& st, const DiscretePmf& class_pmf) {
  const std::size_t servers = st.p.size() - 1;
  const std::size_t resources = st.p.front().size() - 1;
  // above[m] = P(j > m)
  std::vector<double> above(resources + 1, 0.0);
  for (std::size_t j = resources + 1; j < class_pmf.size(); ++j) above[resources] += class_pmf[j];
  for (std::size_t m = resources; m-- > 0;) above[m] = above[m + 1] + class_pmf[m + 1];
  double lost = 0.0;
  for (double v : st.p[servers]) lost += v;
  for (std::size_t k = 0; k < servers; ++k)
    for (std::size_t r = 0; r <= resources; ++r) lost += st.p[k][r] * above[resources - r];
  return std::clamp(lost, 0.0, 1.0);
}

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::baseline: return "baseline";
    case Strategy::fat: return "fat";
    case Strategy::slim: return "slim";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "baseline") return Strategy::baseline;
  if (name == "fat") return Strategy::fat;
  if (name == "slim") return Strategy::slim;
  fail(ErrorCode::config, "unknown strategy '" + std::string(name) + "'");
}

bool StrategySplit::routed_direct(std::size_t j) const noexcept {
  const auto jj = static_cast<long>(j);
  switch (strategy) {
    case Strategy::baseline: return false;
    case Strategy::fat: return jj > threshold;
    case Strategy::slim: return jj <= threshold;
  }
  return false;
}

StrategySplit make_strategy_split(Strategy strategy, const DiscretePmf& p1, const DiscretePmf& p2, double lambda1,
                                  double lambda2, double mu, long threshold) {
  require(lambda1 >= 0.0 && lambda2 >= 0.0, ErrorCode::domain, "arrival rates must be nonnegative");
  require(mu > 0.0, ErrorCode::domain, "service rate must be positive");
  require(!p2.empty(), ErrorCode::domain, "offloadable demand pmf is empty");
  if (strategy != Strategy::baseline && threshold < -1)
    fail(ErrorCode::degenerate_threshold, "offloading threshold must be >= -1");

  StrategySplit s;
  s.strategy = strategy;
  s.threshold = strategy == Strategy::baseline ? kInfiniteThreshold : threshold;
  s.class2 = p2;

  std::vector<double> licensed(p2.size(), 0.0);
  double direct = 0.0;
  for (std::size_t j = 0; j < p2.size(); ++j) {
    if (s.routed_direct(j))
      direct += p2[j];
    else
      licensed[j] = p2[j];
  }
  double kept = 0.0;
  for (double v : licensed) kept += v;
  s.pi_direct = std::clamp(direct / (direct + kept), 0.0, 1.0);
  if (kept <= 0.0 || direct == 1.0) s.pi_direct = 1.0;
  if (s.pi_direct < 1.0) s.class2_licensed = DiscretePmf::normalized(std::move(licensed));

  s.load1 = lambda1 / mu;
  s.load2 = s.pi_direct < 1.0 ? lambda2 * (1.0 - s.pi_direct) / mu : 0.0;
  const double total = s.licensed_load();
  if (total > 0.0 && s.load2 > 0.0 && s.load1 > 0.0) {
    const double w[] = {s.load1, s.load2};
    const DiscretePmf c[] = {p1, s.class2_licensed};
    s.licensed_pmf = mixture(w, c);
  } else if (s.load2 > 0.0) {
    s.licensed_pmf = s.class2_licensed;
  } else if (!p1.empty()) {
    s.licensed_pmf = p1;
  } else {
    s.licensed_pmf = s.pi_direct < 1.0 ? s.class2_licensed : p2;
  }
  return s;
}

double offload_probability(const StrategySplit& split, const GTable& g) {
  if (split.pi_direct >= 1.0) return 1.0;
  const double loss = class_loss_probability(g, split.class2_licensed);
  return std::clamp(split.pi_direct + (1.0 - split.pi_direct) * loss, 0.0, 1.0);
}

namespace {

template <class LossOf>
DiscretePmf offloaded_pmf_impl(const StrategySplit& split, LossOf loss_of) {
  std::vector<double> mass(split.class2.size(), 0.0);
  double total = 0.0;
  for (std::size_t j = 0; j < split.class2.size(); ++j) {
    const double pj = split.class2[j];
    if (pj == 0.0) continue;
    mass[j] = split.routed_direct(j) || split.pi_direct >= 1.0 ? pj : pj * loss_of(j);
    total += mass[j];
  }
  if (!(total > 0.0)) fail(ErrorCode::no_offload, "no session is offloaded; the offloaded pmf is undefined");
  for (double& v : mass) v /= total;
  return DiscretePmf::normalized(std::move(mass));
}

}  // namespace

DiscretePmf offloaded_demand_pmf(const StrategySplit& split, const GTable& g) {
  return offloaded_pmf_impl(split, [&](std::size_t j) { return demand_loss_probability(g, j); });
}

DiscretePmf offloaded_demand_pmf(const StrategySplit& split, const StationaryDistribution& st) {
  const std::size_t servers = st.p.size() - 1;
  const std::size_t resources = st.p.front().size() - 1;
  return offloaded_pmf_impl(split, [&](std::size_t j) {
    // All servers busy, or fewer than j free units.
    double blocked = 0.0;
    for (std::size_t r = 0; r <= resources; ++r) blocked += st.p[servers][r];
    for (std::size_t k = 0; k < servers; ++k)
      for (std::size_t r = 0; r <= resources; ++r)
        if (r + j > resources) blocked += st.p[k][r];
    return blocked;
  });
}

double erlang_b(unsigned servers, double load) {
  double b = 1.0;
  for (unsigned k = 1; k <= servers; ++k) b = load * b / (static_cast<double>(k) + load * b);
  return b;
}

}  // namespace nru
