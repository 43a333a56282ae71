#include "nru/oracle.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "nru/error.hpp"
#include "nru/numeric.hpp"
#include "nru/rng.hpp"

namespace nru {

void SimControl::validate() const {
  require(budget > 0, ErrorCode::control, "simulation budget must be positive");
  require(confidence > 0.0 && confidence < 1.0, ErrorCode::control, "confidence must lie in (0, 1)");
  require(batches >= 2, ErrorCode::control, "need at least two batches");
  require(budget >= batches, ErrorCode::control, "budget too small for one event per batch");
  require(warmup_fraction >= 0.0 && warmup_fraction < 1.0, ErrorCode::control, "warmup fraction must lie in [0, 1)");
}

EstimateWithCI batch_estimate(const std::vector<double>& batch_values, double confidence) {
  EstimateWithCI e;
  e.batches = static_cast<unsigned>(batch_values.size());
  if (batch_values.empty()) return e;
  const double n = static_cast<double>(batch_values.size());
  e.value = std::accumulate(batch_values.begin(), batch_values.end(), 0.0) / n;
  if (batch_values.size() < 2) return e;
  double ss = 0.0;
  for (double v : batch_values) ss += (v - e.value) * (v - e.value);
  e.sigma = std::sqrt(ss / (n - 1.0) / n);
  e.half_width = student_t_quantile(n - 1.0, 0.5 + 0.5 * confidence) * e.sigma;
  return e;
}

namespace {

class PmfSampler {
 public:
  explicit PmfSampler(const DiscretePmf& p) {
    double c = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      c += p[j];
      cdf_.push_back(c);
    }
  }
  std::size_t operator()(CounterRng& rng) const {
    const double u = rng.uniform() * cdf_.back();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

double standard_normal(CounterRng& rng) {
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

std::size_t batch_of(std::uint64_t index, std::uint64_t total, unsigned batches) {
  return static_cast<std::size_t>(index * batches / total);
}

// Number of indices that batch_of maps to batch b.
double batch_size(std::size_t b, std::uint64_t total, unsigned batches) {
  const auto first = [&](std::uint64_t k) { return (k * total + batches - 1) / batches; };
  return static_cast<double>(first(b + 1) - first(b));
}

}  // namespace

ResqSimResult simulate_resq(const LossSystem& sys, const SimControl& ctl) {
  ctl.validate();
  require(sys.servers >= 1 && sys.resources >= 1, ErrorCode::domain, "loss system needs servers and resources");
  require(sys.mu > 0.0 && sys.lambda1 >= 0.0 && sys.lambda2 >= 0.0, ErrorCode::domain, "rates must be valid");
  require(sys.lambda1 == 0.0 || !sys.p1.empty(), ErrorCode::domain, "type-1 demand pmf missing");
  require(!sys.p2.empty(), ErrorCode::domain, "type-2 demand pmf missing");

  ResqSimResult out;
  out.offloaded_histogram.assign(sys.p2.size(), 0);
  const double lambda = sys.lambda1 + sys.lambda2;
  if (lambda == 0.0) {
    out.loss_type1.batches = out.offload_type2.batches = ctl.batches;
    return out;
  }
  StrategySplit routing;
  routing.strategy = sys.strategy;
  routing.threshold = sys.threshold;

  CounterRng events = make_stream(ctl.seed, RngStage::resq_arrivals);
  CounterRng demands = make_stream(ctl.seed, RngStage::resq_demand);
  CounterRng service = make_stream(ctl.seed, RngStage::resq_service);
  const PmfSampler sample2(sys.p2);
  const PmfSampler sample1(sys.lambda1 > 0.0 ? sys.p1 : sys.p2);

  const auto warmup = static_cast<std::uint64_t>(static_cast<double>(ctl.budget) * ctl.warmup_fraction);
  std::vector<double> arr1(ctl.batches, 0.0), lost1(ctl.batches, 0.0), arr2(ctl.batches, 0.0),
      off2(ctl.batches, 0.0);
  std::vector<std::size_t> in_service;
  in_service.reserve(sys.servers);
  std::size_t occupied = 0;
  std::uint64_t arrivals = 0;
  while (arrivals < warmup + ctl.budget) {
    const double departures = static_cast<double>(in_service.size()) * sys.mu;
    const double u = events.uniform() * (lambda + departures);
    if (u >= lambda) {
      const auto idx = static_cast<std::size_t>(service.below(in_service.size()));
      occupied -= in_service[idx];
      in_service[idx] = in_service.back();
      in_service.pop_back();
      continue;
    }
    const bool type1 = u < sys.lambda1;
    const std::size_t j = type1 ? sample1(demands) : sample2(demands);
    const bool counted = arrivals >= warmup;
    const std::size_t b = counted ? batch_of(arrivals - warmup, ctl.budget, ctl.batches) : 0;
    ++arrivals;
    const bool direct = !type1 && routing.routed_direct(j);
    const bool admitted = !direct && in_service.size() < sys.servers && occupied + j <= sys.resources;
    if (admitted) {
      in_service.push_back(j);
      occupied += j;
      if (occupied > sys.resources) fail(ErrorCode::state_space, "resource accounting exceeded capacity");
      out.max_occupied = std::max<std::uint64_t>(out.max_occupied, occupied);
    }
    if (!counted) continue;
    if (type1) {
      arr1[b] += 1.0;
      if (!admitted) lost1[b] += 1.0;
    } else {
      arr2[b] += 1.0;
      if (!admitted) {
        off2[b] += 1.0;
        ++out.offloaded_histogram[j];
      }
    }
  }
  std::vector<double> v1, v2;
  for (unsigned b = 0; b < ctl.batches; ++b) {
    if (arr1[b] > 0.0) v1.push_back(lost1[b] / arr1[b]);
    if (arr2[b] > 0.0) v2.push_back(off2[b] / arr2[b]);
  }
  out.loss_type1 = batch_estimate(v1, ctl.confidence);
  out.offload_type2 = batch_estimate(v2, ctl.confidence);
  return out;
}

ChiSquareResult chi_square_test(const std::vector<std::uint64_t>& counts, const DiscretePmf& expected, double level,
                                double min_expected) {
  ChiSquareResult res;
  res.samples = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (res.samples == 0) return res;
  const double n = static_cast<double>(res.samples);
  const std::size_t len = std::max(counts.size(), expected.size());
  std::vector<std::pair<double, double>> bins;  // (observed, expected)
  double o = 0.0, e = 0.0;
  for (std::size_t j = 0; j < len; ++j) {
    o += j < counts.size() ? static_cast<double>(counts[j]) : 0.0;
    e += n * expected[j];
    if (e >= min_expected) {
      bins.emplace_back(o, e);
      o = e = 0.0;
    }
  }
  if (o > 0.0 || e > 0.0) {
    if (bins.empty())
      bins.emplace_back(o, e);
    else {
      bins.back().first += o;
      bins.back().second += e;
    }
  }
  for (const auto& [ob, ex] : bins)
    res.statistic += ex > 0.0 ? (ob - ex) * (ob - ex) / ex : (ob > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  res.dof = bins.size() > 1 ? static_cast<unsigned>(bins.size() - 1) : 0;
  res.critical = res.dof > 0 ? chi_squared_quantile(res.dof, level) : 0.0;
  res.pass = res.dof > 0 ? res.statistic <= res.critical : res.statistic == 0.0;
  return res;
}

LbtSimResult simulate_lbt(unsigned n_nru, unsigned n_wigig, const ContentionConfig& cfg, const SimControl& ctl) {
  ctl.validate();
  cfg.validate();
  const unsigned n = n_nru + n_wigig;
  require(n >= 1, ErrorCode::domain, "need at least one station");
  CounterRng backoff = make_stream(ctl.seed, RngStage::lbt_backoff);
  CounterRng blockage = make_stream(ctl.seed, RngStage::lbt_blockage);

  std::vector<unsigned> cw(n), stage(n, 0);
  std::vector<std::uint64_t> fire(n);
  for (unsigned i = 0; i < n; ++i) {
    cw[i] = i < n_nru ? cfg.cw_nru : cfg.cw_wigig;
    fire[i] = backoff.below(cw[i]);
  }
  const auto warmup = static_cast<std::uint64_t>(static_cast<double>(ctl.budget) * ctl.warmup_fraction);
  const std::uint64_t end = warmup + ctl.budget;
  const std::size_t nb = ctl.batches;
  // [tech][batch]
  std::vector<std::vector<double>> attempts(2, std::vector<double>(nb, 0.0)), collided = attempts,
                                                                               succeeded = attempts;
  std::vector<unsigned> tx;
  tx.reserve(n);
  for (;;) {
    const std::uint64_t t = *std::min_element(fire.begin(), fire.end());
    if (t >= end) break;
    tx.clear();
    for (unsigned i = 0; i < n; ++i)
      if (fire[i] == t) tx.push_back(i);
    const bool collision = tx.size() > 1;
    const bool counted = t >= warmup;
    const std::size_t b = counted ? batch_of(t - warmup, ctl.budget, ctl.batches) : 0;
    for (unsigned i : tx) {
      const int tech = i < n_nru ? 0 : 1;
      const bool ok = !collision && !blockage.bernoulli(cfg.blockage_prob);
      if (counted) {
        attempts[tech][b] += 1.0;
        if (collision) collided[tech][b] += 1.0;
        if (ok) succeeded[tech][b] += 1.0;
      }
      stage[i] = ok || stage[i] >= cfg.max_retries ? 0 : stage[i] + 1;
      fire[i] = t + 1 + backoff.below(static_cast<std::uint64_t>(cw[i]) << stage[i]);
    }
  }
  LbtSimResult out;
  out.slots = ctl.budget;
  const auto summarize = [&](int tech, unsigned count, EstimateWithCI& pi, EstimateWithCI& pc, EstimateWithCI& th,
                             EstimateWithCI* slot_success) {
    if (count == 0) return;
    std::vector<double> vpi, vpc, vth, vss;
    for (std::size_t b = 0; b < nb; ++b) {
      const double slots = batch_size(b, ctl.budget, ctl.batches);
      vpi.push_back(attempts[tech][b] / (count * slots));
      vss.push_back(succeeded[tech][b] / (count * slots));
      if (attempts[tech][b] > 0.0) {
        vpc.push_back(collided[tech][b] / attempts[tech][b]);
        vth.push_back(succeeded[tech][b] / attempts[tech][b]);
      }
    }
    pi = batch_estimate(vpi, ctl.confidence);
    pc = batch_estimate(vpc, ctl.confidence);
    th = batch_estimate(vth, ctl.confidence);
    if (slot_success) *slot_success = batch_estimate(vss, ctl.confidence);
  };
  summarize(0, n_nru, out.pi_nru, out.collision_nru, out.success_nru, &out.slot_success_nru);
  summarize(1, n_wigig, out.pi_wigig, out.collision_wigig, out.success_wigig, nullptr);
  return out;
}

ExactLbtResult exact_lbt_chain(unsigned n_nru, unsigned n_wigig, const ContentionConfig& cfg,
                               std::size_t max_states) {
  cfg.validate();
  const unsigned n = n_nru + n_wigig;
  require(n >= 1, ErrorCode::domain, "need at least one station");
  const unsigned stages = cfg.max_retries + 1;

  // Local state of one station: (stage, counter) flattened per technology.
  struct Local {
    std::vector<unsigned> offset;  // first index of each stage
    std::vector<unsigned> width;   // window of each stage
    unsigned size = 0;
  };
  const auto make_local = [&](unsigned w) {
    Local l;
    for (unsigned s = 0; s < stages; ++s) {
      l.offset.push_back(l.size);
      l.width.push_back(w << s);
      l.size += w << s;
    }
    return l;
  };
  const Local local[2] = {make_local(cfg.cw_nru), make_local(cfg.cw_wigig)};
  std::vector<int> tech(n);
  double total = 1.0;
  for (unsigned i = 0; i < n; ++i) {
    tech[i] = i < n_nru ? 0 : 1;
    total *= local[tech[i]].size;
  }
  if (total > static_cast<double>(max_states)) fail(ErrorCode::state_space, "LBT chain too large to enumerate");
  const auto states = static_cast<std::size_t>(total);

  const auto decode_stage = [&](const Local& l, unsigned x, unsigned& s, unsigned& c) {
    s = 0;
    while (s + 1 < stages && x >= l.offset[s + 1]) ++s;
    c = x - l.offset[s];
  };

  std::vector<Eigen::Triplet<double>> trips;
  std::vector<unsigned> digits(n), next_base(n);
  std::vector<double> tx_count(states * 2, 0.0), coll_count(states * 2, 0.0);
  for (std::size_t x = 0; x < states; ++x) {
    std::size_t rem = x;
    for (unsigned i = 0; i < n; ++i) {
      digits[i] = static_cast<unsigned>(rem % local[tech[i]].size);
      rem /= local[tech[i]].size;
    }
    std::vector<unsigned> transmitters;
    for (unsigned i = 0; i < n; ++i) {
      unsigned s, c;
      decode_stage(local[tech[i]], digits[i], s, c);
      next_base[i] = digits[i] - (c > 0 ? 1 : 0);
      if (c == 0) transmitters.push_back(i);
    }
    const bool collision = transmitters.size() > 1;
    for (unsigned i : transmitters) {
      tx_count[x * 2 + tech[i]] += 1.0;
      if (collision) coll_count[x * 2 + tech[i]] += 1.0;
    }
    // Branches for each transmitter: list of (local next state, probability).
    std::vector<std::vector<std::pair<unsigned, double>>> branches;
    for (unsigned i : transmitters) {
      const Local& l = local[tech[i]];
      unsigned s, c;
      decode_stage(l, digits[i], s, c);
      const double p_ok = collision ? 0.0 : 1.0 - cfg.blockage_prob;
      std::vector<std::pair<unsigned, double>> br;
      const auto add_stage = [&](unsigned ns, double p) {
        if (p <= 0.0) return;
        for (unsigned k = 0; k < l.width[ns]; ++k) br.emplace_back(l.offset[ns] + k, p / l.width[ns]);
      };
      add_stage(0, p_ok);
      add_stage(s >= cfg.max_retries ? 0 : s + 1, 1.0 - p_ok);
      branches.push_back(std::move(br));
    }
    // Cartesian product over transmitters.
    std::vector<std::size_t> pick(transmitters.size(), 0);
    for (;;) {
      std::vector<unsigned> nd = next_base;
      double p = 1.0;
      for (std::size_t t = 0; t < transmitters.size(); ++t) {
        nd[transmitters[t]] = branches[t][pick[t]].first;
        p *= branches[t][pick[t]].second;
      }
      std::size_t y = 0, mult = 1;
      for (unsigned i = 0; i < n; ++i) {
        y += nd[i] * mult;
        mult *= local[tech[i]].size;
      }
      trips.emplace_back(static_cast<int>(y), static_cast<int>(x), p);
      std::size_t t = 0;
      while (t < pick.size() && ++pick[t] == branches[t].size()) pick[t++] = 0;
      if (t == pick.size()) break;
    }
  }
  // (P^T - I) pi = 0 with the last equation replaced by normalization.
  const int last = static_cast<int>(states - 1);
  std::vector<Eigen::Triplet<double>> a;
  for (const auto& tr : trips)
    if (tr.row() != last) a.push_back(tr);
  for (int i = 0; i < last; ++i) a.emplace_back(i, i, -1.0);
  for (int j = 0; j <= last; ++j) a.emplace_back(last, j, 1.0);
  Eigen::SparseMatrix<double> m(static_cast<int>(states), static_cast<int>(states));
  m.setFromTriplets(a.begin(), a.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(m);
  if (lu.info() != Eigen::Success) fail(ErrorCode::convergence, "LBT chain factorization failed");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<int>(states));
  rhs[last] = 1.0;
  const Eigen::VectorXd pi = lu.solve(rhs);

  double att[2] = {0, 0}, col[2] = {0, 0};
  for (std::size_t x = 0; x < states; ++x)
    for (int t = 0; t < 2; ++t) {
      att[t] += pi[static_cast<int>(x)] * tx_count[x * 2 + t];
      col[t] += pi[static_cast<int>(x)] * coll_count[x * 2 + t];
    }
  ExactLbtResult out;
  out.states = states;
  if (n_nru > 0) {
    out.pi_nru = att[0] / n_nru;
    out.collision_nru = att[0] > 0 ? col[0] / att[0] : 0.0;
  }
  if (n_wigig > 0) {
    out.pi_wigig = att[1] / n_wigig;
    out.collision_wigig = att[1] > 0 ? col[1] / att[1] : 0.0;
  }
  return out;
}

StationaryDistribution exact_ctmc_resq(unsigned servers, std::size_t resources, double load, const DiscretePmf& pmf,
                                       std::size_t max_states) {
  require(servers >= 1 && resources >= 1, ErrorCode::domain, "loss system needs servers and resources");
  require(load >= 0.0, ErrorCode::domain, "load must be nonnegative");
  std::vector<std::size_t> values;
  for (std::size_t j = 0; j < pmf.size() && j <= resources; ++j)
    if (pmf[j] > 0.0) values.push_back(j);

  // Multisets as nonincreasing demand vectors.
  std::vector<std::vector<std::size_t>> states;
  std::map<std::vector<std::size_t>, int> index;
  std::vector<std::size_t> cur;
  const auto grow = [&](auto&& self, std::size_t max_value_idx, std::size_t sum) -> void {
    if (states.size() >= max_states) fail(ErrorCode::state_space, "queue CTMC exceeds the state-space guard");
    index.emplace(cur, static_cast<int>(states.size()));
    states.push_back(cur);
    if (cur.size() == servers) return;
    for (std::size_t v = 0; v <= max_value_idx && v < values.size(); ++v) {
      if (sum + values[v] > resources) continue;
      cur.push_back(values[v]);
      self(self, v, sum + values[v]);
      cur.pop_back();
    }
  };
  // values ascending; a nonincreasing sequence picks indices that never increase.
  grow(grow, values.size(), 0);

  const int n = static_cast<int>(states.size());
  std::vector<Eigen::Triplet<double>> q;  // Q^T entries
  std::vector<double> out_rate(states.size(), 0.0);
  for (int s = 0; s < n; ++s) {
    const auto& st = states[static_cast<std::size_t>(s)];
    const std::size_t sum = std::accumulate(st.begin(), st.end(), std::size_t{0});
    if (st.size() < servers && load > 0.0)
      for (std::size_t v : values) {
        if (sum + v > resources) continue;
        auto t = st;
        t.insert(std::upper_bound(t.begin(), t.end(), v, std::greater<>()), v);
        const double rate = load * pmf[v];
        q.emplace_back(index.at(t), s, rate);
        out_rate[static_cast<std::size_t>(s)] += rate;
      }
    for (std::size_t i = 0; i < st.size();) {
      std::size_t k = i;
      while (k < st.size() && st[k] == st[i]) ++k;
      auto t = st;
      t.erase(t.begin() + static_cast<std::ptrdiff_t>(i));
      const double rate = static_cast<double>(k - i);
      q.emplace_back(index.at(t), s, rate);
      out_rate[static_cast<std::size_t>(s)] += rate;
      i = k;
    }
  }
  const int last = n - 1;
  std::vector<Eigen::Triplet<double>> a;
  for (const auto& tr : q)
    if (tr.row() != last) a.push_back(tr);
  for (int s = 0; s < last; ++s) a.emplace_back(s, s, -out_rate[static_cast<std::size_t>(s)]);
  for (int s = 0; s < n; ++s) a.emplace_back(last, s, 1.0);
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(a.begin(), a.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(m);
  if (lu.info() != Eigen::Success) fail(ErrorCode::convergence, "queue CTMC factorization failed");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[last] = 1.0;
  const Eigen::VectorXd pi = lu.solve(rhs);

  StationaryDistribution out;
  out.p.assign(servers + 1, std::vector<double>(resources + 1, 0.0));
  for (int s = 0; s < n; ++s) {
    const auto& st = states[static_cast<std::size_t>(s)];
    const std::size_t sum = std::accumulate(st.begin(), st.end(), std::size_t{0});
    out.p[st.size()][sum] += pi[s];
  }
  return out;
}

double total_variation(const StationaryDistribution& a, const StationaryDistribution& b) {
  require(a.p.size() == b.p.size(), ErrorCode::domain, "distributions have different server counts");
  double tv = 0.0;
  for (std::size_t k = 0; k < a.p.size(); ++k) {
    require(a.p[k].size() == b.p[k].size(), ErrorCode::domain, "distributions have different resource counts");
    for (std::size_t r = 0; r < a.p[k].size(); ++r) tv += std::abs(a.p[k][r] - b.p[k][r]);
  }
  return 0.5 * tv;
}

namespace {

template <class Draw>
EstimateWithCI mc_batches(const SimControl& ctl, Draw draw) {
  ctl.validate();
  CounterRng rng = make_stream(ctl.seed, RngStage::geometry_mc);
  std::vector<double> sums(ctl.batches, 0.0), counts(ctl.batches, 0.0);
  for (std::uint64_t i = 0; i < ctl.budget; ++i) {
    const std::size_t b = batch_of(i, ctl.budget, ctl.batches);
    double v;
    if (draw(rng, v)) {
      sums[b] += v;
      counts[b] += 1.0;
    }
  }
  std::vector<double> means;
  for (unsigned b = 0; b < ctl.batches; ++b)
    if (counts[b] > 0.0) means.push_back(sums[b] / counts[b]);
  return batch_estimate(means, ctl.confidence);
}

double sample_radius(CounterRng& rng, const Region& region) {
  const double a = region.inner * region.inner;
  const double b = region.outer * region.outer;
  return std::sqrt(a + rng.uniform() * (b - a));
}

}  // namespace

EstimateWithCI mc_mean_blockage(double radius, const DeploymentConfig& dep, double site_height, const SimControl& ctl) {
  const Region disk = Region::disk(radius);
  return mc_batches(ctl, [&](CounterRng& rng, double& v) {
    v = blockage_probability(sample_radius(rng, disk), dep, site_height);
    return true;
  });
}

EstimateWithCI mc_sinr_cdf(double x_db, const Region& region, double height_offset, const PropagationBranch& b,
                           bool shadowing, const SimControl& ctl) {
  return mc_batches(ctl, [&](CounterRng& rng, double& v) {
    const double r = sample_radius(rng, region);
    const double y = std::sqrt(r * r + height_offset * height_offset);
    double s = b.gain_db - 10.0 * b.exponent * std::log10(y);
    if (shadowing) s += b.sigma_db * standard_normal(rng);
    v = s <= x_db ? 1.0 : 0.0;
    return true;
  });
}

EstimateWithCI mc_demand_mean(const Region& region, const LinkModel& link, const McsTable& mcs, double min_rate_bps,
                              double unit_bw_hz, std::size_t capacity_units, const SimControl& ctl) {
  const SinrDistribution dist(region, link);
  const double dh = link.height_offset();
  return mc_batches(ctl, [&](CounterRng& rng, double& v) {
    const double r = sample_radius(rng, region);
    const double y = std::sqrt(r * r + dh * dh);
    const bool blocked = rng.bernoulli(dist.blockage_probability());
    const PropagationBranch& b = blocked ? dist.blocked() : dist.los();
    const double s = b.gain_db - 10.0 * b.exponent * std::log10(y) + b.sigma_db * standard_normal(rng);
    const double eff = mcs.efficiency_at(s);
    if (eff <= 0.0) return false;
    const std::size_t j = resource_units(min_rate_bps, eff, unit_bw_hz);
    if (j > capacity_units) return false;
    v = static_cast<double>(j);
    return true;
  });
}

EstimateWithCI mc_mean_spectral_efficiency(double radius, const LinkModel& link, const SimControl& ctl) {
  const Region disk = Region::disk(radius);
  const double dh = link.height_offset();
  return mc_batches(ctl, [&](CounterRng& rng, double& v) {
    const double r = sample_radius(rng, disk);
    v = std::log2(1.0 + mean_sinr(std::sqrt(r * r + dh * dh), link));
    return true;
  });
}

EstimateWithCI mc_success_probability(double load_nru, double load_wigig, const ContentionConfig& cfg,
                                      std::uint64_t populations, std::uint64_t slots_per_population,
                                      std::uint64_t seed) {
  require(populations >= 2, ErrorCode::control, "need at least two population draws");
  CounterRng rng = make_stream(seed, RngStage::population_mc);
  const auto poisson = [&](double mean) {
    unsigned k = 0;
    double p = std::exp(-mean), c = p;
    const double u = rng.uniform();
    while (u > c && k < 100000) {
      ++k;
      p *= mean / k;
      c += p;
    }
    return k;
  };
  std::vector<double> values;
  for (std::uint64_t d = 0; d < populations; ++d) {
    const unsigned i = poisson(load_nru);
    const unsigned j = poisson(load_wigig);
    SimControl ctl;
    ctl.seed = CounterRng::mix64(seed ^ CounterRng::mix64(d + 1));
    ctl.budget = slots_per_population;
    ctl.batches = 2;
    const LbtSimResult r = simulate_lbt(i + 1, j, cfg, ctl);
    values.push_back(r.slot_success_nru.value);
  }
  // Each draw is independent, so the per-draw values are the batches.
  return batch_estimate(values, 0.95);
}

}  // namespace nru
