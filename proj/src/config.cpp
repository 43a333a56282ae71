#include "nru/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "nru/error.hpp"

#ifndef NRU_DATA_DIR
#define NRU_DATA_DIR "data"
#endif

namespace nru {

namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  fail(ErrorCode::config, "key '" + key + "': cannot parse '" + value + "' as " + expected);
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) bad_value(key, v, "a number");
  return out;
}

unsigned long long to_uint(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  unsigned long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) bad_value(key, v, "a nonnegative integer");
  return out;
}

long to_long(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) bad_value(key, v, "an integer");
  return out;
}

bool to_bool(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v == "true") return true;
  if (v == "false") return false;
  bad_value(key, v, "true or false");
}

std::vector<std::string> split_list(const std::string& raw) {
  std::vector<std::string> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s;
}

std::string fmt_list(const std::vector<unsigned>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
  return s;
}

std::string fmt_threshold(const std::optional<long>& t) {
  if (!t) return "auto";
  if (*t == kInfiniteThreshold) return "inf";
  return std::to_string(*t);
}

std::optional<long> to_threshold(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v == "auto") return std::nullopt;
  if (v == "inf") return kInfiniteThreshold;
  return to_long(key, v);
}

struct Field {
  std::string section;
  std::string key;
  std::function<void(const std::string&, const std::string&)> set;  // (qualified key, value)
  std::function<std::string()> get;
};

void add_double(std::vector<Field>& f, const std::string& sec, const std::string& key, double& ref) {
  f.push_back({sec, key, [&ref](const std::string& k, const std::string& v) { ref = to_double(k, v); },
               [&ref] { return fmt(ref); }});
}

template <class T>
void add_uint(std::vector<Field>& f, const std::string& sec, const std::string& key, T& ref) {
  f.push_back({sec, key,
               [&ref](const std::string& k, const std::string& v) {
                 const auto x = to_uint(k, v);
                 if (x > std::numeric_limits<T>::max()) bad_value(k, v, "an integer in range");
                 ref = static_cast<T>(x);
               },
               [&ref] { return std::to_string(ref); }});
}

void add_bool(std::vector<Field>& f, const std::string& sec, const std::string& key, bool& ref) {
  f.push_back({sec, key, [&ref](const std::string& k, const std::string& v) { ref = to_bool(k, v); },
               [&ref] { return std::string(ref ? "true" : "false"); }});
}

void add_array(std::vector<Field>& f, const std::string& sec, const std::string& key, AntennaArray& ref) {
  f.push_back({sec, key,
               [&ref](const std::string& k, const std::string& raw) {
                 const std::string v = trim(raw);
                 const auto x = v.find('x');
                 if (x == std::string::npos) bad_value(k, v, "an array size like 8x4");
                 ref.horizontal = static_cast<unsigned>(to_uint(k, v.substr(0, x)));
                 ref.vertical = static_cast<unsigned>(to_uint(k, v.substr(x + 1)));
               },
               [&ref] { return std::to_string(ref.horizontal) + "x" + std::to_string(ref.vertical); }});
}

void add_radio(std::vector<Field>& f, const std::string& sec, RadioConfig& r, std::string& mcs_path) {
  add_double(f, sec, "carrier_freq_ghz", r.carrier_freq_ghz);
  add_double(f, sec, "bandwidth_hz", r.bandwidth_hz);
  add_double(f, sec, "tx_power_dbm", r.tx_power_dbm);
  add_array(f, sec, "tx_array", r.tx_array);
  add_array(f, sec, "rx_array", r.rx_array);
  add_double(f, sec, "interference_margin_db", r.interference_margin_db);
  add_double(f, sec, "noise_psd_dbm_hz", r.noise_psd_dbm_hz);
  add_double(f, sec, "outage_sinr_db", r.outage_sinr_db);
  add_double(f, sec, "edge_outage_prob", r.edge_outage_prob);
  add_double(f, sec, "shadow_sigma_blocked_db", r.shadow_sigma_blocked_db);
  add_double(f, sec, "shadow_sigma_los_db", r.shadow_sigma_los_db);
  add_double(f, sec, "exponent_los", r.exponent_los);
  add_double(f, sec, "exponent_blocked", r.exponent_blocked);
  f.push_back({sec, "mcs_table", [&mcs_path](const std::string&, const std::string& v) { mcs_path = trim(v); },
               [&mcs_path] { return mcs_path; }});
}

std::vector<Field> fields_of(RunConfig& c) {
  std::vector<Field> f;
  auto& d = c.scenario.deployment;
  add_double(f, "deployment", "bs_density", d.bs_density);
  add_double(f, "deployment", "nru_ue_density", d.nru_ue_density);
  add_double(f, "deployment", "wigig_ue_density", d.wigig_ue_density);
  add_double(f, "deployment", "blocker_density", d.blocker_density);
  add_double(f, "deployment", "bs_height", d.bs_height);
  add_double(f, "deployment", "ap_height", d.ap_height);
  add_double(f, "deployment", "ue_height", d.ue_height);
  add_double(f, "deployment", "blocker_height", d.blocker_height);
  add_double(f, "deployment", "blocker_radius", d.blocker_radius);

  add_radio(f, "licensed", c.scenario.licensed, c.licensed_mcs_path);
  add_radio(f, "unlicensed", c.scenario.unlicensed, c.unlicensed_mcs_path);

  auto& t = c.scenario.traffic;
  add_double(f, "traffic", "session_rate", t.session_rate);
  add_double(f, "traffic", "wigig_session_rate", t.wigig_session_rate);
  add_double(f, "traffic", "nru_active_prob", t.nru_active_prob);
  add_double(f, "traffic", "wigig_active_prob", t.wigig_active_prob);
  add_double(f, "traffic", "service_rate", t.service_rate);
  add_double(f, "traffic", "wigig_service_rate", t.wigig_service_rate);
  add_double(f, "traffic", "min_rate_bps", t.min_rate_bps);

  auto& k = c.scenario.contention;
  add_uint(f, "contention", "cw_nru", k.cw_nru);
  add_uint(f, "contention", "cw_wigig", k.cw_wigig);
  add_uint(f, "contention", "max_retries", k.max_retries);
  add_double(f, "contention", "tolerance", k.tolerance);
  add_uint(f, "contention", "max_iterations", k.max_iterations);
  add_double(f, "contention", "damping", k.damping);
  add_bool(f, "contention", "literal_collision", k.literal_collision);

  auto& s = c.scenario;
  add_double(f, "model", "resource_unit_bw_hz", s.resource_unit_bw_hz);
  add_uint(f, "model", "servers", s.servers);
  f.push_back({"model", "fat_threshold",
               [&s](const std::string& key, const std::string& v) { s.fat_threshold = to_threshold(key, v); },
               [&s] { return fmt_threshold(s.fat_threshold); }});
  f.push_back({"model", "slim_threshold",
               [&s](const std::string& key, const std::string& v) { s.slim_threshold = to_threshold(key, v); },
               [&s] { return fmt_threshold(s.slim_threshold); }});
  f.push_back({"model", "rate_map",
               [&s](const std::string& key, const std::string& raw) {
                 const std::string v = trim(raw);
                 if (v == "distance_midpoint")
                   s.rate_map = UnlicensedMapMode::distance_midpoint;
                 else if (v == "mean_efficiency")
                   s.rate_map = UnlicensedMapMode::mean_efficiency;
                 else
                   bad_value(key, v, "distance_midpoint or mean_efficiency");
               },
               [&s] {
                 return std::string(s.rate_map == UnlicensedMapMode::distance_midpoint ? "distance_midpoint"
                                                                                       : "mean_efficiency");
               }});
  f.push_back({"model", "loss_weight",
               [&s](const std::string& key, const std::string& raw) {
                 const std::string v = trim(raw);
                 if (v == "as_printed")
                   s.loss_weight = LossWeight::as_printed;
                 else if (v == "type1_only")
                   s.loss_weight = LossWeight::type1_only;
                 else
                   bad_value(key, v, "as_printed or type1_only");
               },
               [&s] { return std::string(s.loss_weight == LossWeight::as_printed ? "as_printed" : "type1_only"); }});
  add_bool(f, "model", "infeasible_counts_as_violation", s.infeasible_counts_as_violation);
  add_double(f, "model", "truncation_mass", s.truncation_mass);

  auto& w = c.sweep;
  f.push_back({"sweep", "densities",
               [&w](const std::string& key, const std::string& v) {
                 w.densities.clear();
                 for (const auto& item : split_list(v)) w.densities.push_back(to_double(key, item));
               },
               [&w] { return fmt_list(w.densities); }});
  f.push_back({"sweep", "min_rates",
               [&w](const std::string& key, const std::string& v) {
                 w.min_rates.clear();
                 for (const auto& item : split_list(v)) w.min_rates.push_back(to_double(key, item));
               },
               [&w] { return fmt_list(w.min_rates); }});
  f.push_back({"sweep", "cw_nru",
               [&w](const std::string& key, const std::string& v) {
                 w.cw_nru.clear();
                 for (const auto& item : split_list(v)) w.cw_nru.push_back(static_cast<unsigned>(to_uint(key, item)));
               },
               [&w] { return fmt_list(w.cw_nru); }});
  add_double(f, "sweep", "target_q_s", w.target_q_s);
  add_bool(f, "sweep", "plot_script", w.plot_script);

  auto& v = c.validate;
  add_uint(f, "validate", "seed", v.seed);
  add_uint(f, "validate", "resq_arrivals", v.resq_arrivals);
  add_uint(f, "validate", "lbt_slots", v.lbt_slots);
  add_uint(f, "validate", "mc_samples", v.mc_samples);
  add_uint(f, "validate", "batches", v.batches);
  add_double(f, "validate", "confidence", v.confidence);
  add_double(f, "validate", "sigmas", v.sigmas);
  return f;
}

std::string resolve(const std::string& path, const std::string& base_dir) {
  namespace fs = std::filesystem;
  fs::path p(path);
  if (p.is_relative()) p = fs::path(base_dir) / p;
  return fs::absolute(p).lexically_normal().string();
}

void load_tables(RunConfig& c) {
  c.scenario.licensed_mcs = McsTable::load(c.licensed_mcs_path);
  c.scenario.unlicensed_mcs = McsTable::load(c.unlicensed_mcs_path);
}

}  // namespace

RunConfig default_run_config() {
  RunConfig c;
  c.licensed_mcs_path = std::string(NRU_DATA_DIR) + "/mcs_nr_28ghz.txt";
  c.unlicensed_mcs_path = std::string(NRU_DATA_DIR) + "/mcs_80211ad.txt";
  load_tables(c);
  return c;
}

RunConfig parse_run_config(std::istream& in, const std::string& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorCode::config, std::string("malformed config: ") + e.what());
  }
  RunConfig c;
  c.licensed_mcs_path = std::string(NRU_DATA_DIR) + "/mcs_nr_28ghz.txt";
  c.unlicensed_mcs_path = std::string(NRU_DATA_DIR) + "/mcs_80211ad.txt";
  auto fields = fields_of(c);
  std::map<std::string, Field*> by_name;
  for (auto& f : fields) by_name[f.section + "." + f.key] = &f;

  std::vector<std::string> unknown;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      unknown.push_back(section);  // key outside any section
      continue;
    }
    for (const auto& [key, value] : body) {
      const std::string name = section + "." + key;
      const auto it = by_name.find(name);
      if (it == by_name.end()) {
        unknown.push_back(name);
        continue;
      }
      it->second->set(name, value.data());
    }
  }
  if (!unknown.empty()) {
    std::string msg = "unknown config keys:";
    for (const auto& u : unknown) msg += " " + u;
    fail(ErrorCode::config, msg);
  }
  c.licensed_mcs_path = resolve(c.licensed_mcs_path, base_dir);
  c.unlicensed_mcs_path = resolve(c.unlicensed_mcs_path, base_dir);
  load_tables(c);
  try {
    c.scenario.validate();
    c.scenario.contention.validate();
  } catch (const Error& e) {
    fail(ErrorCode::config, std::string("invalid configuration: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::config, "cannot open config '" + path + "'");
  const auto dir = std::filesystem::path(path).parent_path().string();
  return parse_run_config(in, dir.empty() ? "." : dir);
}

void dump_run_config(const RunConfig& cfg, std::ostream& out) {
  RunConfig copy = cfg;
  const auto fields = fields_of(copy);
  std::string section;
  for (const auto& f : fields) {
    if (f.section != section) {
      if (!section.empty()) out << '\n';
      section = f.section;
      out << '[' << section << "]\n";
    }
    out << f.key << " = " << f.get() << '\n';
  }
}

}  // namespace nru
