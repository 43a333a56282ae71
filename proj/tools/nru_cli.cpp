#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nru/config.hpp"
#include "nru/error.hpp"
#include "nru/pipeline.hpp"
#include "nru/report_io.hpp"
#include "validate.hpp"

namespace fs = std::filesystem;
using namespace nru;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitMismatch = 4;

struct Options {
  std::string config_path;
  std::string out_dir = "out";
  unsigned jobs = 1;
  std::optional<std::uint64_t> seed;
  std::string strategy = "all";
  bool dump_config = false;
};

std::vector<Strategy> selected_strategies(const std::string& name) {
  if (name == "all") return {Strategy::baseline, Strategy::fat, Strategy::slim};
  return {parse_strategy(name)};
}

class Emitter {
 public:
  Emitter(const Options& opt, std::string subcommand) : dir_(opt.out_dir) {
    fs::create_directories(dir_);
    manifest_.config_path = opt.config_path.empty() ? "(built-in defaults)" : opt.config_path;
    manifest_.subcommand = std::move(subcommand);
    manifest_.output_dir = opt.out_dir;
    if (opt.seed) manifest_.seed_override = std::to_string(*opt.seed);
  }

  void write(const std::string& name, const std::string& contents) {
    std::ofstream f(dir_ / name, std::ios::binary | std::ios::trunc);
    f << contents;
    f.close();
    if (!f) fail(ErrorCode::config, "cannot write " + (dir_ / name).string());
    manifest_.files.push_back(describe_file(dir_.string(), name));
  }

  void finish() {
    std::ostringstream m;
    write_manifest(m, manifest_);
    std::ofstream f(dir_ / "manifest.txt", std::ios::binary | std::ios::trunc);
    f << m.str();
  }

 private:
  fs::path dir_;
  RunManifest manifest_;
};

std::string config_echo(const RunConfig& cfg) {
  std::ostringstream s;
  dump_run_config(cfg, s);
  return s.str();
}

std::string plot_script(const std::string& csv) {
  return "#!/usr/bin/env python3\n"
         "# Q_s against base-station density, one panel per (min_rate_bps, cw_nru).\n"
         "import csv, sys\n"
         "from collections import defaultdict\n"
         "import matplotlib.pyplot as plt\n"
         "\n"
         "path = sys.argv[1] if len(sys.argv) > 1 else '" + csv + "'\n"
         "series = defaultdict(list)\n"
         "with open(path, newline='') as f:\n"
         "    for row in csv.DictReader(f):\n"
         "        key = (float(row['min_rate_bps']), int(row['cw_nru']))\n"
         "        series[key, row['strategy']].append((float(row['bs_density']), float(row['q_s'])))\n"
         "panels = sorted({k for k, _ in series})\n"
         "fig, axes = plt.subplots(1, len(panels), figsize=(5 * len(panels), 4), squeeze=False)\n"
         "for ax, panel in zip(axes[0], panels):\n"
         "    for (k, strategy), pts in sorted(series.items()):\n"
         "        if k != panel:\n"
         "            continue\n"
         "        pts.sort()\n"
         "        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker='o', label=strategy)\n"
         "    ax.set_xlabel('BS density [1/m^2]')\n"
         "    ax.set_ylabel('Q_s')\n"
         "    ax.set_title(f'R_min = {panel[0] / 1e6:g} Mbit/s, CW = {panel[1]}')\n"
         "    ax.legend()\n"
         "fig.tight_layout()\n"
         "fig.savefig(path.rsplit('.', 1)[0] + '.png', dpi=150)\n";
}

void print_reports(const std::vector<ReportRow>& rows) {
  std::cout << "strategy  threshold  pi_su         pi_sl         q_su          q_s\n";
  for (const auto& r : rows) {
    const auto& rep = r.report;
    const std::string th = rep.threshold == kInfiniteThreshold ? "inf" : std::to_string(rep.threshold);
    std::printf("%-9s %-10s %-13.6g %-13.6g %-13.6g %-13.6g\n", std::string(to_string(rep.strategy)).c_str(),
                th.c_str(), rep.pi_su, rep.pi_sl, rep.q_su, rep.q_s);
  }
}

int run_point(const RunConfig& cfg, const Options& opt) {
  const PreparedCell cell = prepare_cell(cfg.scenario);
  std::vector<ReportRow> rows;
  for (Strategy s : selected_strategies(opt.strategy))
    rows.push_back({cfg.scenario.traffic.min_rate_bps, cfg.scenario.contention.cw_nru,
                    evaluate_strategy(cfg.scenario, cell, s)});
  std::ostringstream csv;
  write_report_csv(csv, rows);
  Emitter out(opt, "point");
  out.write("config.ini", config_echo(cfg));
  out.write("point.csv", csv.str());
  out.finish();
  print_reports(rows);
  return kExitOk;
}

int run_sweep(const RunConfig& cfg, const Options& opt) {
  const auto strategies = selected_strategies(opt.strategy);
  std::vector<double> rates = cfg.sweep.min_rates;
  if (rates.empty()) rates.push_back(cfg.scenario.traffic.min_rate_bps);
  std::vector<unsigned> windows = cfg.sweep.cw_nru;
  if (windows.empty()) windows.push_back(cfg.scenario.contention.cw_nru);
  if (cfg.sweep.densities.empty()) fail(ErrorCode::config, "sweep grid is empty: no densities");

  std::vector<ReportRow> rows;
  std::ostringstream minimal;
  minimal << "min_rate_bps,cw_nru,strategy,minimal_bs_density\n";
  for (double rate : rates)
    for (unsigned cw : windows) {
      Scenario sc = cfg.scenario;
      sc.traffic.min_rate_bps = rate;
      sc.contention.cw_nru = cw;
      const DensitySweep sw = density_sweep(sc, cfg.sweep.densities, strategies, cfg.sweep.target_q_s, opt.jobs);
      for (const auto& rep : sw.reports) rows.push_back({rate, cw, rep});
      for (std::size_t i = 0; i < strategies.size(); ++i) {
        const auto& d = sw.minimal_density[i];
        minimal << format_number(rate) << ',' << cw << ',' << to_string(strategies[i]) << ','
                << (d ? format_number(*d) : std::string("none")) << '\n';
      }
    }
  std::ostringstream csv;
  write_report_csv(csv, rows);
  Emitter out(opt, "sweep");
  out.write("config.ini", config_echo(cfg));
  out.write("sweep.csv", csv.str());
  out.write("minimal_density.csv", minimal.str());
  if (cfg.sweep.plot_script) out.write("plot_sweep.py", plot_script("sweep.csv"));
  out.finish();
  std::cout << rows.size() << " rows written to " << (fs::path(opt.out_dir) / "sweep.csv").string() << '\n';
  return kExitOk;
}

int run_validate(const RunConfig& cfg, const Options& opt) {
  const auto rows = cli::run_validation(cfg);
  std::ostringstream csv;
  cli::write_validation_csv(csv, rows);
  Emitter out(opt, "validate");
  out.write("config.ini", config_echo(cfg));
  out.write("validate.csv", csv.str());
  out.finish();
  bool ok = true;
  for (const auto& r : rows) {
    std::printf("%-4s  %-9s %-66s value=%-13.6g ref=%-13.6g tol=%.3g\n", cli::to_string(r.status),
                r.stage.c_str(), r.check.c_str(), r.value, r.reference, r.tolerance);
    ok = ok && r.status != cli::CheckStatus::fail;
  }
  return ok ? kExitOk : kExitMismatch;
}

int run_mcs_dump(const RunConfig& cfg) {
  std::cout << "# licensed: " << cfg.licensed_mcs_path << '\n';
  cfg.scenario.licensed_mcs.write(std::cout);
  std::cout << "# unlicensed: " << cfg.unlicensed_mcs_path << '\n';
  cfg.scenario.unlicensed_mcs.write(std::cout);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NR-U/WiGig offloading performance evaluation"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  Options opt;
  std::uint64_t seed = 0;
  app.add_option("--config", opt.config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", opt.out_dir, "output directory")->capture_default_str();
  app.add_option("--jobs", opt.jobs, "parallel sweep points")->check(CLI::PositiveNumber)->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "override validate.seed");
  app.add_option("--strategy", opt.strategy, "strategy set")
      ->check(CLI::IsMember({"baseline", "fat", "slim", "all"}))
      ->capture_default_str();
  app.add_flag("--dump-config", opt.dump_config, "print the effective configuration and exit");

  auto* point = app.add_subcommand("point", "evaluate the configured scenario");
  auto* sweep = app.add_subcommand("sweep", "density x min-rate x window grid");
  auto* validate = app.add_subcommand("validate", "analytical stages against Monte Carlo and exact oracles");
  auto* mcs = app.add_subcommand("mcs", "MCS table utilities");
  mcs->require_subcommand(1);
  auto* mcs_dump = mcs->add_subcommand("dump", "print the active MCS tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (*seed_opt) opt.seed = seed;

  try {
    RunConfig cfg = opt.config_path.empty() ? default_run_config() : load_run_config(opt.config_path);
    if (opt.seed) cfg.validate.seed = *opt.seed;
    cfg.scenario.validate();
    if (opt.dump_config) {
      dump_run_config(cfg, std::cout);
      return kExitOk;
    }
    if (*point) return run_point(cfg, opt);
    if (*sweep) return run_sweep(cfg, opt);
    if (*validate) return run_validate(cfg, opt);
    if (*mcs_dump) return run_mcs_dump(cfg);
    std::cerr << app.help();
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error";
    if (!e.stage().empty()) std::cerr << " [" << e.stage() << ']';
    std::cerr << " (" << to_string(e.code()) << "): " << e.what() << '\n';
    return e.is_config_error() ? kExitConfig : kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}
