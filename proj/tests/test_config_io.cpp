#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "nru/config.hpp"
#include "nru/error.hpp"
#include "nru/mcs.hpp"
#include "nru/report_io.hpp"

using namespace nru;

namespace {

std::string dump(const RunConfig& cfg) {
  std::ostringstream out;
  dump_run_config(cfg, out);
  return out.str();
}

const std::string kDefaultIni = std::string(NRU_SOURCE_DIR) + "/configs/default.ini";

}  // namespace

TEST_CASE("shipped config equals the built-in defaults") {
  CHECK(dump(load_run_config(kDefaultIni)) == dump(default_run_config()));
}

TEST_CASE("dumped config re-parses to the same configuration") {
  auto cfg = load_run_config(kDefaultIni);
  cfg.scenario.deployment.blocker_density = 0.123456789012345;
  cfg.scenario.fat_threshold = 9;
  cfg.scenario.slim_threshold = kInfiniteThreshold;
  cfg.scenario.loss_weight = LossWeight::type1_only;
  cfg.scenario.contention.literal_collision = true;
  cfg.sweep.min_rates = {1e6, 2.5e7};
  cfg.validate.seed = 99;
  const std::string first = dump(cfg);
  std::istringstream in(first);
  const auto again = parse_run_config(in);
  CHECK(dump(again) == first);
  CHECK(again.scenario.deployment.blocker_density == 0.123456789012345);
  CHECK(again.scenario.fat_threshold == 9);
  CHECK(again.scenario.slim_threshold == kInfiniteThreshold);
}

TEST_CASE("unknown keys are all reported") {
  std::istringstream in("[traffic]\nsesion_rate = 1\n[bogus]\nx = 2\n[model]\nservers = 4\nfoo = 1\n");
  try {
    parse_run_config(in);
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.is_config_error());
    const std::string msg = e.what();
    CHECK(msg.find("sesion_rate") != std::string::npos);
    CHECK(msg.find("bogus") != std::string::npos);
    CHECK(msg.find("foo") != std::string::npos);
  }
}

TEST_CASE("malformed values are config errors") {
  for (const char* doc : {"[traffic]\nsession_rate = fast\n", "[deployment]\nbs_density = 1e-4x\n",
                          "[model]\nservers = -3\n", "[model]\nfat_threshold = big\n", "no section = 1\n",
                          "[licensed]\ntx_array = 64by4\n"}) {
    std::istringstream in(doc);
    try {
      parse_run_config(in);
      FAIL("expected a config error for: " << doc);
    } catch (const Error& e) {
      CHECK(e.is_config_error());
    }
  }
  std::istringstream ok("; comment\n[traffic]\n# comment\nsession_rate = 0.2\n");
  CHECK(parse_run_config(ok).scenario.traffic.session_rate == 0.2);
}

TEST_CASE("MCS table text format") {
  std::istringstream in("# comment\n-5 0.5\n  0   1.0 # trailing\n\n7.5 2.25\n");
  const auto t = McsTable::parse(in);
  REQUIRE(t.size() == 3);
  CHECK(t.outage_threshold_db() == -5.0);
  CHECK(t.efficiency_at(-6.0) == 0.0);
  CHECK(t.efficiency_at(0.0) == 1.0);
  CHECK(t.efficiency_at(100.0) == 2.25);
  std::ostringstream out;
  t.write(out);
  std::istringstream back(out.str());
  const auto t2 = McsTable::parse(back);
  REQUIRE(t2.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(t2.rows()[i].sinr_threshold_db == t.rows()[i].sinr_threshold_db);
    CHECK(t2.rows()[i].spectral_efficiency == t.rows()[i].spectral_efficiency);
  }
  std::istringstream unordered("0 1\n-1 2\n");
  CHECK_THROWS_AS(McsTable::parse(unordered), Error);
  std::istringstream garbage("0 one\n");
  CHECK_THROWS_AS(McsTable::parse(garbage), Error);
}

TEST_CASE("shipped MCS tables start at the outage thresholds") {
  const auto cfg = default_run_config();
  CHECK(cfg.scenario.licensed_mcs.outage_threshold_db() == cfg.scenario.licensed.outage_sinr_db);
  CHECK(cfg.scenario.unlicensed_mcs.outage_threshold_db() == cfg.scenario.unlicensed.outage_sinr_db);
}

TEST_CASE("report CSV schema") {
  const auto& cols = report_columns();
  CHECK(cols.front() == "strategy");
  ReportRow row;
  row.min_rate_bps = 5e7;
  row.cw_nru = 16;
  row.report.q_s = 1.0 / 3.0;
  std::ostringstream out;
  write_report_csv(out, {row});
  const std::string text = out.str();
  CHECK(text.find('\r') == std::string::npos);
  std::istringstream lines(text);
  std::string header, body;
  std::getline(lines, header);
  std::getline(lines, body);
  const auto count = [](const std::string& s) { return std::count(s.begin(), s.end(), ',') + 1; };
  CHECK(count(header) == static_cast<long>(cols.size()));
  CHECK(count(body) == static_cast<long>(cols.size()));
  CHECK(body.find("0.333333333333") != std::string::npos);
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
}

TEST_CASE("hashes and manifest") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const auto dir = std::filesystem::temp_directory_path() / "nru_manifest_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "a.txt", std::ios::binary);
    f << "abc";
  }
  const auto e = describe_file(dir.string(), "a.txt");
  CHECK(e.bytes == 3);
  CHECK(e.sha256 == sha256_hex("abc"));
  RunManifest m;
  m.subcommand = "point";
  m.files.push_back(e);
  std::ostringstream out;
  write_manifest(out, m);
  CHECK(out.str().find("a.txt 3 " + e.sha256) != std::string::npos);
  std::filesystem::remove_all(dir);
}
