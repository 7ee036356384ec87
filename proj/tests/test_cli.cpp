// Exercises the command-line binary end to end: output shapes, manifests,
// rerun determinism, and error signaling. The binary path is injected by the
// build as UDESIGN_CLI_PATH.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "udesign_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(UDESIGN_CLI_PATH) + " " + args +
                    " > /dev/null 2> /dev/null";
  return std::system(cmd.c_str());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

TEST_CASE("construct writes path samples with descriptor and manifest") {
  fs::path out = work_dir() / "two_axis.csv";
  REQUIRE(run_cli("construct --path two-axis --n1 z --n2 y --samples 256 "
                  "--out " + out.string()) == 0);
  auto lines = lines_of(out);
  REQUIRE(lines.size() == 257);
  CHECK(split_csv(lines[0]).size() == 1 + 2 * 4);

  json desc = json::parse(slurp(out.string() + ".desc.json"));
  CHECK(desc["kind"] == "two-axis");
  CHECK(desc["dim"] == 2);
  CHECK(desc["special"] == true);

  json manifest = json::parse(slurp(out.string() + ".manifest.json"));
  CHECK(manifest["command"] == "construct");
  CHECK(manifest["parameters"]["path"] == "two-axis");
}

TEST_CASE("construct projects curves to three coordinates") {
  fs::path out = work_dir() / "xi3d.csv";
  REQUIRE(run_cli("construct --curve xi --samples 128 --project stereo --out " +
                  out.string()) == 0);
  auto lines = lines_of(out);
  REQUIRE(lines.size() == 129);
  CHECK(lines[0] == "s,px,py,pz");
}

TEST_CASE("construct samples matrix paths in higher dimension") {
  fs::path out = work_dir() / "hw3.csv";
  REQUIRE(run_cli("construct --path hw --d 3 --samples 81 --out " +
                  out.string()) == 0);
  auto lines = lines_of(out);
  REQUIRE(lines.size() == 82);
  CHECK(split_csv(lines[0]).size() == 1 + 2 * 9);
}

TEST_CASE("reruns are byte-identical") {
  fs::path out = work_dir() / "rerun.csv";
  std::string cmd = "construct --curve gamma --samples 64 --out " +
                    out.string();
  REQUIRE(run_cli(cmd) == 0);
  std::string first = slurp(out);
  REQUIRE(run_cli(cmd) == 0);
  CHECK(slurp(out) == first);

  fs::path gate = work_dir() / "gate_rerun.csv";
  std::string sim = "simulate gate --pulses square --eta 0:0.1:0.1 "
                    "--trials 8 --seed 5 --steps 256 --out " + gate.string();
  REQUIRE(run_cli(sim) == 0);
  std::string gate_first = slurp(gate);
  REQUIRE(run_cli(sim) == 0);
  CHECK(slurp(gate) == gate_first);
}

TEST_CASE("verify reports a design verdict") {
  fs::path out = work_dir() / "report.json";
  REQUIRE(run_cli("verify --path two-axis --n 4 --out " + out.string()) == 0);
  json report = json::parse(slurp(out));
  CHECK(std::abs(report["frame_potential_t1"].get<double>() - 1.0) < 1e-10);
  CHECK(report["verdict"] == true);
  CHECK(report["num_samples"] == 4);
}

TEST_CASE("verify scans emit per-count frame potentials") {
  fs::path out = work_dir() / "fiber_scan.csv";
  REQUIRE(run_cli("verify --path fiber --d 3 --scan 20:30:5 --out " +
                  out.string()) == 0);
  auto lines = lines_of(out);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "n,frame_potential");
  auto row25 = split_csv(lines[2]);
  REQUIRE(row25[0] == "25");
  CHECK(std::abs(std::stod(row25[1]) - 1.0) < 1e-9);

  fs::path open_out = work_dir() / "open_scan.csv";
  REQUIRE(run_cli("verify --path open --target Z --scan 8:32:8 --out " +
                  open_out.string()) == 0);
  auto open_lines = lines_of(open_out);
  REQUIRE(open_lines.size() == 5);
  double f8 = std::stod(split_csv(open_lines[1])[1]);
  double f16 = std::stod(split_csv(open_lines[2])[1]);
  double f32 = std::stod(split_csv(open_lines[4])[1]);
  CHECK(f8 > f16);
  CHECK(f16 > f32);
  CHECK(f32 > 1.0);
}

TEST_CASE("simulate gate writes csv and json mirror") {
  fs::path out = work_dir() / "gate.csv";
  REQUIRE(run_cli("simulate gate --pulses urc,square --eta 0:0.1:0.05 "
                  "--trials 20 --seed 3 --steps 1024 --out " +
                  out.string()) == 0);
  auto lines = lines_of(out);
  REQUIRE(lines.size() == 1 + 2 * 3);
  CHECK(lines[0] == "pulse,eta,mean_fidelity,std_error");

  json mirror = json::parse(slurp(out.string() + ".json"));
  CHECK(mirror["data"].size() == 6);
  CHECK(mirror["metadata"]["trials"] == 20);
  // Clean pulses at zero noise stay at unit fidelity.
  for (const auto& entry : mirror["data"]) {
    if (entry["eta"].get<double>() == 0.0)
      CHECK(entry["mean_fidelity"].get<double>() > 1.0 - 1e-6);
  }
}

TEST_CASE("simulate memory and ff write expected shapes") {
  fs::path mem = work_dir() / "memory.csv";
  REQUIRE(run_cli("simulate memory --kinds cpmg --reps 3 --trials 10 "
                  "--etamax 0.05 --seed 3 --steps 512 --out " +
                  mem.string()) == 0);
  auto mem_lines = lines_of(mem);
  REQUIRE(mem_lines.size() == 4);
  CHECK(mem_lines[0] == "kind,repetition,mean_fidelity,std_error");

  fs::path ff = work_dir() / "ff.csv";
  REQUIRE(run_cli("simulate ff --pulses square --omega 0:0.05:0.025 "
                  "--samples 512 --out " + ff.string()) == 0);
  auto ff_lines = lines_of(ff);
  REQUIRE(ff_lines.size() == 4);
  auto zero_row = split_csv(ff_lines[1]);
  CHECK(std::stod(zero_row[1]) == 0.0);
  CHECK(std::stod(zero_row[2]) == 0.0);
  CHECK(std::stod(zero_row[3]) == 0.0);
  CHECK(std::stod(zero_row[4]) == 0.0);
}

TEST_CASE("project maps sampled curve files") {
  fs::path curve = work_dir() / "xi_plain.csv";
  REQUIRE(run_cli("construct --curve xi --samples 64 --out " +
                  curve.string()) == 0);
  fs::path out = work_dir() / "xi_hopf.csv";
  REQUIRE(run_cli("project --in " + curve.string() + " --map hopf --out " +
                  out.string()) == 0);
  auto lines = lines_of(out);
  REQUIRE(lines.size() == 65);
  CHECK(lines[0] == "s,px,py,pz");
}

TEST_CASE("invalid invocations exit nonzero and leave no partial output") {
  CHECK(run_cli("bogus") != 0);
  CHECK(run_cli("construct --curve xi") != 0);
  fs::path out = work_dir() / "never.csv";
  CHECK(run_cli("construct --curve nope --out " + out.string()) != 0);
  CHECK_FALSE(fs::exists(out));
  CHECK(run_cli("construct --path fiber --d 1 --out " + out.string()) != 0);
  CHECK_FALSE(fs::exists(out));
  CHECK(run_cli("verify --path two-axis --n 4 --scan 4:8 --out " +
                out.string()) != 0);
  CHECK(run_cli("construct --curve xi --project bogus --out " +
                out.string()) != 0);
  CHECK_FALSE(fs::exists(out));
}
