#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "cvtomo/io.hpp"

namespace fs = std::filesystem;
using cvtomo::io::json;

namespace {

const fs::path dir = fs::temp_directory_path() / "cvtomo_cli_test";

int cli(const std::string& args) {
  const std::string cmd = std::string(CVTOMO_CLI) + " " + args + " > " + (dir / "stdout.txt").string() + " 2> " +
                          (dir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string path(const std::string& name) { return (dir / name).string(); }

struct Workspace {
  Workspace() {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
};

} // namespace

TEST_CASE("single-step subcommands chain into a reconstruction") {
  Workspace w;
  REQUIRE(cli("gen-state --kind fock --param n=1 --cutoff 10 --modes 1 --out " + path("state.json")) == 0);
  REQUIRE(cli("gen-povm --kind quadrature --modes 1 --cutoff 10 --q-count 7 --theta-count 5 --theta-inclusive --out " +
              path("povm.json")) == 0);
  CHECK(cvtomo::io::read_json(path("povm.json"))["header"]["count"] == 35);
  REQUIRE(cli("simulate --state " + path("state.json") + " --povm " + path("povm.json") + " --noiseless --out " +
              path("data.jsonl") + " --sinogram-out " + path("sino.csv")) == 0);
  CHECK(cli("reconstruct-sdp --data " + path("data.jsonl") + " --povm " + path("povm.json") + " --out " + path("rho.json") +
            " --report " + path("report.json")) == 0);
  CHECK(cvtomo::io::read_json(path("report.json"))["status"] == "optimal");
  CHECK(cli("metrics --rho " + path("rho.json") + " --target " + path("state.json") + " --out " + path("m.json")) == 0);
  CHECK(cvtomo::io::read_json(path("m.json"))["fidelity"].get<double>() >= 0.99);
  CHECK(cli("wigner --rho " + path("rho.json") + " --grid -3:0.5:3 --out " + path("w.csv")) == 0);
  CHECK(fs::exists(path("w.csv")));
  CHECK(cli("reconstruct-irt --sinogram " + path("sino.csv") + " --kc 4 --grid -5:0.1:5 --out " + path("wirt.csv") +
            " --rho-out " + path("rho_irt.json")) == 0);
  CHECK(fs::exists(path("rho_irt.json")));
}

TEST_CASE("exit codes") {
  Workspace w;
  CHECK(cli("no-such-command") == 1);
  CHECK(cli("gen-state --kind photon --out " + path("s.json")) == 1);
  CHECK(cli("metrics --rho " + path("missing.json")) == 1);
  cvtomo::io::write_text(path("bad.json"), "{\"subset_size\": 0}");
  CHECK(cli("--config " + path("bad.json") + " --out-dir " + path("run_bad") + " run") == 1);
  CHECK_FALSE(fs::exists(path("run_bad")));

  REQUIRE(cli("gen-state --kind coherent --param z_re=0.5 --cutoff 4 --modes 1 --out " + path("c.json")) == 0);
  REQUIRE(cli("gen-povm --kind quadrature --modes 1 --cutoff 4 --q-count 11 --theta-count 4 --out " + path("p.json")) == 0);
  REQUIRE(cli("simulate --state " + path("c.json") + " --povm " + path("p.json") + " --snr 10 --noise-seed 3 --out " +
              path("d.jsonl")) == 0);
  CHECK(cli("reconstruct-sdp --algorithm admm --max-iters 5 --data " + path("d.jsonl") + " --povm " + path("p.json") +
            " --out " + path("r.json")) == 2);
}

TEST_CASE("run and sweep from a configuration file") {
  Workspace w;
  REQUIRE(cli("run --print-config") == 0);
  const json defaults = cvtomo::io::read_json(path("stdout.txt"));
  CHECK(defaults["subset_size"] == 400);
  json cfg = defaults;
  cfg["state"] = {{"kind", "fock"}, {"params", {{"n", 1}}}};
  cfg["trunc"] = {{"cutoff_n", 10}, {"modes", 1}};
  cfg["grid"]["q_count"] = 7;
  cfg["grid"]["theta_count"] = 5;
  cfg["grid"]["theta_inclusive"] = true;
  cfg["subset_size"] = 35;
  cfg["noise"]["enabled"] = false;
  cvtomo::io::write_json(path("run.json"), cfg);
  CHECK(cli("--config " + path("run.json") + " --out-dir " + path("run_out") + " --seed 4 run") == 0);
  const json manifest = cvtomo::io::read_json(path("run_out/manifest.json"));
  CHECK(manifest["metrics"]["fidelity"].get<double>() >= 0.99);

  const json sweep_cfg = {{"base", cfg}, {"subset_sizes", {20, 35}}, {"repeats", 2}};
  cvtomo::io::write_json(path("sweep.json"), sweep_cfg);
  CHECK(cli("--config " + path("sweep.json") + " --out-dir " + path("sweep_out") + " --jobs 2 sweep") == 0);
  CHECK(fs::exists(path("sweep_out/sweep.csv")));
}
