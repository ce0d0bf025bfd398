#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* p = std::getenv("OPFIELD_CLI_BIN");
  REQUIRE_MESSAGE(p != nullptr, "OPFIELD_CLI_BIN must point at the opfield binary");
  return p;
}

fs::path work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "opfield_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  fs::path log = work_dir() / "out.txt";
  std::string cmd = "\"" + cli_path() + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::ostringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE_MESSAGE(in.good(), ("missing output file " + p.string()));
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("usage errors exit with code 1") {
  CHECK(run_cli("bogus_subcommand").exit_code == 1);
  CHECK(run_cli("spectrum --model no_such_model --out-dir \"" + work_dir().string() + "\"")
            .exit_code == 1);
  CHECK(run_cli("sweep --grid-kind list --points , --out-dir \"" + work_dir().string() + "\"")
            .exit_code == 1);
}

TEST_CASE("spectrum of AM at t=1/3 reports three bands") {
  auto r = run_cli("spectrum --model almost_mathieu --mu 1 --theta 0 --t 1/3 --out-dir \"" +
                   work_dir().string() + "\" --prefix am13");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("bands: 3") != std::string::npos);
  auto j = read_json(work_dir() / "am13.json");
  CHECK(j.at("spectrum").at("intervals").size() == 3);
  CHECK(j.at("config").at("model") == "almost_mathieu");
}

TEST_CASE("spectrum of the constant-potential AM is [V-2, V+2]") {
  auto r = run_cli("spectrum --model almost_mathieu --mu 1 --theta 0.2 --t 0/1 --out-dir \"" +
                   work_dir().string() + "\" --prefix am0");
  CHECK(r.exit_code == 0);
  auto j = read_json(work_dir() / "am0.json");
  auto iv = j.at("spectrum").at("intervals");
  REQUIRE(iv.size() == 1);
  double v = 2 * std::cos(2 * M_PI * 0.2);
  CHECK(iv.at(0).at(0).get<double>() == doctest::Approx(v - 2).epsilon(1e-9));
  CHECK(iv.at(0).at(1).get<double>() == doctest::Approx(v + 2).epsilon(1e-9));
}

TEST_CASE("substitution model at lambda=0 emits the free band") {
  auto r = run_cli("spectrum --model substitution --word period_doubling --lambda 0 --level 4"
                   " --out-dir \"" + work_dir().string() + "\" --prefix free");
  CHECK(r.exit_code == 0);
  auto j = read_json(work_dir() / "free.json");
  auto iv = j.at("spectrum").at("intervals");
  REQUIRE(iv.size() == 1);
  CHECK(iv.at(0).at(0).get<double>() == doctest::Approx(-2).epsilon(1e-9));
  CHECK(iv.at(0).at(1).get<double>() == doctest::Approx(2).epsilon(1e-9));
}

TEST_CASE("verify on a constant family exits 0") {
  auto r = run_cli("verify --model almost_mathieu --mu 0 --grid-kind list"
                   " --points 1/3,2/5,3/7,5/11 --out-dir \"" + work_dir().string() +
                   "\" --prefix const");
  CHECK(r.exit_code == 0);
  auto j = read_json(work_dir() / "const_report.json");
  CHECK(j.at("bounds").at("passed") == true);
}

TEST_CASE("verify near the AM closing reports the square-root width exponent") {
  auto r = run_cli("verify --model almost_mathieu --mu 1 --theta 0.25 --grid-kind closing"
                   " --qmax 24 --match-radius 0.3 --width-tol 1e-4 --out-dir \"" +
                   work_dir().string() + "\" --prefix close");
  CHECK(r.exit_code == 0);
  auto j = read_json(work_dir() / "close_report.json");
  CHECK(j.at("bounds").at("passed") == true);
  bool found = false;
  for (const auto& track : j.at("closing_tracks")) {
    double c = track.at("c").get<double>();
    if (std::abs(c) > 0.1) continue;
    double a = track.at("width_exponent").at("alpha").get<double>();
    if (a > 0.25 && a < 0.75) found = true;
  }
  CHECK(found);
}

TEST_CASE("verify flags an injected fault with exit code 2") {
  // The shift has to clear the envelope the clean-data constants allow.
  auto r = run_cli("verify --model almost_mathieu --mu 1 --theta 0.25 --grid-kind closing"
                   " --qmax 12 --match-radius 0.3 --inject-shift 12 --out-dir \"" +
                   work_dir().string() + "\" --prefix fault");
  CHECK(r.exit_code == 2);
  auto j = read_json(work_dir() / "fault_report.json");
  CHECK(j.at("bounds").at("passed") == false);
}

TEST_CASE("counterexample command reports the two exponents") {
  auto r = run_cli("counterexample --gaps 12 --out-dir \"" + work_dir().string() +
                   "\" --prefix cex");
  CHECK(r.exit_code == 0);
  auto j = read_json(work_dir() / "cex_report.json");
  CHECK(j.at("width_exponent").at("alpha").get<double>() == doctest::Approx(0.25).epsilon(0.05));
  CHECK(j.at("hausdorff_exponent").at("alpha").get<double>() ==
        doctest::Approx(0.5).epsilon(0.05));
  bool tip = false;
  for (const auto& t : j.at("tips"))
    if (!t.at("isolated").get<bool>()) tip = true;
  CHECK(tip);
}

TEST_CASE("config file supplies options and flags override it") {
  fs::path cfg = work_dir() / "run.ini";
  std::ofstream out(cfg);
  out << "[spectrum]\nmodel=almost_mathieu\nmu=1\ntheta=0\nt=0/1\n";
  out.close();
  auto r = run_cli("--config \"" + cfg.string() + "\" spectrum --out-dir \"" +
                   work_dir().string() + "\" --prefix cfg1");
  CHECK(r.exit_code == 0);
  auto j = read_json(work_dir() / "cfg1.json");
  auto iv = j.at("spectrum").at("intervals");
  REQUIRE(iv.size() == 1);
  CHECK(iv.at(0).at(0).get<double>() == doctest::Approx(0.0).epsilon(1e-9));  // V = 2, band [0, 4]

  // Command-line theta overrides the file's value.
  auto r2 = run_cli("--config \"" + cfg.string() + "\" spectrum --theta 0.25 --out-dir \"" +
                    work_dir().string() + "\" --prefix cfg2");
  CHECK(r2.exit_code == 0);
  auto j2 = read_json(work_dir() / "cfg2.json");
  auto iv2 = j2.at("spectrum").at("intervals");
  REQUIRE(iv2.size() == 1);
  CHECK(iv2.at(0).at(0).get<double>() == doctest::Approx(-2.0).epsilon(1e-9));  // V = 0
  CHECK(j2.at("config").at("theta") == "0.25");
}

TEST_CASE("holder command emits both estimates") {
  auto r = run_cli("holder --model kohmoto --lambda 1 --grid-kind list"
                   " --points 3/7,5/11,8/17,12/25,17/35 --out-dir \"" + work_dir().string() +
                   "\" --prefix koh");
  CHECK(r.exit_code == 0);
  auto j = read_json(work_dir() / "koh_holder.json");
  CHECK(j.contains("p2_modulus"));
  CHECK(j.contains("spectrum_modulus"));
  CHECK(j.at("p2_modulus").at("degenerate") == false);
}
