#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "powex/cli.hpp"
#include "powex/io.hpp"

using namespace powex;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> lines;
  std::istringstream is(s);
  std::string line;
  while (std::getline(is, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::istringstream is(line);
  std::string cell;
  while (std::getline(is, cell, ',')) cells.push_back(cell);
  return cells;
}

// exit code of the installed binary, for the process-level contract
int spawn_binary(const std::string& args) {
  const std::string cmd = std::string(POWEX_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("format_g17 round-trips binary64", "[cli]") {
  for (double v : {0.1, 1.0 / 3.0, 2.3753296327788478, -41.46435354, 1e-300, 9.87e250}) {
    const std::string s = format_g17(v);
    CHECK(std::stod(s) == v);
    CHECK(s.find(',') == std::string::npos);
  }
}

TEST_CASE("gumbel-moments emits the moment table", "[cli]") {
  const CliRun r = run({"gumbel-moments", "--rmax", "2"});
  REQUIRE(r.code == 0);
  const auto lines = split_lines(r.out);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "r,m_r");
  CHECK(split_csv(lines[1])[1] == "1");
  CHECK(std::stod(split_csv(lines[2])[1]) == Catch::Approx(0.57721566490153286061).epsilon(1e-15));
  CHECK(std::stod(split_csv(lines[3])[1]) == Catch::Approx(1.9781119906559451108).epsilon(1e-14));
}

TEST_CASE("norming command matches the worked example", "[cli]") {
  const CliRun r = run({"norming", "--t", "1", "--n", "100"});
  REQUIRE(r.code == 0);
  const auto lines = split_lines(r.out);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "t,b,c,d,log_n,support_left");
  const auto cells = split_csv(lines[1]);
  CHECK(std::stod(cells[1]) == Catch::Approx(2.3753296327788478).epsilon(1e-11));
  CHECK(std::stod(cells[2]) == Catch::Approx(1.0 / 2.3753296327788478).epsilon(1e-11));
  CHECK(std::stod(cells[3]) == Catch::Approx(2.3753296327788478).epsilon(1e-11));
}

TEST_CASE("kernels command evaluates the printed kernels", "[cli]") {
  const CliRun r = run({"kernels", "--t", "1", "--x", "1"});
  REQUIRE(r.code == 0);
  const auto lines = split_lines(r.out);
  REQUIRE(lines.size() == 2);
  const auto cells = split_csv(lines[1]);
  CHECK(std::stod(cells[2]) == Catch::Approx(-0.5).epsilon(1e-14));           // kappa1
  CHECK(std::stod(cells[5]) == Catch::Approx(-2.9009470008678571).epsilon(1e-12)); // tau
}

TEST_CASE("verify-theorem emits the pinned CSV schema", "[cli]") {
  const CliRun r = run({"verify-theorem", "--t", "1", "--r", "1"});
  CHECK(r.code == 0);
  const auto lines = split_lines(r.out);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "t,r,sign,L_empirical,L_tau_oracle,L_closed_form,dev_oracle,dev_closed,rate_slope,verdict");
  const auto cells = split_csv(lines[1]);
  REQUIRE(cells.size() == 10);
  CHECK(cells[2] == "1");
  CHECK(std::stod(cells[5]) == Catch::Approx(14.620977603007754256).epsilon(1e-12));
  CHECK(cells[9] == "matches-tau-oracle");
}

TEST_CASE("verify-theorem at t = 2 reports the falsification via exit code 1", "[cli]") {
  const CliRun r = run({"verify-theorem", "--t", "2", "--r", "1"});
  CHECK(r.code == 1);
  const auto lines = split_lines(r.out);
  REQUIRE(lines.size() == 2);
  const auto cells = split_csv(lines[1]);
  CHECK(cells[2] == "-1"); // detected sign contradicts the printed bracket
  CHECK(std::stod(cells[4]) == Catch::Approx(4.9108197000796216127).epsilon(1e-8));
  CHECK(cells[9] == "matches-neither");
}

TEST_CASE("rates command", "[cli]") {
  const CliRun r = run({"rates", "--t", "1", "--r", "1"});
  CHECK(r.code == 0);
  const auto cells = split_csv(split_lines(r.out)[1]);
  const double slope = std::stod(cells[2]);
  CHECK(slope >= -1.15);
  CHECK(slope <= -0.85);
  CHECK(cells[5] == "pass");
}

TEST_CASE("mc-check small run passes", "[cli]") {
  const CliRun r = run({"mc-check", "--t", "1", "--n", "100", "--reps", "50000", "--seed", "42", "--rmax", "2"});
  CHECK(r.code == 0);
  const auto lines = split_lines(r.out);
  CHECK(lines[0] == "r,mc_value,std_error,quad_value,quad_error,zscore,verdict");
  REQUIRE(lines.size() == 3);
  for (std::size_t i = 1; i < lines.size(); ++i) CHECK(split_csv(lines[i])[6] == "pass");
}

TEST_CASE("json output parses and mirrors the CSV", "[cli]") {
  const CliRun r = run({"kernels", "--t", "2", "--x", "0", "--format", "json"});
  REQUIRE(r.code == 0);
  const nlohmann::json arr = nlohmann::json::parse(r.out);
  REQUIRE(arr.is_array());
  REQUIRE(arr.size() == 1);
  CHECK(std::stod(arr[0]["varpi"].get<std::string>()) == Catch::Approx(-3.0).epsilon(1e-14));
}

TEST_CASE("--out writes the table to a file", "[cli]") {
  const std::string path = "/tmp/powex_cli_out_test.csv";
  std::remove(path.c_str());
  const CliRun r = run({"gumbel-moments", "--rmax", "1", "--out", path});
  REQUIRE(r.code == 0);
  std::ifstream f(path);
  REQUIRE(f.good());
  std::string header;
  std::getline(f, header);
  CHECK(header == "r,m_r");
  std::remove(path.c_str());
}

TEST_CASE("config file merges under explicit flags", "[cli]") {
  const std::string path = "/tmp/powex_cli_test_config.ini";
  {
    std::ofstream f(path);
    f << "# defaults for the kernels command\n";
    f << "kernels.t = 1\n";
    f << "kernels.x = 0\n";
  }
  // config supplies --x; command line supplies --t which wins over the file
  const CliRun r = run({"--config", path, "kernels", "--t", "2"});
  REQUIRE(r.code == 0);
  const auto cells = split_csv(split_lines(r.out)[1]);
  CHECK(std::stod(cells[0]) == 2.0); // t from the command line
  CHECK(std::stod(cells[1]) == 0.0); // x from the config file
  std::remove(path.c_str());

  // section form of the same file
  {
    std::ofstream f(path);
    f << "[kernels]\n";
    f << "t = 3\n";
    f << "x = 1\n";
  }
  const CliRun r2 = run({"--config", path, "kernels"});
  REQUIRE(r2.code == 0);
  const auto cells2 = split_csv(split_lines(r2.out)[1]);
  CHECK(std::stod(cells2[0]) == 3.0);
  CHECK(std::stod(cells2[1]) == 1.0);
  std::remove(path.c_str());
}

TEST_CASE("usage errors exit with code 2", "[cli]") {
  CHECK(run({"verify-theorem", "--t", "1"}).code == 2);            // missing --r
  CHECK(run({"verify-theorem", "--bogus", "1"}).code == 2);        // unknown flag
  CHECK(run({"norming", "--t", "1"}).code == 2);                   // needs --n or --b
  CHECK(run({"norming", "--t", "1", "--n", "2"}).code == 2);       // n <= 3 rejected downstream
  const CliRun r = run({"verify-theorem", "--bogus", "1"});
  CHECK(r.err.find("Usage") != std::string::npos);
}

TEST_CASE("process-level exit codes match the in-process dispatcher", "[cli]") {
  CHECK(spawn_binary("gumbel-moments --rmax 3") == 0);
  CHECK(spawn_binary("gumbel-moments --rmax 40") == 2);
  CHECK(spawn_binary("kernels --t 1 --x 1") == 0);
  CHECK(spawn_binary("definitely-not-a-command") == 2);
}
