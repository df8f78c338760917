#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <json.hpp>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

fs::path scratch() {
  const fs::path p(SPHEREQED_SCRATCH);
  fs::create_directories(p);
  return p;
}

// Runs the CLI with stderr discarded; stdout is captured.
Run run(const std::string &args) {
  const std::string cmd = std::string("\"") + SPHEREQED_CLI + "\" " + args + " 2>/dev/null";
  Run r;
  FILE *pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0)
    r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::string> lines(const std::string &s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);)
    if (!l.empty())
      out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string &s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::size_t column(const std::string &header, const std::string &name) {
  const auto cols = split(header);
  for (std::size_t i = 0; i < cols.size(); ++i)
    if (cols[i] == name)
      return i;
  FAIL("missing column " << name);
  return 0;
}

} // namespace

TEST_CASE("help, version and recipe listing") {
  CHECK(run("--help").code == 0);
  CHECK(run("--version").code == 0);
  const Run r = run("--list-recipes");
  CHECK(r.code == 0);
  const auto names = lines(r.out);
  CHECK(names.size() == 10);
  for (const char *want : {"fig2", "fig10", "fig14"})
    CHECK(std::find(names.begin(), names.end(), want) != names.end());
}

TEST_CASE("configuration errors exit with 2") {
  CHECK(run("--recipe nope").code == 2);
  CHECK(run("permittivity --set material.gamma=-1").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("--set nonsense").code == 2);
  CHECK(run("--format xml permittivity").code == 2);
  CHECK(run("").code == 2);
  CHECK(run("--recipe fig2 --set sweep.l_min=80").code == 2);
  CHECK(run("fluctuation --set fluct.steps=0").code == 2);
}

TEST_CASE("I/O errors exit with 4") {
  CHECK(run("--recipe fig2 --out /nonexistent-dir/x.csv").code == 4);
  CHECK(run("--config /nonexistent-dir/cfg.ini").code == 4);
}

TEST_CASE("failed sweep points exit with 3 and keep the other rows") {
  // metals have no WG branch below the gap
  const Run r = run("--recipe fig14 --set sweep.kind=wg --set sweep.l_max=31,17");
  CHECK(r.code == 3);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 1 + 2 + 2);
  const std::size_t err = column(rows[0], "error");
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK_FALSE(split(rows[i])[err].empty());
}

TEST_CASE("fig2 recipe tabulates l = 48..78") {
  const Run r = run("--recipe fig2");
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 32);
  const std::size_t l = column(rows[0], "l");
  const std::size_t qa = column(rows[0], "q_abs");
  const std::size_t qc = column(rows[0], "q_abs_closed_form");
  CHECK(split(rows[1])[l] == "48");
  CHECK(split(rows[31])[l] == "78");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = split(rows[i]);
    CHECK(std::stod(f[qc]) <= std::stod(f[qa]));
  }
}

TEST_CASE("resonances command with the fig2 block gives 31 rows") {
  const Run r = run("resonances --recipe fig2");
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  CHECK(rows.size() == 32);
  CHECK(split(rows[1])[column(rows[0], "command")] == "resonances");
}

TEST_CASE("fig14 recipe sweeps both radii") {
  const Run r = run("--recipe fig14");
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  CHECK(rows.size() == 1 + 31 + 45);
  const std::size_t radius = column(rows[0], "radius");
  CHECK(std::stod(split(rows[1])[radius]) == 10.0);
  CHECK(std::stod(split(rows.back())[radius]) == 5.0);
}

TEST_CASE("fig10 recipe gives both traces starting from zero") {
  const Run r = run("--recipe fig10 --set time.steps=5");
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 1 + 2 * 5);
  const std::size_t t = column(rows[0], "t");
  const std::size_t ie = column(rows[0], "i_exact");
  const std::size_t im = column(rows[0], "i_markov");
  for (std::size_t i : {std::size_t{1}, std::size_t{6}}) {
    const auto f = split(rows[i]);
    CHECK(std::stod(f[t]) == 0.0);
    CHECK(std::stod(f[ie]) == 0.0);
    CHECK(std::stod(f[im]) > 0.0);
  }
}

TEST_CASE("parallel output is byte-identical to serial") {
  const Run a = run("--recipe fig14 --parallel 1");
  const Run b = run("--recipe fig14 --parallel 4");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const Run c = run("--recipe fig10 --set time.steps=5 --parallel 3");
  const Run d = run("--recipe fig10 --set time.steps=5");
  CHECK(c.out == d.out);
}

TEST_CASE("JSON output parses and matches the CSV rows") {
  const Run j = run("--recipe fig2 --format json");
  REQUIRE(j.code == 0);
  const auto doc = nlohmann::json::parse(j.out);
  CHECK(doc["command"] == "qfactors");
  REQUIRE(doc["rows"].size() == 31);
  CHECK(doc["rows"][0]["l"] == 48);
  const Run c = run("--recipe fig2");
  const auto rows = lines(c.out);
  const std::size_t q = column(rows[0], "q_tot");
  CHECK(doc["rows"][0]["q_tot"].get<double>() == std::stod(split(rows[1])[q]));
}

TEST_CASE("config files and precedence") {
  const fs::path dir = scratch();
  const fs::path ini = dir / "sweep.ini";
  {
    std::ofstream f(ini);
    f << "command = qfactors\n[material]\nomega_p = 0.5\ngamma = 1e-6\n[sphere]\nradius = 10\n"
         "[sweep]\nkind = wg\npol = tm\nl_min = 50\nl_max = 52\nradial_order = 1\n";
  }
  const Run a = run("--config " + ini.string());
  REQUIRE(a.code == 0);
  CHECK(lines(a.out).size() == 4);

  const fs::path js = dir / "sweep.json";
  {
    std::ofstream f(js);
    f << R"({"command": "qfactors", "material": {"omega_p": 0.5, "gamma": 1e-6},
             "sphere": {"radius": 10},
             "sweep": {"kind": "wg", "pol": "tm", "l_min": 50, "l_max": 52, "radial_order": 1}})";
  }
  const Run b = run("--config " + js.string());
  REQUIRE(b.code == 0);
  CHECK(a.out == b.out);

  // --set wins over the file, the file over the recipe
  const Run c = run("--recipe fig2 --config " + ini.string() + " --set sweep.l_max=51");
  REQUIRE(c.code == 0);
  CHECK(lines(c.out).size() == 3);

  const Run dump = run("--recipe fig2 --set material.gamma=1e-5 --dump-config");
  CHECK(dump.code == 0);
  CHECK(dump.out.find("gamma = 1e-5") != std::string::npos);
  CHECK(dump.out.find("command = qfactors") != std::string::npos);

  const fs::path out = dir / "fig2.csv";
  fs::remove(out);
  CHECK(run("--recipe fig2 --out " + out.string()).code == 0);
  CHECK(fs::file_size(out) > 0);
}
