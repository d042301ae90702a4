// Runs `catou verify-all --seed 42` at one and two threads and prints one
// PASS/FAIL line per acceptance criterion.
//
//   acceptance <path-to-catou> <work-dir>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "catou/io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr double kRuntimeLimit = 60.0;  // seconds, AC1

struct Criterion {
  std::string id;
  std::string title;
  std::vector<std::string> checks;
};

const std::vector<Criterion> kCriteria = {
    {"AC1", "annealed atom variance 1/4", {"atom-variance-quarter"}},
    {"AC2", "total-mass Laplace law and variance", {"sbm-total-mass-laplace", "sbm-mass-martingale"}},
    {"AC3", "first and second moment measures", {"first-moment", "second-moment"}},
    {"AC4", "occupation-time duality", {"occupation-laplace"}},
    {"AC5", "characteristic-Laplace functional", {"char-laplace"}},
    {"AC6", "fourth moment and t^2 growth", {"fourth-moment-growth"}},
    {"AC7", "quenched Hoelder exponent", {"quenched-holder"}},
    {"AC8", "annealed leptokurtosis", {"leptokurtosis"}},
    {"AC9", "dual solver quality", {"dual-convergence", "propagator-compose"}},
    {"AC10", "affine structure", {"affine-ou", "affine-cir"}},
};

int run(const std::string& catou, const fs::path& out, int threads) {
  const std::string cmd = "\"" + catou + "\" verify-all --seed 42 --threads " + std::to_string(threads) + " --out \"" +
                          out.string() + "\" > \"" + (out.string() + ".log") + "\" 2>&1";
  return std::system(cmd.c_str());
}

std::map<std::string, std::string> artifacts(const fs::path& dir) {
  std::map<std::string, std::string> m;
  if (!fs::exists(dir)) return m;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name == "report.json" || e.path().extension() == ".csv") m[name] = catou::io::read_text(e.path());
  }
  return m;
}

void line(const std::string& id, bool ok, const std::string& detail) {
  std::printf("%-5s %s  %s\n", id.c_str(), ok ? "PASS" : "FAIL", detail.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: acceptance <catou> <work-dir>\n";
    return 2;
  }
  const std::string catou = argv[1];
  const fs::path work = argv[2];
  const fs::path a = work / "threads1", b = work / "threads2";
  fs::remove_all(work);
  fs::create_directories(work);
  const int rc1 = run(catou, a, 1);
  const int rc2 = run(catou, b, 2);
  if (!fs::exists(a / "report.json")) {
    std::cerr << "acceptance: verify-all produced no report (exit " << rc1 << "), see " << a.string() << ".log\n";
    return 2;
  }
  const json report = catou::io::read_json(a / "report.json");
  const json timing = catou::io::read_json(a / "timing.json");
  std::map<std::string, json> by_name;
  for (const auto& c : report.at("checks")) by_name[c.at("check").get<std::string>()] = c;

  bool all = true;
  for (const auto& cr : kCriteria) {
    bool ok = true;
    std::string detail = cr.title + ":";
    for (const auto& name : cr.checks) {
      if (!by_name.count(name)) {
        ok = false;
        detail += " " + name + " missing;";
        continue;
      }
      const auto& c = by_name[name];
      std::size_t good = 0, n = c.at("rows").size();
      for (const auto& r : c.at("rows")) good += r.at("pass").get<bool>() ? 1 : 0;
      const bool err = c.contains("error") && !c.at("error").get<std::string>().empty();
      ok = ok && !err && n > 0 && good == n;
      detail += " " + name + " " + std::to_string(good) + "/" + std::to_string(n) + " rows" + (err ? " (error)" : "") + ";";
    }
    if (cr.id == "AC1") {
      double wall = -1.0;
      for (const auto& t : timing.at("checks"))
        if (t.at("check") == "atom-variance-quarter") wall = t.at("wall_seconds").get<double>();
      char buf[96];
      std::snprintf(buf, sizeof buf, " wall %.2f s at %d thread(s), limit %.0f s", wall, timing.at("threads").get<int>(),
                    kRuntimeLimit);
      detail += buf;
      ok = ok && wall >= 0.0 && wall < kRuntimeLimit;
    }
    line(cr.id, ok, detail);
    all = all && ok;
  }

  const auto fa = artifacts(a), fb = artifacts(b);
  std::set<std::string> differ;
  for (const auto& [k, v] : fa)
    if (!fb.count(k) || fb.at(k) != v) differ.insert(k);
  for (const auto& [k, v] : fb)
    if (!fa.count(k)) differ.insert(k);
  const bool repro = rc2 == rc1 && !fa.empty() && differ.empty() && fa.count("report.json");
  std::string d = "verify-all --seed 42 at 1 and 2 threads: " + std::to_string(fa.size()) + " files compared";
  for (const auto& k : differ) d += ", differs: " + k;
  line("AC11", repro, d);
  all = all && repro;

  std::printf("%s\n", all ? "ALL ACCEPTANCE CRITERIA PASS" : "SOME ACCEPTANCE CRITERIA FAIL");
  return all ? 0 : 1;
}
