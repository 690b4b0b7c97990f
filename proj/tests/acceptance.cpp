// Runs the acceptance criteria against the committed configs and frozen constants.
// Usage: acceptance [report_dir]
#include <chrono>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "rlt/core/error.hpp"
#include "rlt/experiment/config.hpp"
#include "rlt/experiment/suites.hpp"

using namespace rlt;

namespace {

struct Criterion {
  std::string id;
  std::string title;
  std::string suite;
  std::vector<int> dims;
  std::vector<std::string> checks;  // empty: every check of the suite
  double max_seconds = 0.0;         // 0: no runtime limit
};

struct Run {
  SuiteReport report;
  double seconds = 0.0;
  std::string error;
};

const std::vector<Criterion> kCriteria = {
    {"AC1", "restricted weak type", "rwt", {2, 3}, {}, 600.0},
    {"AC2", "ball pairs are quasiextremal", "prop15", {2, 3}, {"epsilon_above_c0", "epsilon_concentrated"}},
    {"AC3", "envelope measure convergence", "prop15", {2, 3}, {"envelope_convergence_order"}},
    {"AC4", "shrunk-set slice bound", "prop15", {2, 3}, {"shrunk_slice_exact"}},
    {"AC5", "symmetry invariance", "symmetry", {2, 3}, {}},
    {"AC6", "ball covering", "cover", {2, 3}, {}},
    {"AC7", "slicing bound", "slicing", {2, 3}, {}},
    {"AC8", "determinant moment", "detmoment", {2, 3}, {}},
    {"AC9", "tower and inflation", "tower", {2, 3}, {}},
    {"AC10", "trilinear bound", "trilinear", {2, 3}, {}},
    {"AC11", "extract-ball round trip", "extract", {2, 3}, {}},
    {"AC12", "sparse penalty", "lambda0", {2}, {}},
    {"AC13", "Lorentz norms and flatness", "lorentz", {2, 3}, {}},
};

}  // namespace

int main(int argc, char** argv) {
  const std::string out_dir = argc > 1 ? argv[1] : "";
  std::map<std::pair<std::string, int>, Run> runs;
  auto run = [&](const std::string& suite, int d) -> const Run& {
    auto key = std::make_pair(suite, d);
    auto it = runs.find(key);
    if (it != runs.end()) return it->second;
    Run r;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      r.report = run_suite(suite, default_config(d));
      if (!out_dir.empty()) write_report(r.report, out_dir, "json");
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::fprintf(stderr, "  ran %s d=%d in %.1f s\n", suite.c_str(), d, r.seconds);
    return runs.emplace(key, std::move(r)).first->second;
  };

  int failed = 0;
  for (const Criterion& c : kCriteria) {
    bool ok = true;
    std::string notes;
    for (int d : c.dims) {
      const Run& r = run(c.suite, d);
      const std::string tag = " d" + std::to_string(d);
      if (!r.error.empty()) {
        ok = false;
        notes += tag + " error: " + r.error;
        continue;
      }
      std::vector<std::string> names = c.checks;
      if (names.empty())
        for (const Check& k : r.report.checks) names.push_back(k.name);
      for (const std::string& n : names) {
        const Check* k = r.report.find(n);
        if (!k || !k->passed) {
          ok = false;
          notes += tag + " " + n + (k ? " failed " + k->details.dump() : " missing");
        }
      }
      if (c.max_seconds > 0.0) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.0f s", r.seconds);
        notes += tag + " " + buf;
        if (r.seconds > c.max_seconds) {
          ok = false;
          notes += " (limit " + std::to_string(static_cast<int>(c.max_seconds)) + " s)";
        }
      }
    }
    failed += ok ? 0 : 1;
    std::printf("%s %s  %s%s\n", c.id.c_str(), ok ? "PASS" : "FAIL", c.title.c_str(),
                notes.empty() ? "" : (" |" + notes).c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", kCriteria.size() - failed, kCriteria.size());
  return failed == 0 ? 0 : 1;
}
