// Acceptance run: one pass/fail line per criterion, then the failing rows.
// Exit status is nonzero when any required row fails.

#include <cstdio>
#include <cstring>
#include <iostream>
#include <string>

#include "hdbell/json_io.hpp"
#include "reproduce.hpp"

int main(int argc, char** argv) {
  hdbell::repro::Options opt;
  opt.data_dir = HDBELL_DATA_DIR;
  std::string manifest_path = "acceptance_manifest.json";
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--quick")) opt.quick = true;
    else if (!std::strcmp(argv[i], "--verbose")) opt.progress = [](const std::string& s) { std::cerr << s << '\n'; };
    else if (!std::strcmp(argv[i], "--manifest") && i + 1 < argc) manifest_path = argv[++i];
    else {
      std::cerr << "usage: hdbell_acceptance [--quick] [--verbose] [--manifest PATH]\n";
      return 2;
    }
  }

  const hdbell::repro::Manifest m = hdbell::repro::run(opt);
  hdbell::save_json_file(manifest_path, hdbell::repro::to_json(m));

  for (int c = 1; c <= 11; ++c) {
    int rows = 0;
    for (const auto& r : m.rows) rows += r.criterion == c;
    const char* status = rows == 0 ? "SKIP" : m.criterion_passed(c) ? "PASS" : "FAIL";
    std::printf("criterion %2d %s  %s (%d rows)\n", c, status, hdbell::repro::criterion_title(c).c_str(), rows);
  }
  for (const auto& r : m.rows) {
    if (r.pass) continue;
    std::printf("  %s %-32s value %.6g, expected %.6g +- %.3g%s%s\n", r.must_pass ? "FAIL" : "note", r.id.c_str(), r.value,
                r.expected, r.tolerance, r.note.empty() ? "" : "; ", r.note.c_str());
  }
  std::printf("total runtime %.1f s, manifest %s\n", m.runtime_seconds, manifest_path.c_str());
  return m.passed() ? 0 : 1;
}
