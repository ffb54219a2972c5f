#pragma once

/// The command list behind the stored golden outputs, shared by the CLI test
/// suite (which can regenerate the files) and the acceptance run (which only
/// compares).  Keeping the list in one place guarantees the two agree on
/// what "the golden set" is.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <tri3/census.hpp>
#include <tri3/cli.hpp>
#include <tri3/orbits.hpp>

#include "util.hpp"

namespace tri3::testutil {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

inline CliRun run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = tri3::cli::run(std::move(args), out, err);
  return CliRun{code, out.str(), err.str()};
}

/// A file under tests/golden/ together with the command that produces it.
/// When input_content is nonempty it is written to a scratch file whose path
/// replaces the "{input}" placeholder in args.
struct GoldenCommand {
  std::string name;
  std::vector<std::string> args;
  std::string input_content;
};

inline const std::vector<GoldenCommand>& golden_manifest() {
  static const std::vector<GoldenCommand> manifest = [] {
    std::vector<GoldenCommand> m;
    const std::string fig1 = data_path("fig1.tri");
    m.push_back({"validate_fig1.txt", {"validate", fig1}, ""});
    m.push_back({"info_fig1.txt", {"info", fig1}, ""});
    m.push_back({"info_fig1.json", {"info", fig1, "--format", "json"}, ""});
    m.push_back({"homology_fig1.txt", {"homology", fig1}, ""});
    m.push_back({"homology_fig1.json", {"homology", fig1, "--format", "json"}, ""});
    m.push_back({"certify_fig1.json", {"certify", fig1, "--format", "json"}, ""});
    m.push_back({"aut_fig1.json", {"aut", fig1, "--format", "json"}, ""});
    m.push_back({"census_1.txt", {"census", "1"}, ""});
    m.push_back({"census_1.json", {"census", "1", "--format", "json"}, ""});
    m.push_back({"census_2_count.txt", {"census", "2", "--count-only"}, ""});

    // One info document per one-tetrahedron class, in census (ascending
    // signature) order, plus the certificate of the first six-valent member.
    const CensusResult census = enumerate_census(1);
    int high_valence = -1;
    for (std::size_t i = 0; i < census.classes.size(); ++i) {
      char name[40];
      std::snprintf(name, sizeof name, "info_n1_%02zu.json", i);
      m.push_back({name,
                   {"info", "{input}", "--format", "json"},
                   census.classes[i].signature});
      if (high_valence < 0 &&
          edge_classes(census.classes[i].representative).min_valence() >= 6)
        high_valence = static_cast<int>(i);
    }
    if (high_valence < 0)
      throw std::logic_error("no six-valent one-tetrahedron class found");
    m.push_back({"certify_n1_highvalence.json",
                 {"certify", "{input}", "--format", "json"},
                 census.classes[static_cast<std::size_t>(high_valence)].signature});

    m.push_back({"group_build_trivial.txt", {"group-build", "trivial"}, ""});
    m.push_back(
        {"group_build_trivial.json", {"group-build", "trivial", "--format", "json"}, ""});
    return m;
  }();
  return manifest;
}

inline std::string golden_dir() {
  return std::string(TRI3_SOURCE_DIR) + "/tests/golden/";
}

/// Runs one golden command and returns its standard output; throws if the
/// command does not succeed.
inline std::string golden_run(const GoldenCommand& cmd) {
  std::string input_path;
  std::vector<std::string> args = cmd.args;
  if (!cmd.input_content.empty()) {
    static int counter = 0;
    input_path = (std::filesystem::temp_directory_path() /
                  ("tri3_golden_input_" + std::to_string(counter++)))
                     .string();
    std::ofstream out(input_path, std::ios::binary);
    out << cmd.input_content;
    out.close();
    for (std::string& a : args)
      if (a == "{input}") a = input_path;
  }
  const CliRun r = run_cli(std::move(args));
  if (!input_path.empty()) std::remove(input_path.c_str());
  if (r.code != 0)
    throw std::runtime_error("golden command for " + cmd.name +
                             " exited with code " + std::to_string(r.code));
  return r.out;
}

}  // namespace tri3::testutil
