#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <tri3/census.hpp>
#include <tri3/cli.hpp>

#include "golden_manifest.hpp"
#include "util.hpp"

using tri3::AbelianGroup;
using tri3::CanonicalForm;
using tri3::CensusResult;
using tri3::Triangulation;
using tri3::enumerate_census;
using tri3::testutil::CliRun;
using tri3::testutil::data_path;
using tri3::testutil::golden_dir;
using tri3::testutil::golden_manifest;
using tri3::testutil::golden_run;
using tri3::testutil::read_file;
using tri3::testutil::run_cli;

namespace {

/// Byte-compares against the stored golden file.  Set TRI3_REGEN_GOLDENS=1
/// to rewrite the stored files from the current output instead.
void golden_check(const std::string& name, const std::string& actual) {
  const std::string path = golden_dir() + name;
  if (std::getenv("TRI3_REGEN_GOLDENS") != nullptr) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << actual;
    return;
  }
  INFO("golden file: " << name);
  const std::string expected = read_file(path);
  REQUIRE(actual == expected);
}

/// Writes content to a fresh file under the system temp directory.
class TempFile {
 public:
  explicit TempFile(const std::string& stem, const std::string& content = "") {
    path_ = (std::filesystem::temp_directory_path() /
             ("tri3_test_" + stem + "_" + std::to_string(counter_++)))
                .string();
    if (!content.empty()) {
      std::ofstream out(path_, std::ios::binary);
      out << content;
    }
  }
  ~TempFile() { std::remove(path_.c_str()); }
  const std::string& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  std::string path_;
};

}  // namespace

TEST_CASE("usage errors exit with code two") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {},
           {"frobnicate"},
           {"info"},
           {"info", "x.tri", "--bogus-flag"},
           {"census"},
           {"census", "9"},
           {"census", "0"},
           {"census", "1", "--format", "yaml"},
           {"census", "1", "--jobs", "0"},
           {"group-build"},
       }) {
    const CliRun r = run_cli(args);
    INFO("args: " << (args.empty() ? "(none)" : args.front()));
    CHECK(r.code == 2);
    CHECK(r.out.empty());
    CHECK(r.err.find("usage error") != std::string::npos);
  }
}

TEST_CASE("help is printed on request") {
  const CliRun top = run_cli({"--help"});
  REQUIRE(top.code == 0);
  REQUIRE(top.out.find("Subcommands") != std::string::npos);
  REQUIRE(top.out.find("group-build") != std::string::npos);
  const CliRun sub = run_cli({"census", "--help"});
  REQUIRE(sub.code == 0);
  REQUIRE(sub.out.find("--min-valence") != std::string::npos);
}

TEST_CASE("domain errors exit with code one") {
  SECTION("missing file") {
    const CliRun r = run_cli({"validate", "/nonexistent/nowhere.tri"});
    REQUIRE(r.code == 1);
    REQUIRE(r.err.find("error: [domain]") != std::string::npos);
  }
  SECTION("malformed TRI text") {
    const TempFile bad("syntax", "tri nonsense\n");
    const CliRun r = run_cli({"validate", bad.path()});
    REQUIRE(r.code == 1);
    REQUIRE(r.err.find("error: [syntax]") != std::string::npos);
  }
  SECTION("incomplete gluing") {
    const TempFile bad("incomplete", "tri 1\n0 0 : 0 1 : 1 0 2 3\n");
    const CliRun r = run_cli({"validate", bad.path()});
    REQUIRE(r.code == 1);
    REQUIRE(r.err.find("error: [incomplete_gluing]") != std::string::npos);
  }
  SECTION("bad group table") {
    const TempFile bad("table", "group 2\n0 1\n1 1\n");
    const CliRun r = run_cli({"group-build", bad.path()});
    REQUIRE(r.code == 1);
    REQUIRE(r.err.find("error: [domain]") != std::string::npos);
  }
  SECTION("complexity limit") {
    const CliRun r = run_cli({"group-build", "sym:3"});
    REQUIRE(r.code == 1);
    REQUIRE(r.err.find("limit") != std::string::npos);
    const CliRun tight =
        run_cli({"group-build", "cyclic:2", "--max-complexity", "100"});
    REQUIRE(tight.code == 1);
  }
}

TEST_CASE("validate prints the exact summary line") {
  const CliRun r = run_cli({"validate", data_path("fig1.tri")});
  REQUIRE(r.code == 0);
  REQUIRE(r.out == "valid, n=2, manifold=true\n");
  REQUIRE(r.err.empty());
}

TEST_CASE("every json document carries the schema marker") {
  const std::string fig1 = data_path("fig1.tri");
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"validate", fig1, "--format", "json"},
           {"info", fig1, "--format", "json"},
           {"homology", fig1, "--format", "json"},
           {"certify", fig1, "--format", "json"},
           {"aut", fig1, "--format", "json"},
           {"census", "1", "--count-only", "--format", "json"},
           {"group-build", "trivial", "--format", "json"},
       }) {
    const CliRun r = run_cli(args);
    INFO("verb: " << args.front());
    REQUIRE(r.code == 0);
    const nlohmann::json doc = nlohmann::json::parse(r.out);
    CHECK(doc.at("schema") == 1);
  }
}

TEST_CASE("outputs are byte-identical across repeat runs and seeds") {
  const std::string fig1 = data_path("fig1.tri");
  const std::string one = data_path("one_tet.tri");
  const auto repeat_stable = [](const std::vector<std::string>& args) {
    const CliRun a = run_cli(args);
    const CliRun b = run_cli(args);
    REQUIRE(a.code == 0);
    REQUIRE(a.out == b.out);
    return a.out;
  };
  const std::string base_info = repeat_stable({"info", fig1, "--format", "json"});
  const std::string base_hom = repeat_stable({"homology", one, "--format", "json"});
  for (const std::string seed : {"1", "42", "987654321"}) {
    REQUIRE(run_cli({"info", fig1, "--format", "json", "--seed", seed}).out ==
            base_info);
    REQUIRE(run_cli({"homology", one, "--format", "json", "--seed", seed}).out ==
            base_hom);
  }
}

TEST_CASE("census flags") {
  const CliRun count = run_cli({"census", "1", "--count-only"});
  REQUIRE(count.code == 0);
  REQUIRE(count.out == "11\n");

  const CliRun listing = run_cli({"census", "1"});
  std::size_t lines = 0;
  for (const char c : listing.out) lines += c == '\n';
  REQUIRE(lines == 11);

  REQUIRE(run_cli({"census", "1", "--manifold", "--count-only"}).out == "5\n");
  REQUIRE(run_cli({"census", "1", "--min-valence", "6", "--count-only"}).out ==
          "2\n");
  REQUIRE(run_cli({"census", "2", "--count-only"}).out == "173\n");
  REQUIRE(run_cli({"census", "2", "--count-only", "--jobs", "4"}).out == "173\n");

  SECTION("worker count does not change the stream") {
    const CliRun one_job = run_cli({"census", "2"});
    const CliRun four_jobs = run_cli({"census", "2", "--jobs", "4"});
    REQUIRE(one_job.out == four_jobs.out);
  }

  SECTION("truncation is explicit") {
    const CliRun cut = run_cli({"census", "2", "--limit", "5"});
    REQUIRE(cut.code == 0);
    std::size_t cut_lines = 0;
    for (const char c : cut.out) cut_lines += c == '\n';
    REQUIRE(cut_lines == 5);
    REQUIRE(cut.err.find("truncated") != std::string::npos);
    const CliRun cut_json =
        run_cli({"census", "2", "--limit", "5", "--count-only", "--format", "json"});
    const nlohmann::json doc = nlohmann::json::parse(cut_json.out);
    REQUIRE(doc.at("truncated") == true);
    REQUIRE(doc.at("count") == 5);
  }

  SECTION("json records carry invariants and reversible signatures") {
    const CliRun r = run_cli({"census", "1", "--format", "json"});
    REQUIRE(r.code == 0);
    const nlohmann::json doc = nlohmann::json::parse(r.out);
    REQUIRE(doc.at("count") == 11);
    REQUIRE(doc.at("classes").size() == 11);
    const CensusResult census = enumerate_census(1);
    for (std::size_t i = 0; i < 11; ++i) {
      const nlohmann::json& rec = doc.at("classes").at(i);
      REQUIRE(rec.at("signature") == census.classes[i].signature);
      const Triangulation t =
          Triangulation::parse(rec.at("signature").get<std::string>());
      REQUIRE(t == census.classes[i].representative);
      REQUIRE(rec.at("h1_double").at("rank").get<std::size_t>() >= 2);
      REQUIRE(rec.at("valences").size() == rec.at("orientable").size());
      int total = 0;
      for (const auto& v : rec.at("valences")) total += v.get<int>();
      REQUIRE(total == 6);
      REQUIRE(rec.at("aut_order").get<std::size_t>() >= 1);
    }
  }

  SECTION("the out flag redirects the listing") {
    const CliRun direct = run_cli({"census", "1"});
    const TempFile target("census_out");
    const CliRun redirected = run_cli({"census", "1", "--out", target.path()});
    REQUIRE(redirected.code == 0);
    REQUIRE(redirected.out.empty());
    REQUIRE(read_file(target.path()) == direct.out);
  }
}

TEST_CASE("flattened signatures reverse to the stored text") {
  const CliRun listing = run_cli({"census", "1"});
  const CensusResult census = enumerate_census(1);
  std::istringstream lines(listing.out);
  std::string line;
  std::size_t i = 0;
  while (std::getline(lines, line)) {
    std::string restored;
    std::size_t pos = 0;
    while (true) {
      const std::size_t cut = line.find(" ; ", pos);
      restored += line.substr(pos, cut == std::string::npos ? cut : cut - pos);
      restored += '\n';
      if (cut == std::string::npos) break;
      pos = cut + 3;
    }
    REQUIRE(restored == census.classes.at(i).signature);
    ++i;
  }
  REQUIRE(i == census.classes.size());
}

TEST_CASE("group-build writes the triangulation and the report") {
  const TempFile tri_out("realized");
  const TempFile report_out("report");
  const CliRun r = run_cli({"group-build", "trivial", "--format", "json",
                               "--out", tri_out.path(), "--report",
                               report_out.path()});
  REQUIRE(r.code == 0);
  REQUIRE(read_file(report_out.path()) == r.out);

  const nlohmann::json doc = nlohmann::json::parse(r.out);
  REQUIRE(doc.at("group_order") == 1);
  REQUIRE(doc.at("cover_size") == 60);
  REQUIRE(doc.at("aut_order") == 1);

  const Triangulation realized = Triangulation::parse(read_file(tri_out.path()));
  REQUIRE(realized.size() == 60);
  REQUIRE(tri3::automorphisms(realized).aut_order == 1);
}

TEST_CASE("group-build accepts a multiplication table file") {
  const TempFile table("z2_table", "group 2\n0 1\n1 0\n");
  const CliRun r = run_cli({"group-build", table.path(), "--format", "json"});
  REQUIRE(r.code == 0);
  const nlohmann::json doc = nlohmann::json::parse(r.out);
  REQUIRE(doc.at("group_order") == 2);
  REQUIRE(doc.at("spine_size") == 3);
  REQUIRE(doc.at("bubbled_size") == 15);
  REQUIRE(doc.at("curled_size") == 480);
  REQUIRE(doc.at("cover_size") == 960);
  REQUIRE(doc.at("aut_order") == 2);
  REQUIRE(r.out == run_cli({"group-build", "cyclic:2", "--format", "json"}).out);
}

TEST_CASE("golden outputs match the stored files") {
  // Structural guards so a silently shrunken manifest cannot pass.
  const auto& manifest = golden_manifest();
  REQUIRE(manifest.size() == 24);
  std::size_t n1_members = 0;
  for (const auto& cmd : manifest)
    n1_members += cmd.name.rfind("info_n1_", 0) == 0;
  REQUIRE(n1_members == 11);

  for (const auto& cmd : manifest) {
    DYNAMIC_SECTION(cmd.name) { golden_check(cmd.name, golden_run(cmd)); }
  }
}
