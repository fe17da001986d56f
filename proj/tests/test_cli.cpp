#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = EMBGUARD_CLI_PATH;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("embguard_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string operator/(const char* name) const { return (path / name).string(); }
};

int run(const std::string& args, const std::string& stderr_to = "") {
  std::string cmd = "\"" + kCli + "\" " + args + " >/dev/null";
  cmd += stderr_to.empty() ? " 2>/dev/null" : " 2>" + stderr_to;
  const int rc = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("help exits 0, parse errors exit 2") {
  CHECK(run("--help") == 0);
  CHECK(run("watermark --no-such-flag") == 2);
  CHECK(run("") == 2);  // missing subcommand
}

TEST_CASE("config and trigger errors map to their exit codes") {
  TempDir tmp;
  const std::string small =
      R"({"vocab_size":2000,"doc_count":300,"doc_len_range":[20,60],"zipf_exponent":1.05,)"
      R"("topic_count":16,"dim":64,"semantic_noise":0.05,"standard_rotation_angle":0.35,)"
      R"("standard_noise":0.02,"seed":7})";
  write_file(tmp / "small.json", small);
  REQUIRE(run("gen-data --config " + (tmp / "small.json") + " --out-dir " + (tmp / "data")) == 0);

  SUBCASE("invalid sim config names the offending field") {
    write_file(tmp / "bad.json", R"({"zipf_exponent":0.0})");
    CHECK(run("gen-data --config " + (tmp / "bad.json") + " --out-dir " + (tmp / "x"),
              tmp / "err.txt") == 2);
    CHECK(slurp(tmp / "err.txt").find("zipf_exponent") != std::string::npos);
  }

  SUBCASE("missing config file is an I/O error") {
    CHECK(run("gen-data --config " + (tmp / "nope.json") + " --out-dir " + (tmp / "x")) == 3);
  }

  SUBCASE("out-dir blocked by a regular file is an I/O error") {
    write_file(tmp / "blocker", "not a directory");
    CHECK(run("gen-data --out-dir " + (tmp / "blocker") + "/sub --config " +
              (tmp / "small.json")) == 3);
  }

  SUBCASE("empty trigger band cannot satisfy the request") {
    CHECK(run("watermark --corpus " + (tmp / "data") + "/corpus.jsonl --embeddings " +
              (tmp / "data") + "/semantic.emb --key-out " + (tmp / "key.json") +
              " --trigger-interval 0.4999,0.5 --n-triggers 20") == 4);
  }

  SUBCASE("R=10 with only 20 triggers is refused up front") {
    CHECK(run("watermark --corpus " + (tmp / "data") + "/corpus.jsonl --embeddings " +
              (tmp / "data") + "/semantic.emb --key-out " + (tmp / "key.json") +
              " --R 10 --n-triggers 20", tmp / "err.txt") == 2);
    CHECK(slurp(tmp / "err.txt").find("5*R") != std::string::npos);
  }

  SUBCASE("unknown clustering algorithm is a config error") {
    REQUIRE(run("watermark --corpus " + (tmp / "data") + "/corpus.jsonl --embeddings " +
                (tmp / "data") + "/semantic.emb --key-out " + (tmp / "key.json")) == 0);
    CHECK(run("attack-cse --provided " + (tmp / "provided.emb") + " --standard " +
              (tmp / "data") + "/standard.emb --algo dbscan --out " + (tmp / "c.emb") +
              " --report " + (tmp / "r.json")) == 2);
  }

  SUBCASE("lookup mode against a store without probe rows is an id error") {
    REQUIRE(run("watermark --corpus " + (tmp / "data") + "/corpus.jsonl --embeddings " +
                (tmp / "data") + "/semantic.emb --key-out " + (tmp / "key.json")) == 0);
    CHECK(run("verify --mode lookup --suspect " + (tmp / "data") + "/semantic.emb --corpus " +
              (tmp / "data") + "/corpus.jsonl --key " + (tmp / "key.json") + " --report " +
              (tmp / "v.json")) == 5);
  }

  SUBCASE("transform mode requires a query-model config") {
    REQUIRE(run("watermark --corpus " + (tmp / "data") + "/corpus.jsonl --embeddings " +
                (tmp / "data") + "/semantic.emb --key-out " + (tmp / "key.json")) == 0);
    CHECK(run("verify --mode transform --corpus " + (tmp / "data") + "/corpus.jsonl --key " +
              (tmp / "key.json") + " --report " + (tmp / "v.json")) == 2);
  }
}

TEST_CASE("full pipeline: verify fires on the provided store, not the cleansed one") {
  TempDir tmp;
  REQUIRE(run("gen-data --out-dir " + (tmp / "data")) == 0);
  REQUIRE(run("watermark --corpus " + (tmp / "data") + "/corpus.jsonl --embeddings " +
              (tmp / "data") + "/semantic.emb --key-out " + (tmp / "key.json") + " --out " +
              (tmp / "provided.emb")) == 0);

  CHECK(run("verify --suspect " + (tmp / "provided.emb") + " --corpus " + (tmp / "data") +
            "/corpus.jsonl --key " + (tmp / "key.json") + " --report " +
            (tmp / "pre.json")) == 0);

  REQUIRE(run("attack-cse --provided " + (tmp / "provided.emb") + " --standard " +
              (tmp / "data") + "/standard.emb --out " + (tmp / "cleansed.emb") + " --report " +
              (tmp / "suspicion.json") + " --basis-out " + (tmp / "basis.emb")) == 0);
  CHECK(run("verify --suspect " + (tmp / "cleansed.emb") + " --corpus " + (tmp / "data") +
            "/corpus.jsonl --key " + (tmp / "key.json") + " --report " +
            (tmp / "post.json")) == 10);

  // Transform mode: backdoor probes saturate the injection (lambda_tot = 1),
  // so even composing the service with the recovered elimination basis leaves
  // a detectable residual along the target; the margin must shrink, though.
  write_file(tmp / "simcfg.json", R"({"seed":7})");
  CHECK(run("verify --mode transform --sim " + (tmp / "simcfg.json") + " --corpus " +
            (tmp / "data") + "/corpus.jsonl --key " + (tmp / "key.json") + " --report " +
            (tmp / "t1.json")) == 0);
  CHECK(run("verify --mode transform --sim " + (tmp / "simcfg.json") + " --basis " +
            (tmp / "basis.emb") + " --corpus " + (tmp / "data") + "/corpus.jsonl --key " +
            (tmp / "key.json") + " --report " + (tmp / "t2.json")) == 0);
  const auto t1 = nlohmann::json::parse(slurp(tmp / "t1.json"));
  const auto t2 = nlohmann::json::parse(slurp(tmp / "t2.json"));
  CHECK(t1["combined"]["delta_cos"].get<double>() > 0.9);
  CHECK(t2["combined"]["delta_cos"].get<double>() <
        t1["combined"]["delta_cos"].get<double>() - 0.1);

  CHECK(run("hist --embeddings " + (tmp / "provided.emb") + " --key " + (tmp / "key.json") +
            " --corpus " + (tmp / "data") + "/corpus.jsonl --report " +
            (tmp / "suspicion.json") + " --out " + (tmp / "hist.csv")) == 0);
  const std::string hist = slurp(tmp / "hist.csv");
  CHECK(hist.rfind("watermark,bin_lo,bin_hi,watermarked,suspected,unsuspected\n", 0) == 0);
  CHECK(std::count(hist.begin(), hist.end(), '\n') == 51);  // header + 50 bins
}

TEST_CASE("sweep writes one CSV row per (seed, value)") {
  TempDir tmp;
  write_file(tmp / "scenario.json",
             R"({"sim":{"doc_count":200,"topic_count":16,"seed":3},)"
             R"("K":5,"probes_per_class":50})");
  REQUIRE(run("sweep --vary K=2,5 --scenario " + (tmp / "scenario.json") + " --seeds 3,4 --out " +
              (tmp / "sweep.csv")) == 0);
  const std::string csv = slurp(tmp / "sweep.csv");
  CHECK(csv.rfind("R,K,n,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);  // header + 2 seeds x 2 values
}
