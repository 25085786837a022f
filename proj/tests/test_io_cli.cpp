#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "hsvar/cli.hpp"
#include "hsvar/errors.hpp"
#include "hsvar/io.hpp"
#include "hsvar/simulate.hpp"

using namespace hsvar;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("hsvar_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

void write_config(const TempDir& d, int burn, int keep, const std::string& extra = "") {
  io::write_text(d / "cfg.json",
                 R"({"data":{"path":"data.csv"},"model":{"p":1,"stationary":true},)"
                 R"("gibbs":{"n_burn":)" + std::to_string(burn) + R"(,"n_keep":)" +
                     std::to_string(keep) + extra + R"(},"outputs":{"dir":"out"}})");
}

}  // namespace

TEST_CASE("CSV reader follows RFC 4180 quoting") {
  const auto t = io::parse_csv("a,\"b,c\",d\r\n1,\"say \"\"hi\"\"\",\n2,\"multi\nline\",x\n");
  REQUIRE(t.header.size() == 3);
  CHECK(t.header[1] == "b,c");
  CHECK(t.rows[0][1] == "say \"hi\"");
  CHECK(t.rows[0][2].empty());
  CHECK(t.rows[1][1] == "multi\nline");
  CHECK(io::csv_field("x,y") == "\"x,y\"");
  CHECK(io::csv_field("q\"") == "\"q\"\"\"");
  CHECK_THROWS_AS(io::parse_csv("a,b\n1\n"), InputError);
  CHECK_THROWS_AS(io::parse_csv("a\n\"open\n"), InputError);
}

TEST_CASE("data loading reports the offending cell") {
  TempDir d("data");
  io::write_text(d / "x.csv", "y1,y2,trend\n1,2,1\n3,abc,2\n");
  try {
    io::load_data(d / "x.csv", {}, {"trend"}, true);
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("row 2, column 'y2'") != std::string::npos);
  }
  io::write_text(d / "x.csv", "y1,y2,trend\n1,2,1\n3,4,2\n");
  const TimeSeriesData t = io::load_data(d / "x.csv", {}, {"trend"}, true);
  CHECK(t.names == std::vector<std::string>{"y1", "y2"});
  CHECK(t.deterministic_names == std::vector<std::string>{"trend", "const"});
  CHECK(t.D(1, 0) == 2.0);
  CHECK(t.D(1, 1) == 1.0);
}

TEST_CASE("config parsing names missing keys and fills defaults") {
  using io::json;
  auto doc = json::parse(R"({"data":{"path":"d.csv"},"model":{"p":2},"gibbs":{"n_burn":1,"n_keep":2}})");
  const io::RunConfig rc = io::parse_config(doc, "/base");
  CHECK(rc.data_path == fs::path("/base/d.csv"));
  CHECK(rc.priors.S_omega == 0.05);
  CHECK(rc.priors.A_omega == 1.0);
  CHECK(rc.priors.nu_0 == 10.0);
  CHECK(rc.chains == 1);
  for (const char* key : {"data.path", "model.p", "gibbs.n_burn", "gibbs.n_keep"}) {
    json broken = doc;
    const std::string k = key;
    const auto dot = k.find('.');
    broken[k.substr(0, dot)].erase(k.substr(dot + 1));
    try {
      io::parse_config(broken, "/");
      FAIL("expected an error");
    } catch (const InputError& e) {
      CHECK(std::string(e.what()) == "missing config key: " + k);
    }
  }
  doc["priors"] = {{"S_omgea", 1.0}};
  CHECK_THROWS_AS(io::parse_config(doc, "/"), InputError);
}

TEST_CASE("digest is SHA-256") {
  CHECK(io::sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("simulate is byte-reproducible and refuses explosive specs") {
  TempDir d("sim");
  REQUIRE(invoke({"simulate", "--out", d / "a.csv", "--seed", "5"}).code == 0);
  REQUIRE(invoke({"simulate", "--out", d / "b.csv", "--seed", "5"}).code == 0);
  CHECK(io::read_text(d / "a.csv") == io::read_text(d / "b.csv"));
  CHECK(io::read_text(d / "a.truth.json") == io::read_text(d / "b.truth.json"));
  const auto t = io::read_csv(d / "a.csv");
  CHECK(t.header == std::vector<std::string>{"y1", "y2", "const"});
  CHECK(t.rows.size() == 301);
  io::write_text(d / "spec.json",
                 R"({"B0":[[1,0],[0,1]],"A":[[1.1,0,0],[0,0.5,0]],"omega":[0.5,0],"rho":[0.5,0.5],"T":50})");
  const Run bad = invoke({"simulate", "--spec", d / "spec.json", "--out", d / "c.csv"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("spectral radius 1.1") != std::string::npos);
  CHECK(invoke({"simulate", "--spec", d / "spec.json", "--out", d / "c.csv", "--allow-unstable"}).code == 0);
}

TEST_CASE("estimate, artifact round trip, verify, irf and normalize") {
  TempDir d("est");
  REQUIRE(invoke({"simulate", "--out", d / "data.csv", "--T", "150"}).code == 0);
  write_config(d, 100, 200);
  const Run est = invoke({"estimate", "--config", d / "cfg.json", "--chains", "4", "--seed", "7",
                       "--store-h"});
  REQUIRE(est.code == 0);
  for (int k = 0; k < 4; ++k) {
    const auto m = io::json::parse(io::read_text(d / ("out/manifest_chain" + std::to_string(k) + ".json")));
    CHECK(m["seed"].get<int>() == 7 + k);
    CHECK(m["chains"].get<int>() == 4);
    CHECK(m["config_sha256"].get<std::string>() == io::sha256_hex(m["config"].get<std::string>()));
  }
  const std::string art = d / "out/posterior_chain0.hsv";
  const io::Artifact a = io::read_artifact(art);
  CHECK(a.header.n_draws == 200);
  CHECK(a.header.T == 150);
  CHECK(a.header.K == 3);
  CHECK(a.sample.draws[0].sv[0].h.size() == 150);
  io::write_artifact(d / "copy.hsv", a);
  CHECK(io::read_text(art) == io::read_text(d / "copy.hsv"));

  const Run ver = invoke({"verify", "--artifact", art});
  REQUIRE(ver.code == 0);
  const auto table = io::parse_csv(ver.out);
  CHECK(table.header == std::vector<std::string>{"equation", "log_sddr", "nse", "category"});
  CHECK(table.rows.size() == 2);

  const Run irf = invoke({"irf", "--artifact", art, "--horizon", "0"});
  REQUIRE(irf.code == 0);
  const auto it = io::parse_csv(irf.out);
  CHECK(it.rows.size() == 4);
  for (const auto& r : it.rows) CHECK(r[0] == "0");

  REQUIRE(invoke({"normalize", "--artifact", art, "--out", d / "n1.hsv", "--from-mode"}).code == 0);
  REQUIRE(invoke({"normalize", "--artifact", d / "n1.hsv", "--out", d / "n2.hsv", "--from-mode"}).code == 0);
  CHECK(io::read_text(d / "n1.hsv") == io::read_text(d / "n2.hsv"));
  CHECK(io::read_text(d / "n1.moments.csv") == io::read_text(d / "n2.moments.csv"));
  CHECK(invoke({"normalize", "--artifact", art, "--out", d / "n3.hsv"}).code == 1);

  const Run vol = invoke({"volatility", "--artifact", art});
  CHECK(vol.code == 0);
  CHECK(io::parse_csv(vol.out).rows.size() == 151 * 2);
}

TEST_CASE("configuration errors surface with the key path") {
  TempDir d("cfg");
  io::write_text(d / "cfg.json", R"({"data":{"path":"x.csv"},"model":{"p":1},"gibbs":{"n_burn":1}})");
  const Run r = invoke({"estimate", "--config", d / "cfg.json"});
  CHECK(r.code == 1);
  CHECK(r.err.find("missing config key: gibbs.n_keep") != std::string::npos);
  CHECK(invoke({"estimate"}).code == 2);
  CHECK(invoke({}).code == 2);
}

TEST_CASE("verification is infeasible when the prior ordinate is unbounded") {
  TempDir d("inf");
  REQUIRE(invoke({"simulate", "--out", d / "data.csv", "--T", "60"}).code == 0);
  io::write_text(d / "cfg.json",
                 R"({"data":{"path":"data.csv"},"model":{"p":1},"priors":{"A_omega":0.5},)"
                 R"("gibbs":{"n_burn":5,"n_keep":20},"outputs":{"dir":"out"}})");
  REQUIRE(invoke({"estimate", "--config", d / "cfg.json"}).code == 0);
  const Run v = invoke({"verify", "--artifact", d / "out/posterior_chain0.hsv"});
  CHECK(v.code == 3);
}

TEST_CASE("identification report for a hand instance") {
  TempDir d("ident");
  // B = [[1, 1], [0, 1]], Lambda_1 = diag(2, 1).
  io::write_text(d / "in.json", R"({"sigmas":[[[2,1],[1,1]],[[3,1],[1,1]]],"lambdas":[[1,2],[1,1]]})");
  const Run r = invoke({"check-identification", "--input", d / "in.json"});
  CHECK(r.code == 0);
  CHECK(r.out == "column 1: identified\ncolumn 2: identified\n");
  io::write_text(d / "in2.json",
                 R"({"sigmas":[[[1,0,0],[0,1,0],[0,0,1]],[[2,0,0],[0,2,0],[0,0,1]]]})");
  const Run r2 = invoke({"check-identification", "--input", d / "in2.json"});
  CHECK(r2.out.find("not identified") != std::string::npos);
  CHECK(r2.out.find("column 3") != std::string::npos);
}

TEST_CASE("installed binary exit codes") {
  const std::string bin = HSVAR_CLI_PATH;
  CHECK(std::system((bin + " --help > /dev/null").c_str()) == 0);
  CHECK(WEXITSTATUS(std::system((bin + " estimate > /dev/null 2>&1").c_str())) == 2);
}
