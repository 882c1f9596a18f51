#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "tpca/io.hpp"

using namespace tpca;

namespace {

struct TempDir {
  std::filesystem::path dir;
  TempDir() {
    dir = std::filesystem::temp_directory_path() /
          ("tpca_test_" + std::to_string(::getpid() + rand()));
    std::filesystem::create_directories(dir);
  }
  ~TempDir() { std::filesystem::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("tensor round-trip is bit exact") {
  TempDir tmp;
  auto inst = gen_spiked(6, 3, 1.5, NoiseKind::iid_gaussian, 3);
  write_tensor(tmp.path("t.tpca"), inst.tensor);
  auto back = read_tensor(tmp.path("t.tpca"));
  CHECK(back.order == 3);
  CHECK(back.dim == 6);
  CHECK(back.entries == inst.tensor.entries);
}

TEST_CASE("instance round-trip preserves metadata") {
  TempDir tmp;
  auto inst = gen_spiked(5, 3, 2.25, NoiseKind::symmetric_gaussian, 17);
  write_instance(tmp.path("i.tpca"), inst);
  auto back = read_instance(tmp.path("i.tpca"));
  CHECK(back.tau == inst.tau);
  CHECK(back.seed == inst.seed);
  CHECK(back.noise_kind == NoiseKind::symmetric_gaussian);
  CHECK((back.v0 - inst.v0).norm() == 0.0);
  CHECK(back.tensor.entries == inst.tensor.entries);
}

TEST_CASE("matrix files use the k=2 header semantics") {
  TempDir tmp;
  Rng rng(5, 0);
  MatrixXd m = rng.gaussian_matrix(7, 7);
  write_matrix(tmp.path("m.tpca"), m);
  auto back = read_matrix(tmp.path("m.tpca"));
  CHECK((back - m).norm() == 0.0);
  // a matrix file is not a valid order-3 tensor of the same size
  CHECK_THROWS(read_tensor(tmp.path("missing.tpca")));
}

TEST_CASE("corrupt magic is rejected") {
  TempDir tmp;
  std::ofstream f(tmp.path("bad.tpca"), std::ios::binary);
  f << "NOTMAGIC--------";
  f.close();
  CHECK_THROWS(read_tensor(tmp.path("bad.tpca")));
}

TEST_CASE("CSV schema is fixed and formatting is deterministic") {
  CHECK(csv_header() ==
        "algo,n,k,tau,seed,stream,correlation,corr_sq,matvecs,time_ms,verdict,lambda_cert");
  ResultRow r;
  r.algo = "unfold";
  r.n = 100;
  r.k = 3;
  r.tau = 94.868329805051381;
  r.seed = 42;
  r.stream = 7;
  r.correlation = -0.125;
  r.corr_sq = 0.015625;
  r.matvecs = 64;
  r.time_ms = 1.5;
  r.verdict = "";
  r.lambda_cert = 0.0;
  std::string line1 = csv_line(r);
  std::string line2 = csv_line(r);
  CHECK(line1 == line2);
  CHECK(line1.substr(0, 13) == "unfold,100,3,");
}

TEST_CASE("SVG plot writes a self-contained file") {
  TempDir tmp;
  PlotSeries s;
  s.label = "series";
  s.y = {1.0, 2.0, 4.0};
  s.yerr = {0.1, 0.2, 0.4};
  write_svg_plot(tmp.path("p.svg"), "title", "x", "y", {1, 2, 3}, {s}, false);
  std::ifstream in(tmp.path("p.svg"));
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(all.find("<svg") == 0);
  CHECK(all.find("polyline") != std::string::npos);
  CHECK(all.find("</svg>") != std::string::npos);
}
