#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "mixred/common.hpp"
#include "mixred/io.hpp"

using namespace mixred;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/mixred_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("fmt_g17: round trips doubles") {
  for (double v : {1.0 / 3.0, 1e-300, -2.5e17, 0.1}) {
    double back = std::stod(fmt_g17(v));
    CHECK(back == v);
  }
}

TEST_CASE("mixture json: round trip is exact") {
  Mixture m;
  m.dim = 2;
  m.coeffs = {0.25, -1.0 / 3.0};
  m.atoms.push_back(make_atom(Vec{0.1, -0.2}, Covariance::iso(2, 0.7)));
  m.atoms.push_back(
      make_atom(Vec{1.0, 2.0}, Covariance::full(2, Vec{1.2, 0.3, 0.3, 0.9})));
  TempFile f("mixture.json");
  save_mixture_json(m, f.path);
  Mixture back = load_mixture_json(f.path);
  REQUIRE(back.atoms.size() == 2);
  CHECK(back.dim == 2);
  for (std::size_t i = 0; i < 2; ++i) CHECK(back.coeffs[i] == m.coeffs[i]);
  CHECK(back.atoms[1].cov.kind == CovKind::Full);
  CHECK(back.atoms[1].cov.at(0, 1) == 0.3);
  CHECK(back.atoms[0].log_norm == m.atoms[0].log_norm);
}

TEST_CASE("expansion json: round trip is exact") {
  KernelExpansion e;
  e.d = 3;
  e.kind = ExpansionKind::Helmholtz;
  e.k = 1.5;
  e.h = 0.41;
  e.weights = {0.5, 1.0 / 7.0};
  e.exponents = {0.25, 4.0};
  e.delta = 1e-7;
  e.r_max = 100.0;
  e.eps = 1e-10;
  TempFile f("expansion.json");
  save_expansion_json(e, f.path);
  KernelExpansion back = load_expansion_json(f.path);
  CHECK(back.kind == ExpansionKind::Helmholtz);
  CHECK(back.k == e.k);
  CHECK(back.weights[1] == e.weights[1]);
  CHECK(back.exponents[0] == e.exponents[0]);
  CHECK(back.r_max == e.r_max);
}

TEST_CASE("points csv: round trip and validation") {
  std::vector<Vec> pts{Vec{1.0, 2.0}, Vec{-0.5, 1.0 / 3.0}};
  TempFile f("points.csv");
  save_points_csv(pts, f.path);
  std::vector<Vec> back = load_points_csv(f.path);
  REQUIRE(back.size() == 2);
  CHECK(back[1][1] == pts[1][1]);

  TempFile ragged("ragged.csv");
  {
    std::ofstream out(ragged.path);
    out << "1,2\n3\n";
  }
  CHECK_THROWS_AS(load_points_csv(ragged.path), Error);
  CHECK_THROWS_AS(load_points_csv("/tmp/mixred_does_not_exist.csv"), Error);
}

TEST_CASE("write_csv: verbatim cells") {
  TempFile f("table.csv");
  write_csv(f.path, {"a", "b"}, {{"1", "x"}, {"2", "y"}});
  std::ifstream in(f.path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "a,b");
  std::getline(in, line);
  CHECK(line == "1,x");
}
