#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ntk/error.hpp"
#include "ntk/io.hpp"

using namespace ntk;

TEST_CASE("format_double round-trips") {
  for (double x : {0.1, 1.0 / 3, -2.5e-300, 6.02214076e23, 1.0, 0.0}) CHECK(std::stod(format_double(x)) == x);
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("kernel spec JSON round trip") {
  for (const KernelSpec& s : {KernelSpec(FcNtkSpec{7}), KernelSpec(ResNtkSpec{9, 0.3, 1.0, std::nullopt}),
                              KernelSpec(ResNtkSpec::make(16, AlphaRule::power(0.75))), KernelSpec(LaplaceSpec{2.0, false}),
                              KernelSpec(LaplaceSpec{0.5, true})}) {
    const auto j = to_json(s);
    const auto back = kernel_spec_from_json(Json::parse(j.dump()));
    CHECK(to_json(back) == j);
    CHECK(Kernel(back).sphere(0.3) == Kernel(s).sphere(0.3));
  }
  CHECK_THROWS_AS(kernel_spec_from_json(Json{{"family", "fcntk"}}), ParseError);
  CHECK_THROWS_AS(kernel_spec_from_json(Json{{"family", "cnn"}}), InvalidArgument);
}

TEST_CASE("spectrum CSV round trip") {
  const auto s = spectrum(Kernel(ResNtkSpec{5, 1.0, 0.0, std::nullopt}), {3, 12, 256, QuadRule::angular});
  std::stringstream ss;
  write_spectrum_csv(ss, s);
  const std::string text = ss.str();
  CHECK(text.rfind("# {", 0) == 0);
  CHECK(text.find("\nk,lambda,multiplicity\n") != std::string::npos);
  const auto back = read_spectrum_csv(ss);
  CHECK(back.lambda == s.lambda);
  CHECK(back.multiplicity == s.multiplicity);
  CHECK(back.dim == 3);
  CHECK(back.quad_order == 256);
  REQUIRE(back.kernel.has_value());
  CHECK(to_json(*back.kernel) == to_json(*s.kernel));

  std::stringstream bad("k,lambda,multiplicity\n0,1,1\n");
  CHECK_THROWS_AS(read_spectrum_csv(bad), ParseError);
}

TEST_CASE("accuracy table CSV") {
  std::vector<AccuracyRow> rows(2);
  rows[0].depth = 5;
  rows[0].alpha = 0.2;
  rows[0].ridge = 1e-3;
  rows[0].train_acc = 1.0;
  rows[0].test_acc = 0.75;
  rows[0].ok = true;
  rows[1].depth = 9;
  rows[1].ridge = 0.0;
  rows[1].message = "singular";
  std::ostringstream os;
  write_accuracy_csv(os, rows);
  CHECK(os.str() == "depth,alpha,ridge,train_acc,test_acc,status\n5,0.20000000000000001,0.001,1,0.75,ok\n9,,0,,,failed\n");
}

TEST_CASE("report JSON") {
  EdgeExpansion e;
  e.c_half = -0.5;
  e.t_grid = {1e-6, 1e-5};
  const auto j = to_json(e);
  CHECK(j["c_half"] == -0.5);
  CHECK(j["nu"] == 0.5);
  CHECK(j["t_grid"].size() == 2);
  ConvergenceReport r;
  r.depths = {1, 2};
  r.alphas = {1.0, 0.5};
  r.sup_dev = {0.0, 0.1};
  std::ostringstream os;
  write_convergence_csv(os, r);
  CHECK(os.str() == "L,alpha,sup_dev\n1,1,0\n2,0.5,0.10000000000000001\n");
  CHECK(to_json(r)["depths"] == Json::array({1, 2}));
}
