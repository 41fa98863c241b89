#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "btwkb.h"

namespace {

const char* kQuadratic = R"({"family": {"name": "plane-quadratic", "a": 2.0, "b": 0.5}, "K": 6})";

}  // namespace

TEST_CASE("version and error strings are always available") {
  CHECK(btw_version() != nullptr);
  CHECK(btw_last_error() != nullptr);
}

TEST_CASE("expansion handle exposes the closed-form quadratic energy") {
  btw_wkb* w = nullptr;
  REQUIRE(btw_wkb_build(kQuadratic, &w) == BTW_OK);
  double l0 = 0.0;
  REQUIRE(btw_wkb_lambda(w, 0, &l0) == BTW_OK);
  double want = std::pow(std::sqrt(2.0) + std::sqrt(0.5), 2) / 4.0;
  CHECK(std::abs(l0 - want) < 1e-11);

  double lN = 0.0;
  REQUIRE(btw_wkb_lambda_at(w, 40.0, 6, &lN) == BTW_OK);
  CHECK(std::abs(lN - want / 40.0) < 1e-12);  // corrections vanish for quadratics

  double junk = 0.0;
  CHECK(btw_wkb_lambda(w, 99, &junk) == BTW_EINVAL);
  CHECK(btw_wkb_lambda_at(w, -1.0, 0, &junk) == BTW_EINVAL);

  char* rep = nullptr;
  REQUIRE(btw_wkb_report_json(w, &rep) == BTW_OK);
  auto j = nlohmann::json::parse(rep);
  CHECK(j["lambda"].size() == 7);
  CHECK(j["envelope"]["C"].get<double>() > 0.0);
  btw_free_string(rep);
  btw_wkb_free(w);
}

TEST_CASE("invalid input is rejected with status codes and messages") {
  btw_wkb* w = nullptr;
  CHECK(btw_wkb_build(nullptr, &w) == BTW_EINVAL);
  CHECK(btw_wkb_build("not json", &w) == BTW_EINVAL);
  CHECK(std::strlen(btw_last_error()) > 0);
  CHECK(btw_wkb_build(R"({"family": {"name": "no-such-family"}})", &w) == BTW_EINVAL);
  // flat symbol: the minimum is degenerate
  CHECK(btw_wkb_build(R"({"family": {"name": "plane-quadratic", "a": 0.0, "b": 0.0}})", &w) ==
        BTW_EMATH);
  CHECK(w == nullptr);
}

TEST_CASE("spectrum of the isotropic oscillator is harmonic") {
  double* eigs = nullptr;
  int len = 0;
  REQUIRE(btw_spectrum(R"({"family": {"name": "plane-isotropic"}})", 10, &eigs, &len) == BTW_OK);
  REQUIRE(len > 4);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(eigs[k] - (k + 1) / 10.0) < 1e-12);
  btw_free_doubles(eigs);
}

TEST_CASE("quasimode residual controls the eigenvalue error") {
  const char* cfg =
      R"({"family": {"name": "cp1-tilted-well", "alpha": 0.25, "beta": 0.35}, "K": 3, "kmax": 3})";
  double res = 0.0, lam = 0.0, bottom = 0.0;
  REQUIRE(btw_quasimode_residual(cfg, 40, &res, &lam, &bottom) == BTW_OK);
  CHECK(res > 0.0);
  CHECK(res < 1e-2);
  CHECK(std::abs(bottom - lam) <= res);
}

TEST_CASE("experiment driver writes artifacts and returns the report") {
  auto dir = std::filesystem::temp_directory_path() / "btwkb_capi_test";
  std::filesystem::remove_all(dir);
  const char* cfg = R"({
    "experiment": "count",
    "family": {"name": "cp1-poly-n3", "coeffs": [1.0, 0.3, -1.0, -0.3]},
    "N": [100, 200]
  })";
  char* rep = nullptr;
  REQUIRE(btw_experiment_run(cfg, dir.string().c_str(), &rep) == BTW_OK);
  auto j = nlohmann::json::parse(rep);
  for (const auto& row : j["rows"]) CHECK(row["count"].get<int>() == 1);
  CHECK(std::filesystem::exists(dir / "counts.csv"));
  CHECK(std::filesystem::exists(dir / "report.json"));
  btw_free_string(rep);
  std::filesystem::remove_all(dir);

  CHECK(btw_experiment_run(R"({"experiment": "no-such"})", dir.string().c_str(), nullptr) ==
        BTW_EINVAL);
}
