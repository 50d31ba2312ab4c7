#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "netdiff/errors.hpp"
#include "netdiff/metrics.hpp"
#include "netdiff/rng.hpp"

using namespace netdiff::eval;
using netdiff::numerics::Rng;
using netdiff::numerics::Tensor;

namespace {

// Textbook implementations kept deliberately separate from the library.

double oracle_quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  const double pos = q * static_cast<double>(n - 1);
  const auto k = static_cast<std::size_t>(std::floor(pos));
  if (k >= n - 1) return v[n - 1];
  return v[k] * (1.0 - (pos - std::floor(pos))) + v[k + 1] * (pos - std::floor(pos));
}

double oracle_pinball(const Ensemble& e, double q) {
  double total = 0.0;
  for (std::int64_t t = 0; t < e.t(); ++t) {
    std::vector<double> col;
    for (std::int64_t i = 0; i < e.m(); ++i) col.push_back(e.samples.at(i, t));
    const double pred = oracle_quantile(col, q);
    const double y = e.actual[static_cast<std::size_t>(t)];
    total += y >= pred ? q * (y - pred) : (1.0 - q) * (pred - y);
  }
  return total / static_cast<double>(e.t());
}

std::vector<double> oracle_crps(const Ensemble& e) {
  std::vector<double> out;
  for (std::int64_t t = 0; t < e.t(); ++t) {
    double to_obs = 0.0;
    for (std::int64_t i = 0; i < e.m(); ++i)
      to_obs += std::fabs(e.samples.at(i, t) - e.actual[static_cast<std::size_t>(t)]);
    double pairwise = 0.0;
    for (std::int64_t i = 0; i < e.m(); ++i)
      for (std::int64_t j = 0; j < e.m(); ++j)
        pairwise += std::fabs(e.samples.at(i, t) - e.samples.at(j, t));
    const double m = static_cast<double>(e.m());
    out.push_back(to_obs / m - pairwise / (2.0 * m * m));
  }
  return out;
}

double oracle_energy(const Ensemble& e) {
  const double m = static_cast<double>(e.m());
  auto norm_to = [&](std::int64_t i, const double* other, std::int64_t stride_row) {
    double s = 0.0;
    for (std::int64_t t = 0; t < e.t(); ++t) {
      const double d = e.samples.at(i, t) -
                       (stride_row < 0 ? other[t] : e.samples.at(stride_row, t));
      s += d * d;
    }
    return std::sqrt(s);
  };
  double first = 0.0;
  for (std::int64_t i = 0; i < e.m(); ++i) first += norm_to(i, e.actual.data(), -1);
  double second = 0.0;
  for (std::int64_t i = 0; i < e.m(); ++i)
    for (std::int64_t j = 0; j < e.m(); ++j) second += norm_to(i, nullptr, j);
  return first / m - second / (2.0 * m * m);
}

double oracle_variogram(const Ensemble& e, double gamma) {
  double total = 0.0;
  for (std::int64_t a = 0; a < e.t(); ++a)
    for (std::int64_t b = 0; b < e.t(); ++b) {
      if (b <= a) continue;
      const double obs =
          std::pow(std::fabs(e.actual[static_cast<std::size_t>(a)] -
                             e.actual[static_cast<std::size_t>(b)]),
                   gamma);
      double sim = 0.0;
      for (std::int64_t i = 0; i < e.m(); ++i)
        sim += std::pow(std::fabs(e.samples.at(i, a) - e.samples.at(i, b)), gamma);
      const double gap = obs - sim / static_cast<double>(e.m());
      total += gap * gap;
    }
  return total;
}

std::vector<double> oracle_mse(const Ensemble& e) {
  std::vector<double> out;
  for (std::int64_t t = 0; t < e.t(); ++t) {
    double s = 0.0;
    for (std::int64_t i = 0; i < e.m(); ++i) {
      const double d = e.samples.at(i, t) - e.actual[static_cast<std::size_t>(t)];
      s += d * d;
    }
    out.push_back(s / static_cast<double>(e.m()));
  }
  return out;
}

Ensemble random_ensemble(Rng& rng, std::int64_t m, std::int64_t t) {
  Ensemble e;
  e.samples = Tensor({m, t});
  const double scale = rng.uniform(0.2, 5.0);
  const double shift = rng.uniform(-3.0, 3.0);
  for (std::int64_t i = 0; i < e.samples.size(); ++i)
    e.samples[i] = shift + scale * rng.normal();
  for (std::int64_t k = 0; k < t; ++k) e.actual.push_back(shift + scale * rng.normal());
  return e;
}

bool close(double a, double b, double tol = 1e-10) {
  return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace

TEST_CASE("scores match brute-force references on random ensembles") {
  Rng rng(77, 1234);
  for (int rep = 0; rep < 200; ++rep) {
    const auto m = static_cast<std::int64_t>(rng.uniform_int(2, 12));
    const auto t = static_cast<std::int64_t>(rng.uniform_int(1, 10));
    const Ensemble e = random_ensemble(rng, m, t);

    for (double q : kReportQuantiles)
      CHECK(close(quantile_score(e, q), oracle_pinball(e, q)));

    const Tensor crps = crps_per_time(e);
    const std::vector<double> crps_ref = oracle_crps(e);
    REQUIRE(crps.size() == t);
    double mean_ref = 0.0;
    for (std::int64_t k = 0; k < t; ++k) {
      CHECK(close(crps[k], crps_ref[static_cast<std::size_t>(k)]));
      mean_ref += crps_ref[static_cast<std::size_t>(k)];
    }
    CHECK(close(crps_mean(e), mean_ref / static_cast<double>(t)));

    CHECK(close(energy_score(e), oracle_energy(e)));
    CHECK(close(variogram_score(e), oracle_variogram(e, 0.5)));
    CHECK(close(variogram_score(e, 1.0), oracle_variogram(e, 1.0)));

    const Tensor mse = mse_per_time(e);
    const std::vector<double> mse_ref = oracle_mse(e);
    for (std::int64_t k = 0; k < t; ++k)
      CHECK(close(mse[k], mse_ref[static_cast<std::size_t>(k)]));
  }
}

TEST_CASE("a perfect ensemble scores zero everywhere") {
  Rng rng(78, 1);
  // member counts that are not powers of two exercise the inexact-mean path
  for (std::int64_t m : {1, 3, 4, 5, 7}) {
    Ensemble e;
    e.samples = Tensor({m, 6});
    for (std::int64_t t = 0; t < 6; ++t) {
      const double v = rng.uniform(-2, 2);
      e.actual.push_back(v);
      for (std::int64_t i = 0; i < m; ++i) e.samples.at(i, t) = v;
    }
    for (double q : kReportQuantiles) CHECK(quantile_score(e, q) == 0.0);
    CHECK(crps_mean(e) == 0.0);
    if (m > 1) CHECK(energy_score(e) == 0.0);
    CHECK(variogram_score(e) == 0.0);
    const Tensor mse = mse_per_time(e);
    for (std::int64_t t = 0; t < 6; ++t) CHECK(mse[t] == 0.0);
    const PooledErrors p = mae_rmse({e});
    CHECK(p.mae == 0.0);
    CHECK(p.rmse == 0.0);
  }
}

TEST_CASE("one-member ensembles reduce the crps to the absolute error") {
  Rng rng(79, 2);
  for (int rep = 0; rep < 50; ++rep) {
    const Ensemble e = random_ensemble(rng, 1, 5);
    const Tensor crps = crps_per_time(e);
    for (std::int64_t t = 0; t < 5; ++t) {
      const double err = std::fabs(e.samples.at(0, t) - e.actual[static_cast<std::size_t>(t)]);
      CHECK(close(crps[t], err));
    }
  }
}

TEST_CASE("duplicated members collapse the energy score to a plain distance") {
  Ensemble e;
  e.samples = Tensor({2, 3});
  const double row[3] = {1.0, -2.0, 0.5};
  for (int t = 0; t < 3; ++t) {
    e.samples.at(0, t) = row[t];
    e.samples.at(1, t) = row[t];
    e.actual.push_back(0.0);
  }
  const double expect = std::sqrt(1.0 + 4.0 + 0.25);
  CHECK(close(energy_score(e), expect));
  Rng rng(1, 1);
  CHECK_THROWS_AS(energy_score(random_ensemble(rng, 1, 3)), netdiff::ContractError);
}

TEST_CASE("empirical quantiles interpolate between order statistics") {
  const std::vector<double> v = {30, 10, 50, 20, 40};  // sorted internally
  CHECK(empirical_quantile(v, 0.25) == doctest::Approx(20.0).epsilon(1e-14));
  CHECK(empirical_quantile(v, 0.3) == doctest::Approx(22.0).epsilon(1e-14));
  CHECK(empirical_quantile(v, 0.5) == doctest::Approx(30.0).epsilon(1e-14));
  CHECK(empirical_quantile(v, 0.999) == doctest::Approx(49.96).epsilon(1e-12));
  CHECK(empirical_quantile({7.0}, 0.4) == 7.0);
  CHECK_THROWS_AS(empirical_quantile({}, 0.5), netdiff::ContractError);
  CHECK_THROWS_AS(empirical_quantile({1.0}, 0.0), netdiff::ContractError);
  CHECK_THROWS_AS(empirical_quantile({1.0}, 1.0), netdiff::ContractError);
}

TEST_CASE("scores are invariant under a joint shift of samples and actuals") {
  Rng rng(80, 3);
  Ensemble e = random_ensemble(rng, 6, 8);
  Ensemble shifted = e;
  const double c = 17.25;
  for (std::int64_t i = 0; i < shifted.samples.size(); ++i) shifted.samples[i] += c;
  for (double& v : shifted.actual) v += c;

  for (double q : {0.1, 0.5, 0.9})
    CHECK(close(quantile_score(e, q), quantile_score(shifted, q), 1e-9));
  CHECK(close(crps_mean(e), crps_mean(shifted), 1e-9));
  CHECK(close(energy_score(e), energy_score(shifted), 1e-9));
  CHECK(close(variogram_score(e), variogram_score(shifted), 1e-9));
  const PooledErrors pa = mae_rmse({e});
  const PooledErrors pb = mae_rmse({shifted});
  CHECK(close(pa.mae, pb.mae, 1e-9));
  CHECK(close(pa.rmse, pb.rmse, 1e-9));
}

TEST_CASE("pooled errors keep rmse at or above mae") {
  Rng rng(81, 4);
  std::vector<Ensemble> ens;
  for (int k = 0; k < 10; ++k) ens.push_back(random_ensemble(rng, 5, 6));
  const PooledErrors p = mae_rmse(ens);
  CHECK(p.rmse >= p.mae);
  CHECK(p.mae > 0.0);

  // hand check on a two-point ensemble
  Ensemble tiny;
  tiny.samples = Tensor({1, 2});
  tiny.samples.at(0, 0) = 3.0;
  tiny.samples.at(0, 1) = -1.0;
  tiny.actual = {0.0, 0.0};
  const PooledErrors q = mae_rmse({tiny});
  CHECK(q.mae == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(q.rmse == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
}

TEST_CASE("model rows aggregate the per-condition scores") {
  Rng rng(82, 5);
  std::vector<Ensemble> ens;
  for (int k = 0; k < 7; ++k) ens.push_back(random_ensemble(rng, 4, 5));
  const MetricRow row = evaluate_model("bdm", ens);
  CHECK(row.model == "bdm");

  double qs = 0.0;
  for (double q : kReportQuantiles) {
    double acc = 0.0;
    for (const Ensemble& e : ens) acc += oracle_pinball(e, q);
    qs += acc / 7.0;
  }
  CHECK(close(row.qs, qs / 9.0));

  double crps = 0.0, es = 0.0, vs = 0.0;
  for (const Ensemble& e : ens) {
    const std::vector<double> per = oracle_crps(e);
    double m = 0.0;
    for (double v : per) m += v;
    crps += m / static_cast<double>(per.size());
    es += oracle_energy(e);
    vs += oracle_variogram(e, 0.5);
  }
  CHECK(close(row.crps, crps / 7.0));
  CHECK(close(row.es, es / 7.0));
  CHECK(close(row.vs, vs / 7.0));
  CHECK_THROWS_AS(evaluate_model("x", {}), netdiff::ContractError);
}

TEST_CASE("reports require identical conditions and keep model order") {
  Rng rng(83, 6);
  std::vector<Ensemble> a, b;
  for (int k = 0; k < 3; ++k) {
    a.push_back(random_ensemble(rng, 3, 4));
    Ensemble other = random_ensemble(rng, 5, 4);
    other.actual = a.back().actual;  // same conditions, different samples
    b.push_back(other);
  }
  const MetricReport rep = build_report({{"second", &b}, {"first", &a}});
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].model == "second");
  CHECK(rep.rows[1].model == "first");

  const std::string csv = rep.to_csv();
  CHECK(csv.rfind("model,mae,rmse,qs,crps,es,vs\n", 0) == 0);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  // numeric fields round-trip through the shortest representation
  const auto comma = line.find(',');
  const std::string first_field = line.substr(comma + 1, line.find(',', comma + 1) - comma - 1);
  CHECK(std::stod(first_field) == doctest::Approx(rep.rows[0].mae).epsilon(1e-15));

  const std::string text = rep.to_text();
  CHECK(text.find("model") != std::string::npos);
  CHECK(text.find("second") != std::string::npos);
  CHECK(text.find("first") != std::string::npos);

  // mismatched actuals are rejected
  std::vector<Ensemble> c = a;
  c[1].actual[2] += 0.5;
  CHECK_THROWS_AS(build_report({{"a", &a}, {"c", &c}}), netdiff::ContractError);
  std::vector<Ensemble> d(a.begin(), a.begin() + 2);
  CHECK_THROWS_AS(build_report({{"a", &a}, {"d", &d}}), netdiff::ContractError);
  CHECK_THROWS_AS(build_report({}), netdiff::ContractError);
}

TEST_CASE("plot companion files tabulate per-quantile and per-slot scores") {
  Rng rng(84, 7);
  std::vector<Ensemble> ens;
  for (int k = 0; k < 4; ++k) ens.push_back(random_ensemble(rng, 3, 5));
  const auto dir = std::filesystem::temp_directory_path();
  const std::string qs_path = (dir / "nd_test_qs.csv").string();
  const std::string crps_path = (dir / "nd_test_crps.csv").string();
  write_qs_csv(qs_path, {{"m1", &ens}});
  write_crps_csv(crps_path, {{"m1", &ens}});

  std::ifstream qf(qs_path);
  std::string line;
  std::getline(qf, line);
  CHECK(line == "model,q,qs");
  int qrows = 0;
  while (std::getline(qf, line)) {
    if (line.empty()) continue;
    ++qrows;
    if (qrows == 1) {
      // first row is q=0.1 for model m1
      double acc = 0.0;
      for (const Ensemble& e : ens) acc += oracle_pinball(e, 0.1);
      const auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
      CHECK(line.substr(0, c1) == "m1");
      CHECK(std::stod(line.substr(c1 + 1, c2 - c1 - 1)) == doctest::Approx(0.1));
      CHECK(close(std::stod(line.substr(c2 + 1)), acc / 4.0, 1e-12));
    }
  }
  CHECK(qrows == 9);

  std::ifstream cf(crps_path);
  std::getline(cf, line);
  CHECK(line == "model,slot,crps");
  int crows = 0;
  double slot0 = 0.0;
  while (std::getline(cf, line)) {
    if (line.empty()) continue;
    if (crows == 0) slot0 = std::stod(line.substr(line.rfind(',') + 1));
    ++crows;
  }
  CHECK(crows == 5);
  double acc = 0.0;
  for (const Ensemble& e : ens) acc += oracle_crps(e)[0];
  CHECK(close(slot0, acc / 4.0, 1e-12));
  std::filesystem::remove(qs_path);
  std::filesystem::remove(crps_path);
}

TEST_CASE("ensembles carrying bad values are rejected") {
  Ensemble e;
  e.samples = Tensor({2, 3});
  e.actual = {0.0, 0.0};  // wrong length
  CHECK_THROWS_AS(e.validate(), netdiff::ContractError);
  e.actual = {0.0, 0.0, 0.0};
  e.validate();
  e.samples.at(1, 1) = std::nan("");
  CHECK_THROWS_AS(e.validate(), netdiff::NumericError);
  e.samples.at(1, 1) = 0.0;
  e.actual[0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(e.validate(), netdiff::NumericError);
  Rng rng(2, 2);
  CHECK_THROWS_AS(variogram_score(random_ensemble(rng, 3, 3), 0.0),
                  netdiff::ContractError);
}
