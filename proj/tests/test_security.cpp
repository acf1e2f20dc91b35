#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hdqkd/security.hpp"

using namespace hdqkd;
using Catch::Approx;

TEST_CASE("mutual_info_general on reference tables") {
  // Perfectly correlated uniform d=7 joint distribution.
  std::vector<std::vector<double>> correlated(7, std::vector<double>(7, 0.0));
  for (int i = 0; i < 7; ++i) correlated[i][i] = 1.0 / 7;
  CHECK(mutual_info_general(correlated) == Approx(std::log2(7.0)).margin(1e-12));

  std::vector<std::vector<double>> product(7, std::vector<double>(7, 1.0 / 49));
  CHECK(mutual_info_general(product) == Approx(0.0).margin(1e-12));

  std::vector<std::vector<double>> bad(7, std::vector<double>(7, 1.0));
  CHECK_THROWS_AS(mutual_info_general(bad), std::invalid_argument);
}

TEST_CASE("uniform-error joint table reproduces the closed form") {
  const double f = 0.895;
  std::vector<std::vector<double>> joint(7, std::vector<double>(7, (1 - f) / (7 * 6)));
  for (int i = 0; i < 7; ++i) joint[i][i] = f / 7;
  CHECK(mutual_info_general(joint) == Approx(mutual_info_uniform(7, f)).margin(1e-9));
  CHECK(mutual_info_general(joint) == Approx(2.05).margin(0.005));
}

TEST_CASE("mutual_info_uniform reference values") {
  CHECK(mutual_info_uniform(7, 0.895) == Approx(2.05).margin(0.005));
  CHECK(mutual_info_uniform(7, 1.0) == Approx(std::log2(7.0)).margin(1e-12));
  CHECK(mutual_info_uniform(7, 1.0 / 7) == Approx(0.0).margin(1e-12));
  CHECK(mutual_info_uniform(7, 0.935) == Approx(2.29).margin(0.01));
  CHECK_THROWS_AS(mutual_info_uniform(7, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(mutual_info_uniform(7, 1.1), std::invalid_argument);
}

TEST_CASE("mutual_info_uniform is strictly increasing in F above 1/d") {
  for (int d : {2, 7, 15}) {
    double prev = -1.0;
    for (double f = 1.0 / d + 1e-6; f <= 1.0; f += 1e-3) {
      const double v = mutual_info_uniform(d, f);
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("eve_fidelity reference values") {
  CHECK(eve_fidelity(7, 0.895) == Approx(0.4325).margin(5e-4));  // commonly quoted as 0.43
  CHECK(eve_fidelity(7, 1.0) == Approx(1.0 / 7).margin(1e-12));
  CHECK(eve_fidelity(2, 0.5) == Approx(1.0).margin(1e-12));
  CHECK_THROWS_AS(eve_fidelity(7, 0.1), std::invalid_argument);
}

TEST_CASE("eve_info reference values and shared functional form") {
  CHECK(eve_info(7, 0.895) == Approx(0.35).margin(0.01));
  CHECK(eve_info(7, 1.0) == Approx(0.0).margin(1e-9));
  for (double f = 0.2; f <= 1.0; f += 0.05)
    CHECK(eve_info(7, f) == Approx(mutual_info_uniform(7, eve_fidelity(7, f))).margin(1e-15));
}

TEST_CASE("informations stay within [0, log2 d]") {
  for (int d : {2, 5, 7, 15}) {
    for (double f = 1.0 / d + 1e-6; f <= 1.0; f += 0.01) {
      const double ab = mutual_info_uniform(d, f);
      const double ae = eve_info(d, f);
      CHECK(ab >= -1e-12);
      CHECK(ab <= std::log2(double(d)) + 1e-12);
      CHECK(ae >= -1e-12);
      CHECK(ae <= std::log2(double(d)) + 1e-12);
    }
  }
}

TEST_CASE("sifted and net rates") {
  CHECK(sifted_rate(4000, 0.1, 0.031, 0.65) == Approx(4.03).margin(0.01));
  CHECK(sifted_rate(0, 0.1, 0.031, 0.65) == 0.0);
  CHECK(sifted_rate(1, 0.1, 0.031, 0.65) == Approx(1.0e-3).margin(1e-5));
  CHECK(net_rate(4.03, 2.05, 0.35) == Approx(6.8).margin(0.1));
  CHECK(net_rate(4.03, 0.35, 2.05) == 0.0);
  CHECK(net_rate(1, 1, 0) == 1.0);
}

TEST_CASE("pns_check") {
  DetectorModel det;
  const auto reference = pns_check(0.1, 0.031, 0.65, det.dark_click_prob());
  CHECK(reference.p_multi == Approx(4.68e-3).margin(1e-5));
  CHECK(reference.p_detection == Approx(2.0e-3).epsilon(0.10));
  CHECK_FALSE(reference.secure);

  const auto small_mu = pns_check(1e-4, 0.031, 0.65, 1e-6);
  CHECK(small_mu.secure);

  const auto lossless = pns_check(0.1, 1.0, 1.0, 0.0);
  CHECK(lossless.p_detection == Approx(0.1));
  CHECK(lossless.secure);
}

TEST_CASE("coherent bound is the I_AB = I_AE crossover") {
  for (int d : {2, 3, 5, 7, 11}) {
    const double qber = coherent_bound(d);
    const double f = 1.0 - qber;
    CHECK(std::abs(mutual_info_uniform(d, f) - eve_info(d, f)) < 1e-8);
  }
  // d=2 closed form: F* solves F = F_E(F), i.e. F = (2+sqrt(2))/4.
  CHECK(coherent_bound(2) == Approx(1.0 - (2.0 + std::sqrt(2.0)) / 4.0).margin(1e-8));
}

TEST_CASE("coherent bound matches a dense grid scan at d=2") {
  double best_f = 0.0, best_gap = 1e9;
  for (double f = 0.52; f < 1.0; f += 1e-6) {
    const double gap = std::abs(mutual_info_uniform(2, f) - eve_info(2, f));
    if (gap < best_gap) {
      best_gap = gap;
      best_f = f;
    }
  }
  CHECK(coherent_bound(2) == Approx(1.0 - best_f).margin(1e-6));
}

TEST_CASE("bound ordering and monotonicity") {
  CHECK(0.105 < coherent_bound(7));
  CHECK(coherent_bound(7) < intercept_resend_bound(7, 2));
  double prev = 0.0;
  for (int d : {2, 3, 5, 7, 11}) {
    const double b = coherent_bound(d);
    CHECK(b > prev);
    prev = b;
  }
  CHECK(intercept_resend_bound(2, 2) == Approx(0.25).margin(1e-15));
  CHECK(intercept_resend_bound(7, 2) == Approx(3.0 / 7).margin(1e-12));
  CHECK(intercept_resend_bound(100001, 2) == Approx(0.5).margin(1e-4));
  CHECK_THROWS_AS(intercept_resend_bound(7, 3), std::invalid_argument);
}

TEST_CASE("build_report aggregates the reference configuration") {
  const auto report = build_report(7, ErrorBudget{}, PulseConfig{}, default_link_budget(),
                                   DetectorModel{});
  CHECK(report.i_ab == Approx(2.05).margin(0.005));
  CHECK(report.eve_fid == Approx(0.43).margin(0.005));
  CHECK(report.i_ae == Approx(0.35).margin(0.01));
  CHECK(report.r_sift == Approx(4.0).margin(0.1));
  CHECK(report.r_net == Approx(6.8).margin(0.1));
  CHECK(report.secure_bits_per_photon == Approx(1.7).margin(0.02));
  CHECK_FALSE(report.pns.secure);
  CHECK(report.bound_ir == Approx(3.0 / 7));
  CHECK(!report.to_text().empty());
  CHECK(report.to_csv().find("pns_secure") != std::string::npos);
}

TEST_CASE("build_report on a perfect channel") {
  const auto report = build_report(7, ErrorBudget{0.0, 0.0}, PulseConfig{}, LinkBudget{{{"l", 1.0}}},
                                   DetectorModel{1.0, 0.0, 0.0, 0.0, 7, 0.0});
  CHECK(report.i_ab == Approx(std::log2(7.0)).margin(1e-9));
  CHECK(report.i_ae == Approx(0.0).margin(1e-9));
  CHECK(report.pns.secure);  // p_detection = mu beats the mu^2/2 tail
}

TEST_CASE("bounds csv sweep is monotone in the coherent column") {
  const std::string csv = bounds_csv(15);
  CHECK(csv.find("d,bound_ir,bound_coherent") == 0);
  CHECK(csv.find("\n2,") != std::string::npos);
  CHECK(csv.find("\n15,") != std::string::npos);
}
