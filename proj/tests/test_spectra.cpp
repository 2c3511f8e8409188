#include <cmath>
#include <limits>

#include "doctest.h"
#include "qnl/errors.hpp"
#include "qnl/spectra.hpp"
#include "support.hpp"

using namespace qnl;
using qnl::test::rel;

TEST_CASE("damped oscillator inverse response") {
  const Susceptibility osc(DampedOscillator{1.0, 1.0, 0.2});
  CHECK(osc.inverse(1.0) == Complex{0.0, -0.2});
  const Complex at2 = osc.inverse(2.0);
  CHECK(at2.real() == doctest::Approx(-3.0).epsilon(1e-15));
  CHECK(at2.imag() == doctest::Approx(-0.4).epsilon(1e-15));
  CHECK(eval_inv_susceptibility(osc, 2.0) == at2);
}

TEST_CASE("free mass inverse response") {
  const Susceptibility fm(FreeMass{2.0, 0.5});
  const Complex v = fm.inverse(3.0);
  CHECK(v.real() == doctest::Approx(-18.0));
  CHECK(v.imag() == doctest::Approx(-3.0));
}

TEST_CASE("non-positive frequency is rejected") {
  const Susceptibility osc(DampedOscillator{1.0, 1.0, 0.2});
  CHECK_THROWS_AS(osc.inverse(0.0), DomainError);
  CHECK_THROWS_AS(osc.inverse(-1.0), DomainError);
  CHECK_THROWS_AS(sql(osc, 1.0, 0.0), DomainError);
}

TEST_CASE("invalid model parameters") {
  CHECK_THROWS_AS(Susceptibility(DampedOscillator{0.0, 1.0, 0.1}), DomainError);
  CHECK_THROWS_AS(Susceptibility(DampedOscillator{1.0, 1.0, -0.1}), DomainError);
  CHECK_THROWS_AS(Susceptibility(FreeMass{-1.0, 0.0}), DomainError);
  PhysConstants bad;
  bad.hbar = 0.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("sql and dql") {
  const Susceptibility osc(DampedOscillator{1.0, 1.0, 0.2});
  CHECK(sql(osc, 1.0, 1.0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(dql(osc, 1.0, 1.0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(rel(sql(osc, 1.0, 2.0), std::sqrt(9.16)) < 1e-15);
  CHECK(rel(dql(osc, 1.0, 2.0), 0.4) < 1e-15);
  CHECK(rel(sql(osc, 2.5, 2.0), 2.5 * std::sqrt(9.16)) < 1e-15);
  const Susceptibility lossless(DampedOscillator{1.0, 1.0, 0.0});
  CHECK(dql(lossless, 1.0, 3.0) == 0.0);
  // The SQL dominates the DQL at every frequency.
  for (double w = 0.1; w < 5.0; w += 0.07) CHECK(sql(osc, 1.0, w) >= dql(osc, 1.0, w));
}

TEST_CASE("thermal force PSD") {
  const Susceptibility osc(DampedOscillator{1.0, 1.0, 0.2});
  const PhysConstants c;
  SUBCASE("zero temperature is the dql exactly") {
    const ThermalModel zero;
    for (double w : {0.3, 1.0, 2.0, 7.5}) CHECK(fdt_psd(osc, zero, c, w) == dql(osc, 1.0, w));
    CHECK(fdt_psd(osc.inverse(1.0), 0.0, c, 1.0) == dql(osc, 1.0, 1.0));
  }
  SUBCASE("finite temperature") {
    const ThermalModel warm(UniformTemperature{0.5});
    // 0.2 coth(1)
    CHECK(rel(fdt_psd(osc, warm, c, 1.0), 0.26260705709986624) < 1e-14);
  }
  SUBCASE("classical limit") {
    const double t = 1e4;
    const double w = 1.0;
    const double classical = 2.0 * c.k_B * t * 0.2 / w;
    CHECK(rel(fdt_psd(osc.inverse(w), t, c, w), classical) < 1e-8);
  }
  SUBCASE("deep quantum limit") {
    CHECK(fdt_psd(osc.inverse(1.0), 1e-3, c, 1.0) == doctest::Approx(0.2).epsilon(1e-15));
  }
  SUBCASE("negative temperature rejected") {
    CHECK_THROWS_AS(ThermalModel(UniformTemperature{-1.0}), DomainError);
    CHECK_THROWS_AS(fdt_psd(osc.inverse(1.0), -1.0, c, 1.0), DomainError);
  }
}

TEST_CASE("linear table") {
  const LinearTable<double> t({1.0, 2.0, 4.0}, {10.0, 20.0, 0.0});
  CHECK(t.at(1.0) == 10.0);
  CHECK(t.at(2.0) == 20.0);
  CHECK(t.at(4.0) == 0.0);
  CHECK(t.at(1.5) == doctest::Approx(15.0));
  CHECK(t.at(3.0) == doctest::Approx(10.0));
  CHECK_THROWS_AS(t.at(0.5), RangeError);
  CHECK_THROWS_AS(t.at(4.5), RangeError);
  CHECK_THROWS_AS(LinearTable<double>({1.0}, {1.0}), DomainError);
  CHECK_THROWS_AS(LinearTable<double>({1.0, 1.0}, {1.0, 2.0}), DomainError);
  CHECK_THROWS_AS(LinearTable<double>({2.0, 1.0}, {1.0, 2.0}), DomainError);
  CHECK_THROWS_AS(LinearTable<double>({1.0, 2.0}, {1.0}), DomainError);
}

TEST_CASE("tabulated response and effective temperature") {
  const Susceptibility tab(
      TabulatedResponse({1.0, 3.0}, {Complex{1.0, -1.0}, Complex{3.0, -3.0}}));
  const Complex mid = tab.inverse(2.0);
  CHECK(mid.real() == doctest::Approx(2.0));
  CHECK(mid.imag() == doctest::Approx(-2.0));
  CHECK_THROWS_AS(tab.inverse(3.5), RangeError);

  const ThermalModel th(EffectiveTemperature({1.0, 3.0}, {0.0, 2.0}));
  CHECK(th.temperature(1.0) == 0.0);
  CHECK(th.temperature(2.0) == doctest::Approx(1.0));
  const PhysConstants c;
  CHECK(fdt_psd(tab, th, c, 1.0) == 1.0);
}
