#pragma once

// Probe-side physics: susceptibility models and the frequency-local noise
// floors (SQL, DQL, thermal force PSD).
//
// Inverse susceptibility convention, for Omega > 0:
//   chi^-1(Omega) = m (Omega0^2 - Omega^2) - i m Gamma Omega
// so Im chi^-1 <= 0 for a passive probe. Negative frequencies are never
// evaluated; they follow from chi^-1(-Omega) = conj(chi^-1(Omega)).

#include <complex>
#include <span>
#include <variant>
#include <vector>

namespace qnl {

using Complex = std::complex<double>;

struct PhysConstants {
  double hbar = 1.0;
  double k_B = 1.0;

  /// Throws DomainError unless both constants are finite and positive.
  void validate() const;
};

/// Piecewise-linear table on a strictly increasing frequency grid.
/// Complex samples are interpolated on real and imaginary parts separately.
/// Exact grid nodes return the stored sample unchanged.
template <typename T>
class LinearTable {
 public:
  LinearTable(std::vector<double> omega, std::vector<T> values);

  T at(double omega) const;

  std::span<const double> grid() const { return omega_; }
  std::span<const T> values() const { return values_; }
  double front() const { return omega_.front(); }
  double back() const { return omega_.back(); }

 private:
  std::vector<double> omega_;
  std::vector<T> values_;
};

extern template class LinearTable<double>;
extern template class LinearTable<Complex>;

struct DampedOscillator {
  double mass = 1.0;
  double omega0 = 1.0;
  double gamma = 0.0;
};

struct FreeMass {
  double mass = 1.0;
  double gamma = 0.0;
};

using TabulatedResponse = LinearTable<Complex>;

/// Probe susceptibility, stored through its inverse response.
class Susceptibility {
 public:
  using Model = std::variant<DampedOscillator, FreeMass, TabulatedResponse>;

  explicit Susceptibility(DampedOscillator m);
  explicit Susceptibility(FreeMass m);
  explicit Susceptibility(TabulatedResponse table);

  /// chi^-1(Omega). DomainError for Omega <= 0, RangeError outside a table.
  Complex inverse(double omega) const;

  const Model& model() const { return model_; }

 private:
  Model model_;
};

struct ZeroTemperature {};

struct UniformTemperature {
  double temperature = 0.0;
};

/// Non-equilibrium bath described by T_eff(Omega).
using EffectiveTemperature = LinearTable<double>;

class ThermalModel {
 public:
  using Model = std::variant<ZeroTemperature, UniformTemperature, EffectiveTemperature>;

  ThermalModel() = default;
  explicit ThermalModel(UniformTemperature t);
  explicit ThermalModel(EffectiveTemperature t);

  double temperature(double omega) const;
  const Model& model() const { return model_; }

 private:
  Model model_ = ZeroTemperature{};
};

Complex eval_inv_susceptibility(const Susceptibility& model, double omega);

/// hbar |chi^-1(Omega)|
double sql(const Susceptibility& model, double hbar, double omega);

/// hbar |Im chi^-1(Omega)|
double dql(const Susceptibility& model, double hbar, double omega);

/// Thermal force PSD hbar |Im chi^-1| coth(hbar Omega / 2 k_B T).
/// Zero temperature returns the dql value exactly.
double fdt_psd(const Susceptibility& model, const ThermalModel& thermal,
               const PhysConstants& consts, double omega);

/// Same formula on an already evaluated chi^-1.
double fdt_psd(Complex chi_inv, double temperature, const PhysConstants& consts,
               double omega);

}  // namespace qnl
