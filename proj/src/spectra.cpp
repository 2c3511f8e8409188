#include "qnl/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qnl/errors.hpp"

namespace qnl {

namespace {

bool finite(double x) { return std::isfinite(x); }
bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void check_omega(double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw DomainError("frequency must be finite and positive, got " + std::to_string(omega));
  }
}

double lerp(double a, double b, double t) { return a + t * (b - a); }
Complex lerp(Complex a, Complex b, double t) {
  return {lerp(a.real(), b.real(), t), lerp(a.imag(), b.imag(), t)};
}

}  // namespace

void PhysConstants::validate() const {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw DomainError("hbar must be positive");
  if (!(k_B > 0.0) || !std::isfinite(k_B)) throw DomainError("k_B must be positive");
}

template <typename T>
LinearTable<T>::LinearTable(std::vector<double> omega, std::vector<T> values)
    : omega_(std::move(omega)), values_(std::move(values)) {
  if (omega_.size() < 2) throw DomainError("table needs at least two nodes");
  if (omega_.size() != values_.size()) throw DomainError("table grid and values differ in length");
  for (std::size_t i = 0; i < omega_.size(); ++i) {
    if (!(omega_[i] > 0.0) || !std::isfinite(omega_[i])) {
      throw DomainError("table frequencies must be finite and positive");
    }
    if (i > 0 && !(omega_[i] > omega_[i - 1])) {
      throw DomainError("table frequencies must be strictly increasing");
    }
    if (!finite(values_[i])) throw DomainError("table values must be finite");
  }
}

template <typename T>
T LinearTable<T>::at(double omega) const {
  check_omega(omega);
  if (omega < omega_.front() || omega > omega_.back()) {
    throw RangeError("frequency " + std::to_string(omega) + " outside table range [" +
                     std::to_string(omega_.front()) + ", " + std::to_string(omega_.back()) + "]");
  }
  auto it = std::lower_bound(omega_.begin(), omega_.end(), omega);
  auto i = static_cast<std::size_t>(it - omega_.begin());
  if (*it == omega) return values_[i];
  const double t = (omega - omega_[i - 1]) / (omega_[i] - omega_[i - 1]);
  return lerp(values_[i - 1], values_[i], t);
}

template class LinearTable<double>;
template class LinearTable<Complex>;

Susceptibility::Susceptibility(DampedOscillator m) : model_(m) {
  if (!(m.mass > 0.0) || !std::isfinite(m.mass)) throw DomainError("oscillator mass must be positive");
  if (!(m.omega0 >= 0.0) || !std::isfinite(m.omega0)) throw DomainError("eigenfrequency must be >= 0");
  if (!(m.gamma >= 0.0) || !std::isfinite(m.gamma)) throw DomainError("damping rate must be >= 0");
}

Susceptibility::Susceptibility(FreeMass m) : model_(m) {
  if (!(m.mass > 0.0) || !std::isfinite(m.mass)) throw DomainError("mass must be positive");
  if (!(m.gamma >= 0.0) || !std::isfinite(m.gamma)) throw DomainError("damping rate must be >= 0");
}

Susceptibility::Susceptibility(TabulatedResponse table) : model_(std::move(table)) {}

Complex Susceptibility::inverse(double omega) const {
  check_omega(omega);
  struct Visitor {
    double w;
    Complex operator()(const DampedOscillator& m) const {
      return {m.mass * (m.omega0 * m.omega0 - w * w), -m.mass * m.gamma * w};
    }
    Complex operator()(const FreeMass& m) const { return {-m.mass * w * w, -m.mass * m.gamma * w}; }
    Complex operator()(const TabulatedResponse& t) const { return t.at(w); }
  };
  return std::visit(Visitor{omega}, model_);
}

ThermalModel::ThermalModel(UniformTemperature t) : model_(t) {
  if (!(t.temperature >= 0.0) || !std::isfinite(t.temperature)) {
    throw DomainError("temperature must be finite and >= 0");
  }
}

ThermalModel::ThermalModel(EffectiveTemperature t) : model_(std::move(t)) {
  const auto& table = std::get<EffectiveTemperature>(model_);
  for (double v : table.values()) {
    if (!(v >= 0.0)) throw DomainError("effective temperature must be >= 0");
  }
}

double ThermalModel::temperature(double omega) const {
  struct Visitor {
    double w;
    double operator()(const ZeroTemperature&) const { return 0.0; }
    double operator()(const UniformTemperature& t) const { return t.temperature; }
    double operator()(const EffectiveTemperature& t) const { return t.at(w); }
  };
  return std::visit(Visitor{omega}, model_);
}

Complex eval_inv_susceptibility(const Susceptibility& model, double omega) {
  return model.inverse(omega);
}

double sql(const Susceptibility& model, double hbar, double omega) {
  return hbar * std::abs(model.inverse(omega));
}

double dql(const Susceptibility& model, double hbar, double omega) {
  return hbar * std::abs(model.inverse(omega).imag());
}

double fdt_psd(Complex chi_inv, double temperature, const PhysConstants& consts, double omega) {
  check_omega(omega);
  if (!(temperature >= 0.0)) throw DomainError("temperature must be >= 0");
  const double floor = consts.hbar * std::abs(chi_inv.imag());
  if (temperature == 0.0) return floor;
  const double x = consts.hbar * omega / (2.0 * consts.k_B * temperature);
  return floor / std::tanh(x);
}

double fdt_psd(const Susceptibility& model, const ThermalModel& thermal,
               const PhysConstants& consts, double omega) {
  return fdt_psd(model.inverse(omega), thermal.temperature(omega), consts, omega);
}

}  // namespace qnl
