#include "forge/physics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace forge::physics {

namespace {

void require(bool ok, const std::string& field) {
  if (!ok) {
    throw std::invalid_argument("MaterialParams: invalid " + field);
  }
}

}  // namespace

void MaterialParams::validate() const {
  require(specific_heat > 0, "specific_heat");
  require(emissivity >= 0 && emissivity <= 1, "emissivity");
  require(k_above > 0 && k_above <= 1, "k_above");
  require(k_below > 0 && k_below <= 1, "k_below");
  require(k_above <= k_below, "k_above > k_below");
  require(bar_mass > 0, "bar_mass");
  require(bar_diameter > 0, "bar_diameter");
}

double transfer_efficiency(double temp, const MaterialParams& mat) {
  return temp < mat.curie_temp ? mat.k_below : mat.k_above;
}

double convective_loss(double temp, const Environment& env, double diameter,
                       double length) {
  const double dt = temp - env.ambient_temp;
  if (dt <= 0) return 0.0;
  return std::numbers::pi * diameter * length * env.conv_coeff *
         std::pow(dt, env.conv_exponent);
}

double radiative_loss(double temp, const Environment& env,
                      const MaterialParams& mat, double diameter,
                      double length) {
  if (temp <= env.ambient_temp) return 0.0;
  const double ts = temp + 273.0;  // the model uses 273, not 273.15
  const double ta = env.ambient_temp + 273.0;
  const double flux = env.stefan_boltzmann * mat.emissivity *
                      (ts * ts * ts * ts - ta * ta * ta * ta);
  return std::numbers::pi * diameter * length * flux;
}

Segment step_segment(Segment seg, double coil_power_share,
                     const MaterialParams& mat, const Environment& env,
                     double dt) {
  const double absorbed =
      transfer_efficiency(seg.temperature, mat) * coil_power_share;
  const double p_tot =
      absorbed -
      convective_loss(seg.temperature, env, mat.bar_diameter, seg.length) -
      radiative_loss(seg.temperature, env, mat, mat.bar_diameter, seg.length);
  seg.temperature += p_tot * dt / (seg.mass * mat.specific_heat);
  if (seg.temperature < env.ambient_temp) seg.temperature = env.ambient_temp;
  return seg;
}

}  // namespace forge::physics
