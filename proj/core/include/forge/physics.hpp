#pragma once

// Segment-wise heating model for an induction-heated steel bar.
//
// A bar is a chain of 1D segments of equal length and uniform temperature.
// Per time step, each segment gains power from the coil covering it (scaled
// by an empirical coil-bar transfer efficiency that collapses at the Curie
// point) and loses power through free convection and radiation. There is no
// heat exchange between neighbouring segments.

namespace forge::physics {

struct MaterialParams {
  double specific_heat = 650.0;  // J/(kg*degC)
  double emissivity = 0.03;      // dimensionless, [0, 1]
  double curie_temp = 800.0;     // degC
  double k_below = 0.90;         // transfer efficiency below curie_temp
  double k_above = 0.20;         // transfer efficiency at/above curie_temp
  double bar_mass = 420.0;       // kg, whole bar
  double bar_diameter = 0.1;     // m

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct Segment {
  double temperature;  // degC
  double length;       // m
  double mass;         // kg
};

// Ambient conditions plus the fixed physical/empirical constants of the
// loss terms. The free-convection coefficient and exponent are engineering
// estimates; the exponent is configurable (literature quotes 1.3 and 1.33).
struct Environment {
  double ambient_temp = 20.0;                 // degC
  double stefan_boltzmann = 5.670374419e-8;   // W/(m^2*K^4)
  double conv_coeff = 1.86;
  double conv_exponent = 1.3;
};

// Two-valued step function in temperature: k_below under the Curie point,
// k_above at or above it.
double transfer_efficiency(double temp, const MaterialParams& mat);

// Free-convective power loss in W over the lateral surface pi*D*L.
// Zero when the segment is not hotter than ambient.
double convective_loss(double temp, const Environment& env, double diameter,
                       double length);

// Radiative power loss in W. The flux sigma*eps*((T_s+273)^4 - (T_a+273)^4)
// is multiplied by the lateral surface pi*D*L so both loss terms carry the
// same units. Zero when the segment is not hotter than ambient.
double radiative_loss(double temp, const Environment& env,
                      const MaterialParams& mat, double diameter,
                      double length);

// Explicit-Euler update of one segment over dt seconds. coil_power_share is
// the slice of coil power reaching this segment (0 when uncovered). The new
// temperature is floored at ambient.
Segment step_segment(Segment seg, double coil_power_share,
                     const MaterialParams& mat, const Environment& env,
                     double dt);

}  // namespace forge::physics
