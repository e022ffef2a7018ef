#pragma once

#include <string>
#include <vector>

#include "pnet/sim/program.hpp"

namespace pnet::sim {

inline constexpr double kStabilityTolerance = 1e-12;

enum class Verdict : std::uint8_t { Stable, Marginal, Unstable };

std::string_view verdict_name(Verdict v);

/// Spectral radius of the companion matrix [[2 - k - z, z - 1], [1, 0]] of
/// x(n+1) = (2 - k - z) x(n) + (z - 1) x(n-1), with k = K/M and z = Z/M.
double companion_radius(double k_over_m, double z_over_m);

/// Stable when every root lies inside or on the unit circle without a
/// repeated root on it; Marginal for a repeated root on the circle (e.g. a
/// free mass); Unstable when the radius exceeds 1 + kStabilityTolerance.
Verdict classify(double k_over_m, double z_over_m);

struct StabilityEntry {
  ModuleId module;
  double mass = 1.0;
  double k_sum = 0.0;
  double z_sum = 0.0;
  double radius = 1.0;
  Verdict verdict = Verdict::Stable;
  // BUT/LNL contribute through a worst-case linearization.
  bool advisory = false;
};

struct StabilityReport {
  std::vector<StabilityEntry> entries;

  bool any_unstable() const;
  std::string to_text() const;
};

/// One entry per MAS/CEL: its own K/Z (CEL) plus the stiffness and damping of
/// every incident link. LNL tables enter with their extreme segment slopes,
/// and the combination with the largest radius is reported.
StabilityReport stability_check(const SimProgram& program);

}  // namespace pnet::sim
