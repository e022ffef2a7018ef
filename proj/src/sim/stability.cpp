#include "pnet/sim/stability.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pnet::sim {

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Stable: return "stable";
    case Verdict::Marginal: return "marginal";
    case Verdict::Unstable: return "unstable";
  }
  return "?";
}

namespace {

struct Roots {
  double radius;
  bool repeated;
};

// lambda^2 - a lambda + (1 - z) = 0 with a = 2 - k - z.
Roots companion_roots(double k, double z) {
  const double a = 2.0 - k - z;
  const double c = 1.0 - z;
  const double disc = a * a - 4.0 * c;
  if (disc < 0.0) {
    return {std::sqrt(c), false};
  }
  const double s = std::sqrt(disc);
  // Stable form of the quadratic formula.
  const double q = a >= 0.0 ? 0.5 * (a + s) : 0.5 * (a - s);
  double r1 = std::fabs(q);
  double r2 = q != 0.0 ? std::fabs(c / q) : 0.0;
  return {std::max(r1, r2), disc <= kStabilityTolerance};
}

struct SlopeRange {
  double lo;
  double hi;
};

SlopeRange slope_range(const Table& t) {
  SlopeRange r{INFINITY, -INFINITY};
  for (std::size_t i = 1; i < t.x.size(); ++i) {
    double slope = (t.y[i] - t.y[i - 1]) / (t.x[i] - t.x[i - 1]);
    r.lo = std::min(r.lo, slope);
    r.hi = std::max(r.hi, slope);
  }
  return r;
}

}  // namespace

double companion_radius(double k_over_m, double z_over_m) {
  return companion_roots(k_over_m, z_over_m).radius;
}

Verdict classify(double k_over_m, double z_over_m) {
  Roots r = companion_roots(k_over_m, z_over_m);
  if (r.radius > 1.0 + kStabilityTolerance) return Verdict::Unstable;
  if (r.repeated && r.radius >= 1.0 - kStabilityTolerance) return Verdict::Marginal;
  return Verdict::Stable;
}

bool StabilityReport::any_unstable() const {
  return std::any_of(entries.begin(), entries.end(),
                     [](const StabilityEntry& e) { return e.verdict == Verdict::Unstable; });
}

std::string StabilityReport::to_text() const {
  std::ostringstream out;
  out.precision(12);
  for (const auto& e : entries) {
    out << "module " << to_string(e.module) << " K/M=" << e.k_sum / e.mass
        << " Z/M=" << e.z_sum / e.mass << " radius=" << e.radius << ' '
        << verdict_name(e.verdict) << (e.advisory ? " (advisory)" : "") << '\n';
  }
  return out.str();
}

StabilityReport stability_check(const SimProgram& p) {
  StabilityReport report;
  for (std::uint32_t m = 0; m < p.mat_count(); ++m) {
    MatTag tag = p.mat_tag[m];
    if (tag != MatTag::Mass && tag != MatTag::Cel) continue;
    StabilityEntry e;
    e.module = p.mat_ids[m];
    e.mass = p.mass[m];
    e.k_sum = p.self_k[m];
    e.z_sum = p.self_z[m];
    double k_lo = e.k_sum, k_hi = e.k_sum;
    double z_lo = e.z_sum, z_hi = e.z_sum;
    for (std::uint32_t i = p.incident_offset[m]; i < p.incident_offset[m + 1]; ++i) {
      std::uint32_t l = p.incident_link[i];
      switch (p.link_tag[l]) {
        case LinkTag::Nonlinear: {
          // F = fK(dx): the equivalent stiffness is minus the slope.
          SlopeRange sk = slope_range(p.tables[p.link_table[l]]);
          SlopeRange sz = slope_range(p.tables[p.link_table[l] + 1]);
          k_lo -= sk.hi;
          k_hi -= sk.lo;
          z_lo -= sz.hi;
          z_hi -= sz.lo;
          e.advisory = true;
          break;
        }
        case LinkTag::Buffer:
          e.advisory = true;
          [[fallthrough]];
        default:
          k_lo += p.link_k[l];
          k_hi += p.link_k[l];
          z_lo += p.link_z[l];
          z_hi += p.link_z[l];
          break;
      }
    }
    double worst = -1.0;
    for (double k : {k_lo, k_hi}) {
      for (double z : {z_lo, z_hi}) {
        double r = companion_radius(k / e.mass, z / e.mass);
        if (r > worst) {
          worst = r;
          e.k_sum = k;
          e.z_sum = z;
        }
      }
    }
    e.radius = worst;
    e.verdict = classify(e.k_sum / e.mass, e.z_sum / e.mass);
    report.entries.push_back(e);
  }
  return report;
}

}  // namespace pnet::sim
