#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library code it checks.

#include <cmath>
#include <complex>
#include <cstdint>
#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <regex>
#include <set>
#include <string>
#include <vector>

namespace oracle {

/// In-place iterative radix-2 FFT; size must be a power of two.
inline void fft(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        auto u = a[i + k];
        auto v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

/// Bin of the largest magnitude in (0, n/2) of an n-point Hann-windowed
/// transform; the signal is truncated or zero-padded to n.
inline std::size_t peak_bin(const std::vector<double>& x, std::size_t n) {
  std::vector<std::complex<double>> a(n);
  double mean = 0.0;
  const std::size_t used = std::min(n, x.size());
  for (std::size_t i = 0; i < used; ++i) mean += x[i];
  mean /= static_cast<double>(used ? used : 1);
  for (std::size_t i = 0; i < used; ++i) {
    double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / static_cast<double>(used - 1));
    a[i] = (x[i] - mean) * w;
  }
  fft(a);
  std::size_t best = 1;
  for (std::size_t k = 1; k < n / 2; ++k) {
    if (std::abs(a[k]) > std::abs(a[best])) best = k;
  }
  return best;
}

/// Undamped mass-spring frequency of the explicit scheme, in Hz.
inline double oscillator_hz(double k, double m, double fs) {
  return fs * std::acos(1.0 - k / (2.0 * m)) / (2.0 * std::numbers::pi);
}

/// Spectral radius of x(n+1) = (2-k-z) x(n) + (z-1) x(n-1), from the
/// quadratic formula on complex numbers.
inline double companion_radius(double k, double z) {
  std::complex<double> b = -(2.0 - k - z), c = 1.0 - z;
  std::complex<double> d = std::sqrt(b * b - 4.0 * c);
  return std::max(std::abs((-b + d) / 2.0), std::abs((-b - d) / 2.0));
}

/// Brute-force stability: simulate one mass on a spring+damper to the ground
/// and report whether the amplitude escapes.
inline bool empirical_blowup(double k, double z, int steps) {
  double prev = 1.0, cur = 1.0;
  double peak0 = 1.0;
  for (int n = 0; n < steps; ++n) {
    double next = (2.0 - k - z) * cur + (z - 1.0) * prev;
    prev = cur;
    cur = next;
    if (!std::isfinite(cur) || std::fabs(cur) > 1e6 * peak0) return true;
  }
  return false;
}

/// Does the envelope of the last tenth of a run exceed that of the first
/// tenth? Separates radius 1.001 from 0.999 within 10^4 steps, where a fixed
/// amplitude threshold would not.
inline bool envelope_grows(double k, double z, int steps) {
  double prev = 1.0, cur = 1.0, early = 0.0, late = 0.0;
  int window = steps / 10;
  for (int n = 0; n < steps; ++n) {
    double next = (2.0 - k - z) * cur + (z - 1.0) * prev;
    prev = cur;
    cur = next;
    if (!std::isfinite(cur)) return true;
    if (n < window) early = std::max(early, std::fabs(cur));
    if (n >= steps - window) late = std::max(late, std::fabs(cur));
  }
  return late > early;
}

// ---------------------------------------------------------------------------
// Labels and pickers

/// Regex equivalent of one glob segment.
inline std::string segment_regex(const std::string& seg) {
  std::string out;
  for (std::size_t i = 0; i < seg.size(); ++i) {
    char c = seg[i];
    if (c == '*') {
      out += "[^/]*";
    } else if (c == '?') {
      out += "[^/]";
    } else if (c == '[') {
      std::size_t close = seg.find(']', i + 1);
      std::string body = seg.substr(i + 1, close - i - 1);
      if (!body.empty() && body[0] == '!') body[0] = '^';
      out += "[" + body + "]";
      i = close;
    } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      out += c;
    } else {
      out += '\\';
      out += c;
    }
  }
  return out;
}

inline bool has_glob(const std::string& s) { return s.find_first_of("*?[") != std::string::npos; }

/// Does a "/a/b*/**" style pattern match a label? Radicals (no glob
/// characters) match the label itself and anything below it.
class LabelPattern {
 public:
  explicit LabelPattern(const std::vector<std::string>& segments) {
    for (const auto& s : segments) {
      glob_ = glob_ || has_glob(s);
      literal_ += "/" + s;
    }
    if (!glob_) return;
    std::string re;
    for (const auto& s : segments) re += s == "**" ? "(/[^/]+)*" : "/" + segment_regex(s);
    re_ = std::regex(re);
  }
  bool matches(const std::string& label) const {
    if (!glob_) return label == literal_ || label.rfind(literal_ + "/", 0) == 0;
    return std::regex_match(label, re_);
  }

 private:
  bool glob_ = false;
  std::string literal_;
  std::regex re_;
};

inline bool label_matches(const std::vector<std::string>& segments, const std::string& label) {
  return LabelPattern(segments).matches(label);
}

/// Test-side picker tree, rendered with full parenthesization.
struct PickerTree {
  char op = 0;  // 0 for a pattern, else + & -
  std::vector<std::string> segments;
  std::unique_ptr<PickerTree> lhs, rhs;

  std::string text() const {
    if (!op) {
      std::string out;
      for (const auto& s : segments) out += "/" + s;
      return out;
    }
    return "(" + lhs->text() + ") " + op + " (" + rhs->text() + ")";
  }
};

/// Enumerate-and-match evaluation over (label, module) pairs.
inline std::set<std::uint64_t> evaluate(const PickerTree& t,
                                        const std::multimap<std::string, std::uint64_t>& labels) {
  if (!t.op) {
    std::set<std::uint64_t> out;
    LabelPattern pattern(t.segments);
    for (const auto& [label, id] : labels) {
      if (pattern.matches(label)) out.insert(id);
    }
    return out;
  }
  auto a = evaluate(*t.lhs, labels), b = evaluate(*t.rhs, labels);
  std::set<std::uint64_t> out;
  if (t.op == '+') {
    out = a;
    out.insert(b.begin(), b.end());
  } else if (t.op == '&') {
    for (auto x : a) {
      if (b.count(x)) out.insert(x);
    }
  } else {
    for (auto x : a) {
      if (!b.count(x)) out.insert(x);
    }
  }
  return out;
}

}  // namespace oracle
