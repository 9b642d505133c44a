#ifndef RCHAIN_LENGTH_ANALYSIS_HPP
#define RCHAIN_LENGTH_ANALYSIS_HPP

// Primitive length spectra and their clustering at multiples of a base length.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "rchain/disk_billiard.hpp"
#include "rchain/error.hpp"
#include "rchain/schottky.hpp"

namespace rchain {

inline constexpr double kLengthMergeTol = 1e-9;

struct LengthEntry {
  double length = 0.0;
  long multiplicity = 1;
};

struct LengthSpectrum {
  std::vector<LengthEntry> entries;  // strictly increasing lengths
  std::string source;
  double cutoff = 0.0;
  bool oriented = true;
  double shortest_omitted = std::numeric_limits<double>::infinity();  // estimate
  std::vector<std::string> warnings;

  long total_multiplicity() const {
    long n = 0;
    for (const auto& e : entries) n += e.multiplicity;
    return n;
  }
};

/// Sorts and merges lengths closer than kLengthMergeTol (relative to max(1, l)).
inline LengthSpectrum make_length_spectrum(std::vector<double> lengths, double cutoff, std::string source = "lengths") {
  LengthSpectrum out;
  out.source = std::move(source);
  out.cutoff = cutoff;
  std::sort(lengths.begin(), lengths.end());
  for (double l : lengths) {
    if (!std::isfinite(l) || l <= 0.0) fail(ErrorCode::InvalidArgument, "lengths must be positive and finite");
    if (l > cutoff) break;
    if (!out.entries.empty() && l - out.entries.back().length <= kLengthMergeTol * std::max(1.0, l)) {
      ++out.entries.back().multiplicity;
    } else {
      out.entries.push_back({l, 1});
    }
  }
  if (out.entries.empty()) out.warnings.push_back("empty spectrum: no orbit with length <= cutoff");
  return out;
}

/// Lengths of primitive closed geodesics with word length <= max_word_length.
/// With `oriented` false a geodesic and its inverse count once.
inline LengthSpectrum length_spectrum(const SchottkySurface& surface, int max_word_length, double cutoff,
                                      bool oriented = true, int max_length = kDefaultMaxWordLength) {
  if (!(cutoff > 0.0)) fail(ErrorCode::InvalidArgument, "cutoff must be positive");
  const auto classes = primitive_classes(surface, max_word_length, OrderSpec::bowen_series(), Alphabet::full,
                                         max_length);
  std::vector<double> lengths;
  double longest_word_min = std::numeric_limits<double>::infinity();
  for (const auto& c : classes) {
    const Word& w = c.cls.canonical_word;
    if (w.size() == static_cast<std::size_t>(max_word_length))
      longest_word_min = std::min(longest_word_min, c.record.length);
    if (!oriented && w.inverse().canonical() < w) continue;
    lengths.push_back(c.record.length);
  }
  std::ostringstream src;
  src.precision(17);
  src << "surface(" << surface.l1 << ',' << surface.l2 << ',' << surface.l3 << ";J=" << max_word_length << ")";
  LengthSpectrum out = make_length_spectrum(std::move(lengths), cutoff, src.str());
  out.oriented = oriented;
  // Minimal lengths grow with word length, so the shortest class at the
  // longest enumerated word length stands in for the first omitted one.
  out.shortest_omitted = longest_word_min;
  if (cutoff >= longest_word_min)
    out.warnings.push_back("possibly incomplete: words longer than " + std::to_string(max_word_length) +
                           " may reach length " + std::to_string(longest_word_min) + " < cutoff");
  return out;
}

/// Lengths of prime periodic orbits of the symmetry-reduced three-disk
/// system with topological length <= max_topological_length.
inline LengthSpectrum length_spectrum(const DiskSystem& sys, int max_topological_length, double cutoff,
                                      bool oriented = true) {
  if (!(cutoff > 0.0)) fail(ErrorCode::InvalidArgument, "cutoff must be positive");
  std::vector<double> lengths;
  for (const auto& cycle : prime_cycles(max_topological_length)) {
    if (!oriented) {
      const BinaryCycle rev = cycle.reversed();
      if (rev.symbols < cycle.symbols) continue;
    }
    // Every bounce-to-bounce segment is at least R - 2a long.
    if (cycle.size() * (sys.center_spacing - 2.0 * sys.disk_radius) > cutoff) continue;
    lengths.push_back(find_orbit(sys, cycle).length);
  }
  std::ostringstream src;
  src.precision(17);
  src << "disks(R=" << sys.center_spacing << ",a=" << sys.disk_radius << ";N=" << max_topological_length << ")";
  LengthSpectrum out = make_length_spectrum(std::move(lengths), cutoff, src.str());
  out.oriented = oriented;
  out.shortest_omitted = (max_topological_length + 1) * (sys.center_spacing - 2.0 * sys.disk_radius);
  if (cutoff >= out.shortest_omitted)
    out.warnings.push_back("possibly incomplete: cycles longer than " + std::to_string(max_topological_length) +
                           " may have length >= " + std::to_string(out.shortest_omitted) + " <= cutoff");
  return out;
}

struct ClusterReport {
  double base = 0.0;
  double score = 0.0;
  double max_dev = 0.0;
  double mean_dev = 0.0;  // multiplicity weighted
  std::vector<long> orders;  // round(l / base) per entry
  double predicted_spacing = 0.0;  // 2 pi / base
  bool candidate = false;
};

/// |sum m e^{2 pi i l / base}| / sum m.
inline double cluster_score(const LengthSpectrum& spec, double base) {
  if (!(base > 0.0)) fail(ErrorCode::InvalidArgument, "base length must be positive");
  std::complex<double> sum = 0.0;
  double weight = 0.0;
  for (const auto& e : spec.entries) {
    sum += static_cast<double>(e.multiplicity) * std::polar(1.0, 2.0 * std::numbers::pi * e.length / base);
    weight += static_cast<double>(e.multiplicity);
  }
  return weight > 0.0 ? std::min(1.0, std::abs(sum) / weight) : 0.0;
}

inline ClusterReport order_condition_report(const LengthSpectrum& spec, double base) {
  ClusterReport r;
  r.base = base;
  r.score = cluster_score(spec, base);
  r.predicted_spacing = 2.0 * std::numbers::pi / base;
  double dev_sum = 0.0, weight = 0.0;
  for (const auto& e : spec.entries) {
    const double n = std::round(e.length / base);
    const double dev = std::abs(e.length - n * base);
    r.orders.push_back(static_cast<long>(n));
    r.max_dev = std::max(r.max_dev, dev);
    dev_sum += dev * static_cast<double>(e.multiplicity);
    weight += static_cast<double>(e.multiplicity);
  }
  r.mean_dev = weight > 0.0 ? dev_sum / weight : 0.0;
  return r;
}

struct ScanOptions {
  double min_score = 0.5;
  double window = 0.25;  // a candidate is the best score within base * (1 +- window)
};

/// Scores `steps` equally spaced bases on [lo, hi]. Local maxima are refined
/// and flagged when they are the best in their window and no longer base
/// that is an integer multiple of them scores at least as well.
inline std::vector<ClusterReport> scan_base_lengths(const LengthSpectrum& spec, double lo, double hi, int steps,
                                                    const ScanOptions& opt = {}) {
  if (!(lo > 0.0) || !(hi > lo)) fail(ErrorCode::InvalidArgument, "base range must satisfy 0 < lo < hi");
  if (steps < 3) fail(ErrorCode::InvalidArgument, "need at least 3 scan steps");
  std::vector<ClusterReport> out;
  out.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    const double base = lo + (hi - lo) * i / (steps - 1);
    out.push_back(order_condition_report(spec, base));
  }

  std::vector<std::size_t> maxima;
  for (std::size_t i = 1; i + 1 < out.size(); ++i) {
    if (out[i].score < opt.min_score || out[i].score < out[i - 1].score || out[i].score < out[i + 1].score)
      continue;
    // Golden-section refinement between the neighbours.
    double a = out[i - 1].base, b = out[i + 1].base;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = cluster_score(spec, c), fd = cluster_score(spec, d);
    for (int it = 0; it < 60 && b - a > 1e-12 * b; ++it) {
      if (fc >= fd) {
        b = d, d = c, fd = fc;
        c = b - g * (b - a), fc = cluster_score(spec, c);
      } else {
        a = c, c = d, fc = fd;
        d = a + g * (b - a), fd = cluster_score(spec, d);
      }
    }
    const double refined = 0.5 * (a + b);
    if (cluster_score(spec, refined) >= out[i].score) out[i] = order_condition_report(spec, refined);
    maxima.push_back(i);
  }
  for (std::size_t i : maxima) {
    const ClusterReport& r = out[i];
    bool keep = true;
    for (std::size_t j : maxima) {
      if (j == i) continue;
      const ClusterReport& q = out[j];
      if (std::abs(q.base - r.base) <= opt.window * r.base && q.score > r.score) keep = false;
      const double ratio = q.base / r.base;
      if (ratio > 1.5 && std::abs(ratio - std::round(ratio)) < 0.02 * ratio && q.score >= r.score) keep = false;
    }
    out[i].candidate = keep;
  }
  return out;
}

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  long count = 0;
};

/// Multiplicity-weighted counts on [0, cutoff] in bins of width `bin_width`.
inline std::vector<HistogramBin> length_histogram(const LengthSpectrum& spec, double bin_width = 0.1) {
  if (!(bin_width > 0.0)) fail(ErrorCode::InvalidArgument, "bin width must be positive");
  const auto bins = static_cast<std::size_t>(std::ceil(spec.cutoff / bin_width));
  std::vector<HistogramBin> out(std::max<std::size_t>(bins, 1));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {i * bin_width, (i + 1) * bin_width, 0};
  for (const auto& e : spec.entries) {
    auto i = static_cast<std::size_t>(e.length / bin_width);
    out[std::min(i, out.size() - 1)].count += e.multiplicity;
  }
  return out;
}

}  // namespace rchain

#endif  // RCHAIN_LENGTH_ANALYSIS_HPP
