#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <vector>

namespace sphereqed::detail {

struct SeriesSum {
  std::complex<double> sum;
  int l_max_used = 0;
  double tail = 0.0; // extrapolated magnitude of the omitted terms
  bool converged = false;
};

inline constexpr double term_threshold = 1e-12;
inline constexpr double tail_threshold = 1e-10;
inline constexpr int series_cap = 1 << 20;

// Geometric extrapolation from the final three-term block. A ratio at or
// above one yields an infinite estimate.
inline double extrapolated_tail(const std::vector<std::complex<double>> &terms) {
  const std::size_t n = terms.size();
  if (n < 6)
    return std::numeric_limits<double>::infinity();
  double last = 0.0, prev = 0.0;
  for (std::size_t k = n - 3; k < n; ++k)
    last += std::abs(terms[k]);
  for (std::size_t k = n - 6; k < n - 3; ++k)
    prev += std::abs(terms[k]);
  if (last == 0.0)
    return 0.0;
  if (prev == 0.0)
    return std::numeric_limits<double>::infinity();
  const double q = last / prev; // ratio per three terms
  if (q >= 1.0)
    return std::numeric_limits<double>::infinity();
  return last * q / (1.0 - q);
}

// Sums terms l = 1..L where build(L) returns them (index 0 holds l = 1).
// L starts at l_start and doubles until the last three terms fall below
// term_threshold of the partial sum and the extrapolated tail is below
// tail_threshold of it, or until the cap is reached.
// `reference` maps the partial sum to the magnitude the tail is judged
// against (by default |sum|).
template <class Build, class Ref>
SeriesSum adaptive_series(int l_start, Build &&build, Ref &&reference, int cap = series_cap) {
  int L = std::max(l_start, 8);
  SeriesSum out;
  for (;;) {
    const std::vector<std::complex<double>> terms = build(L);
    std::complex<double> s = 0.0;
    for (const auto &t : terms)
      s += t;
    const double scale = reference(s);
    const std::size_t n = terms.size();
    bool small = n >= 3;
    for (std::size_t k = n >= 3 ? n - 3 : 0; k < n; ++k)
      small = small && std::abs(terms[k]) <= term_threshold * scale;
    const double tail = extrapolated_tail(terms);
    out.sum = s;
    out.l_max_used = L;
    out.tail = tail;
    if ((small && tail <= tail_threshold * scale) || scale == 0.0) {
      out.converged = true;
      if (scale == 0.0)
        out.tail = 0.0;
      return out;
    }
    if (L >= cap)
      return out;
    L = std::min(cap, 2 * L);
  }
}

template <class Build> SeriesSum adaptive_series(int l_start, Build &&build) {
  return adaptive_series(l_start, build, [](std::complex<double> s) { return std::abs(s); });
}

} // namespace sphereqed::detail
