#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oracle {

std::vector<std::size_t> components(const dcx::PointPattern& p, double r) {
  const std::size_t n = p.size();
  std::vector<std::size_t> label(n);
  std::iota(label.begin(), label.end(), std::size_t{0});
  // Relabel to the minimum until nothing changes.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        double s = 0.0;
        for (std::size_t d = 0; d < p.dim(); ++d) s += (p.point(i)[d] - p.point(j)[d]) * (p.point(i)[d] - p.point(j)[d]);
        if (s <= 4.0 * r * r && label[i] != label[j]) {
          const auto lo = std::min(label[i], label[j]);
          label[i] = label[j] = lo;
          changed = true;
        }
      }
  }
  return label;
}

std::vector<std::uint64_t> path_counts(const dcx::PointPattern& p, double r, double m) {
  const std::size_t n = p.size();
  std::vector<std::uint64_t> out(n + 1, 0);
  if (n == 0) return out;
  auto dist = [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t d = 0; d < p.dim(); ++d) s += (p.point(i)[d] - p.point(j)[d]) * (p.point(i)[d] - p.point(j)[d]);
    return std::sqrt(s);
  };
  std::vector<bool> start(n), end(n);
  for (std::size_t i = 0; i < n; ++i) {
    double norm = 0.0, gap = 1e300;
    for (double v : p.point(i)) {
      norm += v * v;
      gap = std::min(gap, m - std::abs(v));
    }
    start[i] = std::sqrt(norm) <= r;
    end[i] = gap <= r;
  }
  const std::size_t full = std::size_t{1} << n;
  std::vector<std::uint64_t> dp(full * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    if (start[i]) dp[(std::size_t{1} << i) * n + i] = 1;
  for (std::size_t mask = 1; mask < full; ++mask)
    for (std::size_t v = 0; v < n; ++v) {
      const auto c = dp[mask * n + v];
      if (c == 0) continue;
      if (end[v]) out[static_cast<std::size_t>(__builtin_popcountll(mask))] += c;
      for (std::size_t w = 0; w < n; ++w)
        if (!(mask >> w & 1) && dist(v, w) <= r) dp[(mask | (std::size_t{1} << w)) * n + w] += c;
    }
  return out;
}

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

double bernoulli_functional(int n, double p, const std::function<double(int)>& f) {
  double total = 0.0;
  for (unsigned long mask = 0; mask < (1UL << n); ++mask) {
    const int ones = __builtin_popcountl(mask);
    total += std::pow(p, ones) * std::pow(1.0 - p, n - ones) * f(ones);
  }
  return total;
}

double lower_gamma_integer(int k, double x) {
  double term = std::exp(-x), sum = 0.0;
  for (int j = 0; j < k; ++j) {
    sum += term;
    term *= x / (j + 1);
  }
  return 1.0 - sum;
}

double stop_loss(const std::vector<double>& pmf, double a) {
  double s = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) s += pmf[i] * std::max(0.0, static_cast<double>(i) - a);
  return s;
}

std::uint64_t walks(const std::vector<std::vector<bool>>& adj, std::size_t start, std::size_t n) {
  // All sequences of n further vertices, kept when distinct and adjacent.
  const std::size_t v = adj.size();
  std::uint64_t count = 0;
  std::vector<std::size_t> seq(n, 0);
  for (;;) {
    bool ok = true;
    std::size_t prev = start;
    std::vector<bool> used(v, false);
    used[start] = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      ok = adj[prev][seq[i]] && !used[seq[i]];
      used[seq[i]] = true;
      prev = seq[i];
    }
    count += ok;
    std::size_t i = 0;
    while (i < n && ++seq[i] == v) seq[i++] = 0;
    if (i == n) break;
  }
  return count;
}

}  // namespace oracle
