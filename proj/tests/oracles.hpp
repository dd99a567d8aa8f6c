#pragma once

// Slow, direct reference computations used to cross-check the library.

#include <cstdint>
#include <functional>
#include <vector>

#include "dcxlab/generators.hpp"

namespace oracle {

/// Component labels (smallest index per component) from all O(n^2) pairs.
std::vector<std::size_t> components(const dcx::PointPattern& p, double r);

/// N_{m,k} for k = 0..n by dynamic programming over (visited set, last
/// point); needs n <= 16.
std::vector<std::uint64_t> path_counts(const dcx::PointPattern& p, double r, double m);

/// Direct discrete convolution of two pmf vectors.
std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b);

/// g(n) = E[f(xi_1 + ... + xi_n)] for i.i.d. Bernoulli(p), enumerating all
/// 2^n outcomes.
double bernoulli_functional(int n, double p, const std::function<double(int)>& f);

/// P(k, x) for integer k via the Poisson sum 1 - sum_{j<k} e^{-x} x^j / j!.
double lower_gamma_integer(int k, double x);

/// E[(X - a)^+] from a pmf vector.
double stop_loss(const std::vector<double>& pmf, double a);

/// Number of self-avoiding walks with n steps from `start` in the graph with
/// the given adjacency matrix, by enumeration of all vertex sequences.
std::uint64_t walks(const std::vector<std::vector<bool>>& adj, std::size_t start, std::size_t n);

}  // namespace oracle
