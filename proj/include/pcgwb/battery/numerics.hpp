#pragma once

#include <span>
#include <stdexcept>

namespace pcgwb::battery {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Regularized lower incomplete gamma P(a, x).
double igam(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double igamc(double a, double x);

/// Upper-tail chi-square probability: igamc(dof / 2, x / 2).
double chisq_pvalue(double x, double dof);

/// Kolmogorov distribution tail Q_KS(lambda) = P(K > lambda).
double kolmogorov_q(double lambda);

/// Two-sided Kolmogorov-Smirnov test of p-values against U(0,1), using the
/// asymptotic distribution with the (sqrt(n) + 0.12 + 0.11/sqrt(n)) scaling.
/// Throws std::invalid_argument on empty input.
double ks_uniform(std::span<const double> pvalues);

/// The KS statistic D = max |F_n(x) - x|.
double ks_statistic(std::span<const double> pvalues);

}  // namespace pcgwb::battery
