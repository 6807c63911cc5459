#pragma once

#include <string>

namespace cddp {

enum class Family { Normal, Weibull, Gamma, Lognormal };

Family family_from_name(const std::string& name);
std::string family_name(Family f);
bool family_positive_support(Family f);

// Standard normal helpers.
double normal_cdf(double z);
double normal_quantile(double u);

// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

// One probability distribution fitted to (mean, variance) by moment
// matching. Parameterizations: Normal (mu, sigma); Lognormal (log-mean m,
// log-sd s); Gamma (shape, scale); Weibull (shape, scale; shape solved by
// bisection on the coefficient-of-variation identity).
class Fitted {
public:
    static Fitted fit(Family family, double mean, double variance);

    double cdf(double x) const;
    double pdf(double x) const;
    double log_pdf(double x) const;
    double quantile(double u) const;  // u in (0,1)

    // Mean/variance implied by the fitted parameters; equal to the matched
    // moments up to the shape-solve tolerance.
    double analytic_mean() const;
    double analytic_variance() const;

    Family family() const { return family_; }
    double param1() const { return p1_; }
    double param2() const { return p2_; }

private:
    Family family_ = Family::Normal;
    double p1_ = 0.0;
    double p2_ = 1.0;
};

}  // namespace cddp
