#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lamperti/laws.hpp"

namespace lamperti::design {

// Monotone bisection for phi(x) = y with phi increasing from phi(0) = 0.
// For probability pgfs the bracket is [lo, 1]; with unbounded = true the
// upper end expands toward 1 (measures, phi(1-) = infinity). 200-iteration
// cap; the residual is driven to 1e-14 * max(1, |y|) where the slope allows.
double invert_pgf_bisection(const std::function<double(double)>& phi, double y,
                            double lo = 0.0, bool unbounded = false);

enum class Method { Series, Bisection, Both };

struct DesignResult {
    std::vector<double> F;         // production cdf values at j = 1..j_max
    std::vector<double> F_series;  // series-route values (Series/Both), NaN where divergent
    std::vector<double> F_target;  // target cdf / partial sums at the same j
    double max_discrepancy = 0.0;  // Both: max |bisection - series| where series converged
    bool series_all_converged = true;
    bool series_any_accelerated = false;
};

inline constexpr int kDefaultNMax = 200;

// Branching-number cdf for a probability target supported on {1,2,...}.
DesignResult design_branching(const laws::DiscreteLaw& target, long j_max,
                              Method method = Method::Bisection, int n_max = kDefaultNMax);

// Finite-support inverse design; pi_n must sum to 1 with pi_n[0] > 0.
// Output has F(N) snapped to exactly 1 after a 1e-10 closeness check.
DesignResult design_branching_finite(const std::vector<double>& pi_n,
                                     Method method = Method::Both, int n_max = kDefaultNMax);

// Same machinery on an unnormalized positive measure via its partial sums.
DesignResult design_from_measure(const laws::PositiveMeasure& delta, long j_max,
                                 Method method = Method::Bisection, int n_max = kDefaultNMax);

// Closed-form F tables for the families the paper solves explicitly; the
// oracle against the generic machinery. Families: geometric, sibuya,
// negbin-positive, fisher-log, shifted-poisson, poisson-positive,
// binomial-restricted, counting, linear, harmonic, delta1.
std::vector<double> closed_form_design(const std::string& name, const laws::FamilyParams& params,
                                       long j_max);

// The designed branching number nu as an evaluable law (closed-form cdf
// where the paper provides one, bisection-backed otherwise). Accepts the
// target family name; "counting-design" style aliases are handled by the CLI.
laws::DiscreteLaw designed_law(const std::string& name, const laws::FamilyParams& params);

}  // namespace lamperti::design
