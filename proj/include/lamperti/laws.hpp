#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace lamperti::laws {

enum class SupportKind { Finite, Countable };

// Probability law on {support_min, support_min+1, ...} (support_min is 1 for
// invariant-law targets and branching numbers, 0 for the extinction
// machinery). tail(j) is always derived as 1 - cdf(j), never stored.
class DiscreteLaw {
public:
    DiscreteLaw() = default;
    DiscreteLaw(std::string label, SupportKind kind, long finite_n, long support_min,
                long horizon, std::function<double(long)> pmf,
                std::function<double(long)> cdf,
                std::function<double(double)> closed_pgf = nullptr);

    const std::string& label() const { return label_; }
    SupportKind support() const { return kind_; }
    bool finite() const { return kind_ == SupportKind::Finite; }
    long finite_n() const { return finite_n_; }
    long support_min() const { return support_min_; }
    long horizon() const { return horizon_; }

    double pmf(long j) const;
    double cdf(long j) const;
    double tail(long j) const { return 1.0 - cdf(j); }

    bool has_closed_pgf() const { return static_cast<bool>(closed_pgf_); }
    double closed_pgf(double z) const;

    // E(nu), truncated when the tail forces it; unbounded sums report +inf.
    double mean(double tol = 1e-12) const;

private:
    std::string label_;
    SupportKind kind_ = SupportKind::Countable;
    long finite_n_ = -1;
    long support_min_ = 1;
    long horizon_ = 1000;
    std::function<double(long)> pmf_;
    std::function<double(long)> cdf_;
    std::function<double(double)> closed_pgf_;
};

// Nonnegative measure delta(j) on {1,2,...}, not necessarily summable,
// with partial sums F_inf(j) = sum_{k<=j} delta(k).
class PositiveMeasure {
public:
    PositiveMeasure() = default;
    PositiveMeasure(std::string label, bool summable, std::function<double(long)> delta,
                    std::function<double(long)> partial_sum,
                    std::function<double(double)> closed_pgf = nullptr);

    const std::string& label() const { return label_; }
    bool summable() const { return summable_; }
    double delta(long j) const;
    double partial_sum(long j) const;
    bool has_closed_pgf() const { return static_cast<bool>(closed_pgf_); }
    double closed_pgf(double z) const;

private:
    std::string label_;
    bool summable_ = false;
    std::function<double(long)> delta_;
    std::function<double(long)> partial_;
    std::function<double(double)> closed_pgf_;
};

struct FamilyParams {
    double p = 0.5;
    double alpha = 0.5;
    double beta = 1.0;
    double lambda = 1.0;
    long n = 0;  // support size for the finite binomial families
};

using Target = std::variant<DiscreteLaw, PositiveMeasure>;

// Family identifiers: geometric, negbin-positive, negbin-shifted, fisher-log,
// sibuya, pareto, zipf, logtail, shifted-poisson, poisson-positive,
// binomial-restricted, binomial-shifted, delta1; measures: counting, linear,
// harmonic.
Target make_target(const std::string& name, const FamilyParams& params);

bool is_measure_family(const std::string& name);

// Finite law from an explicit mass vector (pmf[i] is the mass at
// support_min + i). Masses must sum to 1 within 1e-12.
DiscreteLaw from_pmf_vector(const std::string& label, const std::vector<double>& pmf,
                            long support_min);

// sum_j z^j mass(j) by direct summation with a tail bound below tol.
// Works for laws and (strictly inside [0,1)) for non-summable measures.
double pgf_eval(const DiscreteLaw& law, double z, double tol = 1e-15);
double pgf_eval(const PositiveMeasure& mu, double z, double tol = 1e-15);

// Smallest fixed point of the pgf in [0,1]; 1 when E(nu) <= 1.
double extinction_probability(const DiscreteLaw& nu);

// Laws conditioned on extinction / explosion of the underlying GW process;
// both require 0 < rho_e < 1.
DiscreteLaw condition_on_extinction(const DiscreteLaw& nu);
DiscreteLaw condition_on_explosion(const DiscreteLaw& nu);

// Complete monotonicity of the complementary cdf by signed finite
// differences up to order k_max over j <= j_max.
bool cm_check(const DiscreteLaw& law, int k_max, long j_max);

// The normalizing constant C0 of the logarithmic-tail family and the exact
// tail of that target (partial sums below 10^6, Euler-Maclaurin beyond).
double logtail_norm_constant(double beta);
double logtail_target_tail(double beta, double c0, double j);

}  // namespace lamperti::laws
