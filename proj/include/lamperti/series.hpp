#pragma once

#include <cstddef>
#include <vector>

namespace lamperti::series {

// Truncated real power series. The coefficient of z^k lives at index k;
// access past the truncation order is an error, never an implicit zero.
class PowerSeries {
public:
    PowerSeries() : coeffs_{0.0} {}
    explicit PowerSeries(std::vector<double> coeffs);
    static PowerSeries constant(double c, std::size_t order);

    std::size_t order() const { return coeffs_.size() - 1; }
    double at(std::size_t k) const;
    double operator[](std::size_t k) const { return at(k); }
    const std::vector<double>& coeffs() const { return coeffs_; }

private:
    std::vector<double> coeffs_;
};

// Cauchy product truncated at `order`. Both inputs must carry at least
// `order` coefficients.
PowerSeries fps_mul(const PowerSeries& a, const PowerSeries& b, std::size_t order);

// Formal log (constant term must be positive) and exp (constant term must
// vanish); fps_pow(a, r) = a0^r * exp(r*(log a - log a0)).
PowerSeries fps_log(const PowerSeries& a, std::size_t order);
PowerSeries fps_exp(const PowerSeries& a, std::size_t order);
PowerSeries fps_pow(const PowerSeries& a, double r, std::size_t order);

// Partition star sum C_{n-1,k}: sum over k_m >= 0, m <= max_part, with
// sum k_m = k and sum m*k_m = n-1, of prod ratios[m]^{k_m}/k_m!.
// ratios holds pi(m+1)/pi(1) at index m-1. Enumeration is capped at
// n - 1 <= 25; this is a cross-check path, not the production path.
double star_coeff(const std::vector<double>& pi_ratios, int n, int k, int max_part);

inline constexpr int kStarSumCap = 25;

// Compositional-inverse coefficients of Phi(z) = z*Psi(z).
struct InverseCoeffs {
    std::vector<double> phi;  // phi[n-1] = [z^n] Phi^{-1}(z), n = 1..n_max
    std::vector<double> h;    // h[n-1]   = phi_n * pi1^n;  h[0] == 1 exactly
    double pi1 = 0.0;
    bool cross_checked = false;  // partition route agreed for all n under the cap
};

// phi_n = (1/n) [z^{n-1}] Psi(z)^{-n} via the fps route, cross-checked
// against the partition sum for n - 1 <= kStarSumCap. psi must have a
// positive constant term and order >= n_max - 1.
InverseCoeffs lagrange_inverse_coeffs(const PowerSeries& psi, int n_max);

// Evaluation of sum_{n>=1} h_n x^n. Direct summation with early stop while
// the terms decay; once sustained growth is detected the partial sums are
// handed to Wynn's epsilon algorithm, which reaches the analytic
// continuation for the alternating series this inversion produces.
struct SeriesEval {
    double value = 0.0;
    bool converged = false;
    bool accelerated = false;
    int terms = 0;
};
SeriesEval eval_h_series(const std::vector<double>& h, double x);

// Wynn epsilon on a sequence of partial sums; returns the most converged
// diagonal entry and a stability estimate.
struct WynnResult {
    double value = 0.0;
    double spread = 0.0;  // disagreement of the last diagonal entries
    bool ok = false;
};
WynnResult wynn_epsilon(const std::vector<double>& partial_sums);

// Principal-branch Lambert W on x >= 0, guarded Newton from log(1+x).
double lambert_w(double x);

}  // namespace lamperti::series
