#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "lamperti/chain.hpp"

namespace lamperti::hitting {

// Full analysis output for one (chain, pi0) pair. Sequences are indexed by
// n starting at 0 and truncated at the adaptive mixing horizon.
struct HittingReport {
    std::vector<double> T_cdf;         // P(T_N <= n)
    std::vector<double> sep;           // separation distance, = 1 - T_cdf entrywise
    std::vector<double> W1_tail;       // P(W1 > n)
    std::vector<double> tau_tail_pi0;  // P(tau_{pi0,N} > n)
    std::vector<double> tau_tail_piN;  // P(tau_{pi(N),N} > n)
    double mean_T = 0.0;
    double mean_tau_pi0 = 0.0;
    double mean_tau_piN = 0.0;
    double second_moment_tau_piN = 0.0;
    Eigen::VectorXd qsd_mu;   // on {1..N-1}, sums to 1
    double rho_N = 0.0;
    Eigen::VectorXd qsd_phi;  // right eigenvector, mu'phi = 1
    double u_limit = 0.0;     // Prop 15 tail-ratio limit
    double exp_bound_piN = 0.0;
    double exp_bound_pi0 = 0.0;
    double observed_sup_piN = 0.0;
    double observed_sup_pi0 = 0.0;
    bool brown_ok = true;
};

// pi0(i)/pi(i) nonincreasing (ties allowed) and pi0(N) = 0.
bool check_brown_condition(const Eigen::VectorXd& pi0, const Eigen::VectorXd& pi);

// P(T_N <= n) = pi0' P^n e_N / pi(N) for n = 0..n_max; refuses a pi0 that
// violates the Brown condition unless forced (monotonicity is asserted).
std::vector<double> strong_stationary_time_cdf(const chain::TransitionMatrix& tm,
                                               const Eigen::VectorXd& pi0, long n_max,
                                               bool forced = false);

// Separation distance at time n; the max-over-states form and the state-N
// form are both computed and must agree within 1e-10.
double separation_distance(const chain::TransitionMatrix& tm, const Eigen::VectorXd& pi0,
                           long n);

// P(W1 > n) = (P^n(N,N) - pi(N)) / (1 - pi(N)).
double w1_tail(const chain::TransitionMatrix& tm, double pi_N, long n);

// Hitting time of state N via the (N-1)x(N-1) substochastic corner.
// init lives on {1..N}; mass at N is allowed only for the pi_(N) start
// (tau_{N,N} = 0 convention).
double hitting_tail(const chain::TransitionMatrix& tm, const Eigen::VectorXd& init, long n);
double hitting_mean(const chain::TransitionMatrix& tm, const Eigen::VectorXd& init);
double hitting_second_moment(const chain::TransitionMatrix& tm, const Eigen::VectorXd& init);

struct Qsd {
    Eigen::VectorXd mu;   // left eigenvector, |mu|_1 = 1
    double rho = 0.0;     // dominant eigenvalue of the corner
    Eigen::VectorXd phi;  // right eigenvector, mu'phi = 1
};

// Power iteration on the substochastic corner and its transpose to residual
// 1e-12; retried with a diagonal shift before giving up. The pgf identity
// rho = sum_j mu(j) F(N-1)^j is verified within 1e-10.
Qsd qsd(const chain::TransitionMatrix& tm);

// Prop 15 limit pi00'phi / pi_(N-1)'phi; asserts phi nonincreasing and,
// when the Brown condition is guaranteed, the limit >= 1 - 1e-12.
double tail_ratio_limit(const chain::TransitionMatrix& tm, const Eigen::VectorXd& pi0,
                        const Eigen::VectorXd& pi, bool brown_guaranteed = true);

struct ConvolutionCheck {
    double max_residual_b5 = 0.0;    // (B2) vs (B5) pgf identity
    double max_residual_b3a = 0.0;   // factorization E z^tau = E z^T E z^tau_piN
    double mean_identity_gap = 0.0;  // |E(tau) - E(G)E(W1)|
    std::vector<double> residual_per_z;
};

ConvolutionCheck geometric_convolution_check(const chain::TransitionMatrix& tm,
                                             const Eigen::VectorXd& pi0,
                                             const std::vector<double>& z_grid);

struct ExponentialBound {
    double bound_piN = 0.0;       // pi(N) E(W1^2)/E(W1)^2
    double bound_piN_alt = 0.0;   // 2(1-pi(N))[E(tau^2)/(2E(tau)^2) - 1]
    double bound_pi0 = 0.0;
    double observed_sup_piN = 0.0;
    double observed_sup_pi0 = 0.0;
    double mean_T = 0.0;          // E(T_N), fundamental-matrix form
};

ExponentialBound exponential_bound(const chain::TransitionMatrix& tm,
                                   const Eigen::VectorXd& pi0);

// E(T_N): definition sum_{n>=0} P(T>n), and the fundamental-matrix form
// 1 - pi0' Z e_N / pi(N) with Z = (I - P + 1 pi')^{-1}.
double mean_T_definition(const chain::TransitionMatrix& tm, const Eigen::VectorXd& pi0,
                         double tol = 1e-13);
double mean_T_fundamental(const chain::TransitionMatrix& tm, const Eigen::VectorXd& pi0);

// ||mu_(N-1) - renormalized pi_(N-1)||_inf for each truncation level.
std::vector<double> siegmund_pollack_gap(const laws::DiscreteLaw& target,
                                         const std::vector<long>& n_list);

struct AnalyzeOptions {
    bool forced = false;
    long n_cap = 100000;
    double sep_tol = 1e-10;
};

HittingReport analyze(const chain::TransitionMatrix& tm, const Eigen::VectorXd& pi0,
                      const AnalyzeOptions& opts = {});

// Key-value text document with the sequences as column records.
void write_report(std::ostream& os, const HittingReport& r);

}  // namespace lamperti::hitting
