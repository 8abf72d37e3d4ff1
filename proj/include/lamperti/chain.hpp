#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lamperti/laws.hpp"

namespace lamperti::chain {

// Dense truncated Lamperti transition matrix together with the generating
// cdf it was built from. P(i,j) = F(j)^i - F(j-1)^i with F(0) = 0, F(N) = 1.
struct TransitionMatrix {
    long N = 0;
    Eigen::MatrixXd P;            // row-stochastic
    Eigen::MatrixXd Pc;           // cumulated: Pc(i,j) = F(j)^i
    std::vector<double> F;        // F[0] = 0 .. F[N] = 1
    std::optional<Eigen::VectorXd> pi;
};

// Builds the matrix from a cdf table F(1..N); throws on non-monotone input,
// F(N) != 1, or any row-sum deviation beyond 1e-10 (renormalization refused).
TransitionMatrix build_transition(const std::vector<double>& F);

// Stationary vector: dense solve with one equation replaced by the
// normalization; power iteration to 1e-12 for N > 2000.
Eigen::VectorXd stationary_distribution(const TransitionMatrix& tm);

// Principal minor det[(I-P)^{(j,j)}], j in 1..N (determinant route, N <= 12);
// kirchhoff_vector returns all minors normalized to sum 1.
double kirchhoff_pi(const TransitionMatrix& tm, long j);
Eigen::VectorXd kirchhoff_vector(const TransitionMatrix& tm);

bool is_stochastically_monotone(const TransitionMatrix& tm);
bool is_tp2(const Eigen::MatrixXd& Pc);

// Time-reversed kernel D_pi^{-1} P' D_pi; pi must be stationary for P.
Eigen::MatrixXd time_reverse(const TransitionMatrix& tm, const Eigen::VectorXd& pi);

enum class TruncationMode { Renormalize, Lump };

// Probability vector on {1..N} from a countable target: renormalized
// restriction, or restriction with the tail mass lumped at N.
std::vector<double> truncate_target(const laws::DiscreteLaw& target, long N,
                                    TruncationMode mode = TruncationMode::Renormalize);

enum class Verdict { PositiveRecurrent, NullRecurrent, Transient, CriticalOpen, Inconclusive };

struct Classification {
    Verdict verdict = Verdict::Inconclusive;
    double limit_estimate = 0.0;          // estimate of lim i P(nu > i)
    std::optional<double> d_estimate;     // critical-regime slope, when probed
    double margin = 0.0;                  // relative distance to the deciding threshold
};

const char* verdict_name(Verdict v);

// Recurrence/transience via lim i P(nu > i) on a dyadic grid with
// Richardson extrapolation; near e^{-gamma} the (L3) d-criterion decides.
Classification classify(const laws::DiscreteLaw& nu);

struct ExpectedMax {
    double value = 0.0;
    bool infinite = false;
};

// E(m_i) = sum_{j>=0} (1 - F(j)^i), truncated with relative tail bound
// 1e-12; flags a non-summable summand tail instead of looping forever.
ExpectedMax expected_max(const laws::DiscreteLaw& nu, long i);

// Smallest I <= i_max with E(m_i) <= i - 1 on all sampled i in [I, i_max].
std::optional<long> foster_drift_threshold(const laws::DiscreteLaw& nu, long i_max);

struct WorstStateStats {
    double mean_return = 0.0;             // 1/pi(1)
    double mean_positive_excursion = 0.0; // (1/(1-F(1)))(1/pi(1) - F(1)), > 2
    double occupation_rho = 0.0;          // F(1) pi(1)
};

WorstStateStats worst_state_stats(const TransitionMatrix& tm, const Eigen::VectorXd& pi);

// Plain text matrix/vector serialization: '#' comment lines, then a header
// line with the dimension, then row-major entries (17 significant digits).
void write_matrix(std::ostream& os, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(std::istream& is);
void write_vector(std::ostream& os, const Eigen::VectorXd& v);
Eigen::VectorXd read_vector(std::istream& is);

}  // namespace lamperti::chain
