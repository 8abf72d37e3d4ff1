#include "lamperti/hitting.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "lamperti/design.hpp"
#include "lamperti/numeric.hpp"

namespace lamperti::hitting {

namespace {

using quad = __float128;

quad qabs(quad x) { return x < 0 ? -x : x; }

// Partial-pivot LU solve in quadruple precision. The tau-moment route runs
// through (I - Q) whose condition number is ~1/(1 - rho_N); at N = 32 that
// is ~4e9 and double precision cannot support the 1e-10 agreement between
// the two printed bound forms.
std::vector<quad> solve_quad(std::vector<std::vector<quad>> A, std::vector<quad> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (qabs(A[r][c]) > qabs(A[piv][c])) piv = r;
        if (A[piv][c] == 0) throw std::runtime_error("solve_quad: singular system");
        std::swap(A[piv], A[c]);
        std::swap(b[piv], b[c]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const quad f = A[r][c] / A[c][c];
            if (f == 0) continue;
            for (std::size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
            b[r] -= f * b[c];
        }
    }
    std::vector<quad> x(n, 0);
    for (std::size_t r = n; r-- > 0;) {
        quad s = b[r];
        for (std::size_t k = r + 1; k < n; ++k) s -= A[r][k] * x[k];
        x[r] = s / A[r][r];
    }
    return x;
}

std::vector<std::vector<quad>> i_minus_q_quad(const chain::TransitionMatrix& tm) {
    const long m = tm.N - 1;
    std::vector<std::vector<quad>> A(static_cast<std::size_t>(m),
                                     std::vector<quad>(static_cast<std::size_t>(m), 0));
    for (long i = 0; i < m; ++i)
        for (long j = 0; j < m; ++j) {
            quad v = -static_cast<quad>(tm.P(i, j));
            if (i == j) v += 1;
            A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
        }
    return A;
}

// Fundamental matrix Z = (I - P + 1 pi')^{-1}, well conditioned (spectrum
// bounded away from 0 by the spectral gap of the full chain).
Eigen::MatrixXd fundamental_z(const chain::TransitionMatrix& tm, const Eigen::VectorXd& pi) {
    const long N = tm.N;
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(N, N) - tm.P;
    M.noalias() += Eigen::VectorXd::Ones(N) * pi.transpose();
    return M.partialPivLu().inverse();
}

Eigen::VectorXd require_pi(const chain::TransitionMatrix& tm) {
    if (tm.pi) return *tm.pi;
    return chain::stationary_distribution(tm);
}

Eigen::VectorXd drop_last(const Eigen::VectorXd& v) { return v.head(v.size() - 1); }

// Second-largest eigenvalue (in modulus) of P via power iteration on the
// deflated kernel P - 1 pi'. SM chains have it real, simple and positive.
double lambda2_estimate(const chain::TransitionMatrix& tm, const Eigen::VectorXd& pi) {
    const long N = tm.N;
    if (N == 1) return 0.0;
    Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(N, 1.0, 2.0);
    v -= Eigen::VectorXd::Ones(N) * pi.dot(v);  // remove the Perron component
    v.normalize();
    double lam = 0.0;
    for (int it = 0; it < 20000; ++it) {
        Eigen::VectorXd w = tm.P * v - Eigen::VectorXd::Ones(N) * pi.dot(v);
        const double nrm = w.norm();
        if (nrm < 1e-300) return 0.0;
        w /= nrm;
        const double next = w.dot(tm.P * w - Eigen::VectorXd::Ones(N) * pi.dot(w));
        if (std::abs(next - lam) < 1e-13 * std::max(1.0, std::abs(next)) && it > 10) {
            return std::abs(next);
        }
        lam = next;
        v = w;
    }
    return std::min(0.999999999999, std::abs(lam));
}

struct PowSequences {
    std::vector<double> T_cdf;  // pi0' P^n e_N / pi(N)
    std::vector<double> ANN;    // P^n(N,N)
};

PowSequences power_sequences(const chain::TransitionMatrix& tm, const Eigen::VectorXd& pi0,
                             double pi_N, double sep_tol, long n_cap) {
    const long N = tm.N;
    PowSequences seq;
    Eigen::RowVectorXd v = pi0.transpose();
    Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(N);
    e(N - 1) = 1.0;
    for (long n = 0;; ++n) {
        seq.T_cdf.push_back(v(N - 1) / pi_N);
        seq.ANN.push_back(e(N - 1));
        if (1.0 - seq.T_cdf.back() < sep_tol || n >= n_cap) break;
        v *= tm.P;
        e *= tm.P;
    }
    return seq;
}

// Observed sup_t |P(tau/E > t) - e^{-t}| for a hitting-time tail sequence.
// Exact enumeration while tails are available; past the powering horizon the
// tail is continued by its validated dominant mode c1 * rho^n.
double observed_sup(const std::vector<double>& tail, double mean, double rho, double c1,
                    bool extrapolate) {
    if (!(mean > 0.0)) return 1.0;  // degenerate tau = 0 start
    double sup = 0.0;
    for (std::size_t n = 0; n < tail.size(); ++n) {
        const double t0 = static_cast<double>(n) / mean;
        const double t1 = static_cast<double>(n + 1) / mean;
        sup = std::max(sup, std::abs(tail[n] - std::exp(-t0)));
        sup = std::max(sup, std::abs(tail[n] - std::exp(-t1)));
        if (tail[n] < 1e-6) return sup;
    }
    if (!extrapolate) return sup;
    // Continue on a fine t-grid; the jump quantization is O(1/mean) here.
    const double n0 = static_cast<double>(tail.size());
    const double lr = std::log(rho);
    for (double t = n0 / mean; t < 16.0; t += 1e-3) {
        const double geo = c1 * std::exp(std::floor(t * mean) * lr);
        sup = std::max(sup, std::abs(geo - std::exp(-t)));
        if (geo < 1e-6 && std::exp(-t) < 1e-6) break;
    }
    return sup;
}

}  // namespace

bool check_brown_condition(const Eigen::VectorXd& pi0, const Eigen::VectorXd& pi) {
    const long N = pi.size();
    if (pi0.size() != N) throw std::invalid_argument("check_brown_condition: size mismatch");
    if (pi0.minCoeff() < 0.0) return false;
    if (std::abs(pi0.sum() - 1.0) > 1e-10) return false;
    if (pi0(N - 1) != 0.0) return false;
    double prev = std::numeric_limits<double>::infinity();
    for (long i = 0; i < N; ++i) {
        const double r = pi0(i) / pi(i);
        if (r > prev * (1.0 + 1e-12) + 1e-15) return false;
        prev = r;
    }
    return true;
}

std::vector<double> strong_stationary_time_cdf(const chain::TransitionMatrix& tm,
                                               const Eigen::VectorXd& pi0, long n_max,
                                               bool forced) {
    const Eigen::VectorXd pi = require_pi(tm);
    if (!check_brown_condition(pi0, pi) && !forced)
        throw std::invalid_argument(
            "strong_stationary_time_cdf: Brown condition violated (pass forced to override)");
    const double pi_N = pi(tm.N - 1);
    std::vector<double> cdf;
    Eigen::RowVectorXd v = pi0.transpose();
    for (long n = 0; n <= n_max; ++n) {
        cdf.push_back(v(tm.N - 1) / pi_N);
        if (n > 0 && cdf[static_cast<std::size_t>(n)] < cdf[static_cast<std::size_t>(n - 1)] - 1e-12)
            throw std::runtime_error("strong_stationary_time_cdf: cdf not monotone");
        v *= tm.P;
    }
    return cdf;
}

double separation_distance(const chain::TransitionMatrix& tm, const Eigen::VectorXd& pi0,
                           long n) {
    const Eigen::VectorXd pi = require_pi(tm);
    Eigen::RowVectorXd v = pi0.transpose();
    for (long k = 0; k < n; ++k) v *= tm.P;
    double max_form = -std::numeric_limits<double>::infinity();
    for (long k = 0; k < tm.N; ++k) max_form = std::max(max_form, 1.0 - v(k) / pi(k));
    const double state_n_form = 1.0 - v(tm.N - 1) / pi(tm.N - 1);
    if (std::abs(max_form - state_n_form) > 1e-10)
        throw std::runtime_error("separation_distance: max form and state-N form disagree");
    return state_n_form;
}

double w1_tail(const chain::TransitionMatrix& tm, double pi_N, long n) {
    if (!(pi_N > 0.0 && pi_N < 1.0))
        throw std::invalid_argument("w1_tail: pi(N) must lie in (0,1)");
    Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(tm.N);
    e(tm.N - 1) = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    for (long k = 0; k < n; ++k) {
        e *= tm.P;
        if (e(tm.N - 1) > prev + 1e-12)
            throw std::runtime_error("w1_tail: P^n(N,N) not non-increasing");
        prev = e(tm.N - 1);
    }
    return (e(tm.N - 1) - pi_N) / (1.0 - pi_N);
}

namespace {
Eigen::VectorXd corner_start(const chain::TransitionMatrix& tm, const Eigen::VectorXd& init) {
    if (init.size() != tm.N) throw std::invalid_argument("hitting: init size mismatch");
    return drop_last(init);
}
}  // namespace

double hitting_tail(const chain::TransitionMatrix& tm, const Eigen::VectorXd& init, long n) {
    if (tm.N == 1) return 0.0;  // tau = 0 always
    const long m = tm.N - 1;
    Eigen::RowVectorXd a = corner_start(tm, init).transpose();
    const auto Q = tm.P.topLeftCorner(m, m);
    for (long k = 0; k < n; ++k) a *= Q;
    return a.sum();
}

double hitting_mean(const chain::TransitionMatrix& tm, const Eigen::VectorXd& init) {
    if (tm.N == 1) return 0.0;
    const long m = tm.N - 1;
    const auto Q = tm.P.topLeftCorner(m, m);
    Eigen::MatrixXd ImQ = Eigen::MatrixXd::Identity(m, m) - Q;
    Eigen::VectorXd u = ImQ.partialPivLu().solve(Eigen::VectorXd::Ones(m));
    if (!u.allFinite()) throw std::runtime_error("hitting_mean: singular I - Q");
    return corner_start(tm, init).dot(u);
}

double hitting_second_moment(const chain::TransitionMatrix& tm, const Eigen::VectorXd& init) {
    if (tm.N == 1) return 0.0;
    const long m = tm.N - 1;
    const auto Q = tm.P.topLeftCorner(m, m);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(Eigen::MatrixXd::Identity(m, m) - Q);
    Eigen::VectorXd u = lu.solve(Eigen::VectorXd::Ones(m));
    Eigen::VectorXd w = lu.solve(u);
    const Eigen::VectorXd a = corner_start(tm, init);
    return 2.0 * a.dot(w) - a.dot(u);
}

namespace {

struct EigPair {
    Eigen::VectorXd vec;
    double value = 0.0;
    bool ok = false;
};

EigPair power_iterate(const Eigen::MatrixXd& M, double shift, long cap) {
    const long m = M.rows();
    Eigen::VectorXd v = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
    EigPair out;
    for (long it = 0; it < cap; ++it) {
        Eigen::VectorXd w = M * v + shift * v;
        const double nrm = w.lpNorm<1>();
        if (!(nrm > 0.0)) return out;
        w /= nrm;
        const double resid = (M * w + shift * w - nrm * w).lpNorm<Eigen::Infinity>();
        v = w;
        if (resid < 1e-12) {
            out.vec = v;
            out.value = nrm - shift;
            out.ok = true;
            return out;
        }
    }
    return out;
}

}  // namespace

Qsd qsd(const chain::TransitionMatrix& tm) {
    if (tm.N < 2) throw std::invalid_argument("qsd: requires N >= 2");
    const long m = tm.N - 1;
    Qsd out;
    if (m == 1) {
        out.mu = Eigen::VectorXd::Ones(1);
        out.phi = Eigen::VectorXd::Ones(1);
        out.rho = tm.P(0, 0);
        return out;
    }
    const Eigen::MatrixXd Q = tm.P.topLeftCorner(m, m);
    EigPair left = power_iterate(Q.transpose(), 0.0, 200000);
    if (!left.ok) left = power_iterate(Q.transpose(), 1.0, 400000);
    EigPair right = power_iterate(Q, 0.0, 200000);
    if (!right.ok) right = power_iterate(Q, 1.0, 400000);
    if (!left.ok || !right.ok)
        throw std::runtime_error("qsd: power iteration did not converge (after shift retry)");
    out.mu = left.vec / left.vec.sum();
    out.rho = out.mu.dot(Q * right.vec) / out.mu.dot(right.vec);
    out.phi = right.vec / out.mu.dot(right.vec);

    // Prop 14 identity: rho equals the row-sum pgf at F(N-1).
    const double pgf_val = out.mu.dot(Q * Eigen::VectorXd::Ones(m));
    if (std::abs(pgf_val - out.rho) > 1e-10)
        throw std::runtime_error("qsd: eigenvalue and pgf identity disagree beyond 1e-10");
    return out;
}

double tail_ratio_limit(const chain::TransitionMatrix& tm, const Eigen::VectorXd& pi0,
                        const Eigen::VectorXd& pi, bool brown_guaranteed) {
    Qsd q = qsd(tm);
    for (long i = 0; i + 1 < q.phi.size(); ++i)
        if (q.phi(i + 1) > q.phi(i) + 1e-12)
            throw std::runtime_error("tail_ratio_limit: phi entries not non-increasing");
    const Eigen::VectorXd a = drop_last(pi0);
    const Eigen::VectorXd b = drop_last(pi);
    const double u = a.dot(q.phi) / b.dot(q.phi);
    if (brown_guaranteed && u < 1.0 - 1e-12)
        throw std::runtime_error("tail_ratio_limit: limit below 1");
    return u;
}

ConvolutionCheck geometric_convolution_check(const chain::TransitionMatrix& tm,
                                             const Eigen::VectorXd& pi0,
                                             const std::vector<double>& z_grid) {
    const Eigen::VectorXd pi = require_pi(tm);
    const long N = tm.N;
    const double pi_N = pi(N - 1);
    const double lam2 = lambda2_estimate(tm, pi);

    double z_max = 0.0;
    for (double z : z_grid) z_max = std::max(z_max, z);
    // Past this horizon the z^n factor alone drives every pgf remainder
    // below 1e-16, whatever the tails still are.
    const long horizon_z =
        (z_max > 0.0) ? static_cast<long>(40.0 / -std::log(z_max)) + 8 : 8;

    // P^n(N,N) - pi(N) and pi0' P^n e_N, extended until both are far below
    // the truncation targets (these decay at the mixing rate).
    std::vector<double> dev;      // A_n - pi(N)
    std::vector<double> t_cdf;    // pi0' P^n e_N / pi(N)
    {
        Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(N);
        e(N - 1) = 1.0;
        Eigen::RowVectorXd v = pi0.transpose();
        for (long n = 0; n < 2000000; ++n) {
            dev.push_back(e(N - 1) - pi_N);
            t_cdf.push_back(v(N - 1) / pi_N);
            if (std::abs(dev.back()) < 1e-15 && (1.0 - t_cdf.back()) < 1e-15 && n > 4) break;
            e *= tm.P;
            v *= tm.P;
        }
    }
    double c_est = 0.0;
    if (lam2 > 0.0) {
        double ln = 1.0;
        for (std::size_t n = 0; n < dev.size(); ++n) {
            if (ln < 1e-280) break;
            const double cand = std::abs(dev[n]) / ln;
            if (std::isfinite(cand)) c_est = std::max(c_est, cand);
            ln *= lam2;
        }
    }

    // tau tails from the substochastic corner for both starts; these decay
    // only at rho_N, so the loop stops at the z-driven horizon instead.
    const long m = N - 1;
    std::vector<double> tail0, tailN;
    {
        Eigen::RowVectorXd a0 = drop_last(pi0).transpose();
        Eigen::RowVectorXd aN = drop_last(pi).transpose();
        const auto Q = tm.P.topLeftCorner(m, m);
        for (long n = 0; n <= horizon_z; ++n) {
            tail0.push_back(a0.sum());
            tailN.push_back(aN.sum());
            if (tail0.back() < 1e-14 && tailN.back() < 1e-14) break;
            a0 *= Q;
            aN *= Q;
        }
    }

    ConvolutionCheck out;
    double mean_w1 = 0.0;
    {
        numeric::KahanSum s;
        for (double d : dev) s.add(d / (1.0 - pi_N));
        mean_w1 = s.value();
    }
    const double mean_tauN = hitting_mean(tm, pi);
    out.mean_identity_gap = std::abs(mean_tauN - (1.0 - pi_N) / pi_N * mean_w1);

    for (double z : z_grid) {
        if (!(z >= 0.0 && z < 1.0))
            throw std::invalid_argument("geometric_convolution_check: z outside [0,1)");
        // Green kernel with certified truncation: spectral-gap bound, with
        // the monotone-decay bound dev_n z^{n+1}/(1-z) as the fallback
        // (A_n - pi(N) is non-increasing for SM chains).
        numeric::KahanSum g;
        double zn = 1.0;
        bool converged = false;
        for (std::size_t n = 0; n < dev.size(); ++n) {
            g.add(zn * dev[n]);
            zn *= z;
            const double rem_spec = (lam2 * z < 1.0 && lam2 > 0.0 && c_est > 0.0)
                                        ? c_est * std::pow(lam2 * z, static_cast<double>(n + 1)) /
                                              (1.0 - lam2 * z)
                                        : 1.0;
            const double rem_mono =
                (z < 1.0) ? std::abs(dev[n]) * zn / (1.0 - z) : 1.0;
            if (rem_mono < 1e-13 || rem_spec < 1e-13) {
                converged = true;
                break;
            }
        }
        if (!converged)
            throw std::runtime_error("geometric_convolution_check: truncation not converged at z");
        const double green = pi_N / (1.0 - z) + g.value();
        const double lhs = pi_N / ((1.0 - z) * green);  // (B2)
        // (B5): W1 pgf from its tails.
        numeric::KahanSum sw;
        zn = 1.0;
        for (std::size_t n = 0; n < dev.size(); ++n) {
            sw.add(zn * dev[n] / (1.0 - pi_N));
            zn *= z;
        }
        const double ew1 = 1.0 - (1.0 - z) * sw.value();
        const double rhs = 1.0 / (1.0 + (1.0 - pi_N) / pi_N * (1.0 - ew1));
        const double resid = std::abs(lhs - rhs);
        out.residual_per_z.push_back(resid);
        out.max_residual_b5 = std::max(out.max_residual_b5, resid);

        // (B3a): E(z^{tau_pi0}) = E(z^T) E(z^{tau_piN}).
        numeric::KahanSum s0, sN;
        zn = 1.0;
        for (std::size_t n = 0; n < tail0.size(); ++n) {
            s0.add(zn * tail0[n]);
            sN.add(zn * tailN[n]);
            zn *= z;
        }
        const double pgf_tau0 = 1.0 - (1.0 - z) * s0.value();
        const double pgf_tauN = 1.0 - (1.0 - z) * sN.value();
        numeric::KahanSum st;
        zn = 1.0;
        for (std::size_t n = 0; n < t_cdf.size(); ++n) {
            const double pmf = (n == 0) ? t_cdf[0] : t_cdf[n] - t_cdf[n - 1];
            st.add(zn * pmf);
            zn *= z;
        }
        out.max_residual_b3a =
            std::max(out.max_residual_b3a, std::abs(pgf_tau0 - st.value() * pgf_tauN));
    }
    return out;
}

double mean_T_definition(const chain::TransitionMatrix& tm, const Eigen::VectorXd& pi0,
                         double tol) {
    const Eigen::VectorXd pi = require_pi(tm);
    const double pi_N = pi(tm.N - 1);
    Eigen::RowVectorXd v = pi0.transpose();
    numeric::KahanSum acc;
    for (long n = 0; n < 10000000; ++n) {
        const double sep = 1.0 - v(tm.N - 1) / pi_N;
        acc.add(sep);
        if (sep < tol) return acc.value();
        v *= tm.P;
    }
    throw std::runtime_error("mean_T_definition: horizon exceeded");
}

double mean_T_fundamental(const chain::TransitionMatrix& tm, const Eigen::VectorXd& pi0) {
    const Eigen::VectorXd pi = require_pi(tm);
    const Eigen::MatrixXd Z = fundamental_z(tm, pi);
    return 1.0 - pi0.dot(Z.col(tm.N - 1)) / pi(tm.N - 1);
}

ExponentialBound exponential_bound(const chain::TransitionMatrix& tm,
                                   const Eigen::VectorXd& pi0) {
    const Eigen::VectorXd pi = require_pi(tm);
    const long N = tm.N;
    const double pi_N = pi(N - 1);
    ExponentialBound out;

    // W1 moments through the fundamental matrix (well conditioned).
    const Eigen::MatrixXd Z = fundamental_z(tm, pi);
    const double s1 = Z(N - 1, N - 1) - pi_N;
    const double s2 = (Z * Z)(N - 1, N - 1) - Z(N - 1, N - 1);
    const double ew1 = s1 / (1.0 - pi_N);
    const double ew1sq = (2.0 * s2 + s1) / (1.0 - pi_N);
    out.bound_piN = pi_N * ew1sq / (ew1 * ew1);

    // tau_{pi(N),N} moments in quadruple precision.
    const long m = N - 1;
    {
        auto A = i_minus_q_quad(tm);
        std::vector<quad> ones(static_cast<std::size_t>(m), 1);
        std::vector<quad> u = solve_quad(A, ones);
        std::vector<quad> w = solve_quad(i_minus_q_quad(tm), u);
        quad e_tau = 0, e_tau2 = 0;
        for (long i = 0; i < m; ++i) {
            const quad a = static_cast<quad>(pi(i));
            e_tau += a * u[static_cast<std::size_t>(i)];
            e_tau2 += a * (2 * w[static_cast<std::size_t>(i)] - u[static_cast<std::size_t>(i)]);
        }
        const quad x_minus_1 = e_tau2 / (2 * e_tau * e_tau) - 1;
        out.bound_piN_alt = static_cast<double>(2 * (1 - static_cast<quad>(pi_N)) * x_minus_1);
        out.mean_T = mean_T_fundamental(tm, pi0);
        const double mean_tauN = static_cast<double>(e_tau);
        out.bound_pi0 = out.mean_T / mean_tauN + out.bound_piN_alt;

        // Observed sup distances.
        Qsd q = qsd(tm);
        const double rho = q.rho;
        auto tails_and_sup = [&](const Eigen::VectorXd& start, double mean) {
            std::vector<double> tails;
            Eigen::RowVectorXd a = start.transpose();
            const auto Qm = tm.P.topLeftCorner(m, m);
            double c1 = 0.0;
            for (long n = 0; n < 20000; ++n) {
                tails.push_back(a.sum());
                if (tails.back() < 1e-7) break;
                a *= Qm;
            }
            const double last = tails.back();
            const bool need_extrapolation = last >= 1e-7;
            if (need_extrapolation) {
                const long n_last = static_cast<long>(tails.size()) - 1;
                c1 = last / std::pow(rho, static_cast<double>(n_last));
                // Validate the single-mode regime on the back half.
                const long n_half = n_last / 2;
                const double c1_half =
                    tails[static_cast<std::size_t>(n_half)] / std::pow(rho, static_cast<double>(n_half));
                if (std::abs(c1 - c1_half) > 1e-6 * std::abs(c1))
                    throw std::runtime_error("exponential_bound: dominant mode not settled");
            }
            return observed_sup(tails, mean, rho, c1, need_extrapolation);
        };
        out.observed_sup_piN = tails_and_sup(drop_last(pi), mean_tauN);
        const double mean_tau0 = hitting_mean(tm, pi0);
        out.observed_sup_pi0 = tails_and_sup(drop_last(pi0), mean_tau0);
    }
    return out;
}

std::vector<double> siegmund_pollack_gap(const laws::DiscreteLaw& target,
                                         const std::vector<long>& n_list) {
    std::vector<double> gaps;
    for (long N : n_list) {
        const std::vector<double> piN =
            chain::truncate_target(target, N, chain::TruncationMode::Renormalize);
        design::DesignResult d = design::design_branching_finite(piN, design::Method::Bisection);
        chain::TransitionMatrix tm = chain::build_transition(d.F);
        tm.pi = chain::stationary_distribution(tm);
        Qsd q = qsd(tm);
        Eigen::VectorXd head = drop_last(*tm.pi);
        head /= head.sum();
        gaps.push_back((q.mu - head).lpNorm<Eigen::Infinity>());
    }
    return gaps;
}

HittingReport analyze(const chain::TransitionMatrix& tm, const Eigen::VectorXd& pi0,
                      const AnalyzeOptions& opts) {
    const Eigen::VectorXd pi = require_pi(tm);
    const long N = tm.N;
    const double pi_N = pi(N - 1);
    HittingReport r;
    r.brown_ok = check_brown_condition(pi0, pi);
    if (!r.brown_ok && !opts.forced)
        throw std::invalid_argument("analyze: Brown condition violated (pass forced to override)");

    PowSequences seq = power_sequences(tm, pi0, pi_N, opts.sep_tol, opts.n_cap);
    r.T_cdf = seq.T_cdf;
    r.sep.resize(r.T_cdf.size());
    r.W1_tail.resize(seq.ANN.size());
    for (std::size_t n = 0; n < r.T_cdf.size(); ++n) {
        r.sep[n] = 1.0 - r.T_cdf[n];
        r.W1_tail[n] = (seq.ANN[n] - pi_N) / (1.0 - pi_N);
    }

    const long m = N - 1;
    if (m >= 1) {
        Eigen::RowVectorXd a0 = drop_last(pi0).transpose();
        Eigen::RowVectorXd aN = drop_last(pi).transpose();
        const auto Q = tm.P.topLeftCorner(m, m);
        for (std::size_t n = 0; n < r.T_cdf.size(); ++n) {
            r.tau_tail_pi0.push_back(a0.sum());
            r.tau_tail_piN.push_back(aN.sum());
            a0 *= Q;
            aN *= Q;
        }
        r.mean_tau_pi0 = hitting_mean(tm, pi0);
        r.mean_tau_piN = hitting_mean(tm, pi);
        r.second_moment_tau_piN = hitting_second_moment(tm, pi);
        Qsd q = qsd(tm);
        r.qsd_mu = q.mu;
        r.rho_N = q.rho;
        r.qsd_phi = q.phi;
        r.u_limit = tail_ratio_limit(tm, pi0, pi, r.brown_ok);
        ExponentialBound eb = exponential_bound(tm, pi0);
        r.exp_bound_piN = eb.bound_piN;
        r.exp_bound_pi0 = eb.bound_pi0;
        r.observed_sup_piN = eb.observed_sup_piN;
        r.observed_sup_pi0 = eb.observed_sup_pi0;
        r.mean_T = eb.mean_T;
    }
    return r;
}

void write_report(std::ostream& os, const HittingReport& r) {
    os << std::setprecision(17);
    os << "brown_ok " << (r.brown_ok ? 1 : 0) << "\n";
    os << "mean_T " << r.mean_T << "\n";
    os << "mean_tau_pi0 " << r.mean_tau_pi0 << "\n";
    os << "mean_tau_piN " << r.mean_tau_piN << "\n";
    os << "second_moment_tau_piN " << r.second_moment_tau_piN << "\n";
    os << "rho_N " << r.rho_N << "\n";
    os << "u_limit " << r.u_limit << "\n";
    os << "exp_bound_piN " << r.exp_bound_piN << "\n";
    os << "exp_bound_pi0 " << r.exp_bound_pi0 << "\n";
    os << "observed_sup_piN " << r.observed_sup_piN << "\n";
    os << "observed_sup_pi0 " << r.observed_sup_pi0 << "\n";
    os << "qsd_mu";
    for (long i = 0; i < r.qsd_mu.size(); ++i) os << " " << r.qsd_mu(i);
    os << "\nqsd_phi";
    for (long i = 0; i < r.qsd_phi.size(); ++i) os << " " << r.qsd_phi(i);
    os << "\n# columns: n T_cdf sep W1_tail tau_tail_pi0 tau_tail_piN\n";
    for (std::size_t n = 0; n < r.T_cdf.size(); ++n) {
        os << n << " " << r.T_cdf[n] << " " << r.sep[n] << " " << r.W1_tail[n];
        if (n < r.tau_tail_pi0.size()) os << " " << r.tau_tail_pi0[n] << " " << r.tau_tail_piN[n];
        os << "\n";
    }
}

}  // namespace lamperti::hitting
