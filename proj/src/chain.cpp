#include "lamperti/chain.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "lamperti/numeric.hpp"

namespace lamperti::chain {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Determinant by partial-pivot Gaussian elimination; independent of the
// linear-solve route used for the stationary vector.
double det_inplace(Eigen::MatrixXd m) {
    const long n = m.rows();
    if (n == 0) return 1.0;  // empty-matrix convention
    double det = 1.0;
    for (long c = 0; c < n; ++c) {
        long piv = c;
        for (long r = c + 1; r < n; ++r)
            if (std::abs(m(r, c)) > std::abs(m(piv, c))) piv = r;
        if (m(piv, c) == 0.0) return 0.0;
        if (piv != c) {
            m.row(piv).swap(m.row(c));
            det = -det;
        }
        det *= m(c, c);
        for (long r = c + 1; r < n; ++r) {
            const double f = m(r, c) / m(c, c);
            m.row(r).tail(n - c) -= f * m.row(c).tail(n - c);
        }
    }
    return det;
}

}  // namespace

TransitionMatrix build_transition(const std::vector<double>& Fin) {
    const long N = static_cast<long>(Fin.size());
    if (N < 1) throw std::invalid_argument("build_transition: empty cdf table");
    TransitionMatrix tm;
    tm.N = N;
    tm.F.assign(static_cast<std::size_t>(N + 1), 0.0);
    for (long j = 1; j <= N; ++j) {
        const double f = Fin[static_cast<std::size_t>(j - 1)];
        if (f < 0.0 || f > 1.0) throw std::invalid_argument("build_transition: F outside [0,1]");
        if (f < tm.F[static_cast<std::size_t>(j - 1)])
            throw std::invalid_argument("build_transition: non-monotone F");
        tm.F[static_cast<std::size_t>(j)] = f;
    }
    if (tm.F[static_cast<std::size_t>(N)] != 1.0)
        throw std::invalid_argument("build_transition: F(N) must be exactly 1");

    tm.P.resize(N, N);
    tm.Pc.resize(N, N);
    for (long i = 1; i <= N; ++i) {
        double prev = 0.0;  // F(0)^i
        numeric::KahanSum row;
        for (long j = 1; j <= N; ++j) {
            const double cur = numeric::cdf_pow(tm.F[static_cast<std::size_t>(j)], i);
            const double pij = cur - prev;
            tm.P(i - 1, j - 1) = pij;
            tm.Pc(i - 1, j - 1) = cur;
            row.add(pij);
            prev = cur;
        }
        if (std::abs(row.value() - 1.0) > 1e-10)
            throw std::runtime_error("build_transition: row sum deviates beyond 1e-10");
    }
    return tm;
}

Eigen::VectorXd stationary_distribution(const TransitionMatrix& tm) {
    const long N = tm.N;
    if (N == 1) return Eigen::VectorXd::Ones(1);
    if (N <= 2000) {
        Eigen::MatrixXd A = tm.P.transpose() - Eigen::MatrixXd::Identity(N, N);
        A.row(N - 1).setOnes();
        Eigen::VectorXd b = Eigen::VectorXd::Zero(N);
        b(N - 1) = 1.0;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
        Eigen::VectorXd pi = lu.solve(b);
        if (!pi.allFinite())
            throw std::runtime_error("stationary_distribution: singular system (reducible chain?)");
        for (long i = 0; i < N; ++i) {
            if (pi(i) < -1e-12)
                throw std::runtime_error("stationary_distribution: negative mass (reducible chain?)");
            if (pi(i) < 0.0) pi(i) = 0.0;
        }
        pi /= pi.sum();
        return pi;
    }
    Eigen::VectorXd v = Eigen::VectorXd::Constant(N, 1.0 / static_cast<double>(N));
    for (long it = 0; it < 2000000; ++it) {
        Eigen::VectorXd w = tm.P.transpose() * v;
        w /= w.sum();
        const double delta = (w - v).cwiseAbs().maxCoeff();
        v = w;
        if (delta < 1e-12) return v;
    }
    throw std::runtime_error("stationary_distribution: power iteration did not converge");
}

double kirchhoff_pi(const TransitionMatrix& tm, long j) {
    const long N = tm.N;
    if (j < 1 || j > N) throw std::invalid_argument("kirchhoff_pi: state out of range");
    Eigen::MatrixXd L = Eigen::MatrixXd::Identity(N, N) - tm.P;
    Eigen::MatrixXd minor(N - 1, N - 1);
    for (long r = 0, rr = 0; r < N; ++r) {
        if (r == j - 1) continue;
        for (long c = 0, cc = 0; c < N; ++c) {
            if (c == j - 1) continue;
            minor(rr, cc) = L(r, c);
            ++cc;
        }
        ++rr;
    }
    return det_inplace(std::move(minor));
}

Eigen::VectorXd kirchhoff_vector(const TransitionMatrix& tm) {
    Eigen::VectorXd v(tm.N);
    for (long j = 1; j <= tm.N; ++j) v(j - 1) = kirchhoff_pi(tm, j);
    const double s = v.sum();
    if (!(s > 0.0)) throw std::runtime_error("kirchhoff_vector: degenerate minors");
    return v / s;
}

bool is_stochastically_monotone(const TransitionMatrix& tm) {
    for (long j = 0; j < tm.N; ++j)
        for (long i = 0; i + 1 < tm.N; ++i)
            if (tm.Pc(i + 1, j) > tm.Pc(i, j) + 1e-12) return false;
    return true;
}

bool is_tp2(const Eigen::MatrixXd& Pc) {
    const long N = Pc.rows();
    if (N <= 128) {
        for (long i1 = 0; i1 < N; ++i1)
            for (long i2 = i1 + 1; i2 < N; ++i2)
                for (long j1 = 0; j1 < N; ++j1)
                    for (long j2 = j1 + 1; j2 < N; ++j2)
                        if (Pc(i1, j1) * Pc(i2, j2) < Pc(i1, j2) * Pc(i2, j1) - 1e-12)
                            return false;
        return true;
    }
    // Adjacent minors suffice for strictly positive kernels (Fekete).
    for (long i = 0; i + 1 < N; ++i)
        for (long j = 0; j + 1 < N; ++j)
            if (Pc(i, j) * Pc(i + 1, j + 1) < Pc(i, j + 1) * Pc(i + 1, j) - 1e-12) return false;
    return true;
}

Eigen::MatrixXd time_reverse(const TransitionMatrix& tm, const Eigen::VectorXd& pi) {
    const long N = tm.N;
    if (pi.size() != N) throw std::invalid_argument("time_reverse: dimension mismatch");
    if (pi.minCoeff() <= 0.0)
        throw std::invalid_argument("time_reverse: pi must be strictly positive");
    const double residual = ((pi.transpose() * tm.P).transpose() - pi).cwiseAbs().maxCoeff();
    if (residual > 1e-8)
        throw std::invalid_argument("time_reverse: pi is not stationary for P");
    Eigen::MatrixXd R(N, N);
    for (long i = 0; i < N; ++i)
        for (long j = 0; j < N; ++j) R(i, j) = pi(j) * tm.P(j, i) / pi(i);
    return R;
}

std::vector<double> truncate_target(const laws::DiscreteLaw& target, long N,
                                    TruncationMode mode) {
    if (N < 1) throw std::invalid_argument("truncate_target: N must be >= 1");
    std::vector<double> w(static_cast<std::size_t>(N), 0.0);
    if (mode == TruncationMode::Renormalize) {
        for (long k = 1; k <= N; ++k) w[static_cast<std::size_t>(k - 1)] = target.pmf(k);
    } else {
        for (long k = 1; k < N; ++k) w[static_cast<std::size_t>(k - 1)] = target.pmf(k);
        w[static_cast<std::size_t>(N - 1)] = target.tail(N - 1);
    }
    numeric::KahanSum s;
    for (double v : w) s.add(v);
    if (!(s.value() > 0.0)) throw std::invalid_argument("truncate_target: zero total mass");
    for (double& v : w) v /= s.value();
    return w;
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::PositiveRecurrent: return "PositiveRecurrent";
        case Verdict::NullRecurrent: return "NullRecurrent";
        case Verdict::Transient: return "Transient";
        case Verdict::CriticalOpen: return "CriticalOpen";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

Classification classify(const laws::DiscreteLaw& nu) {
    const double c = numeric::kExpMinusGamma;
    const double D = c * numeric::kPi * numeric::kPi / 12.0;  // (L3) threshold
    const double tol_c = 0.02;
    const double d_band = 0.05;

    Classification out;
    std::vector<int> ks;
    std::vector<double> us, ells;
    for (int k = 8; k <= 40; ++k) {
        const double i = std::ldexp(1.0, k);
        if (i > static_cast<double>(nu.horizon())) break;
        const double t = nu.tail(static_cast<long>(i));
        if (!(t >= 0.0)) throw std::runtime_error("classify: tail evaluator failure");
        ks.push_back(k);
        us.push_back(i * t);
        ells.push_back(i > 0 ? std::log(i) : 0.0);
    }
    if (us.size() < 3) return out;  // Inconclusive by construction

    // Richardson in 1/log i for the limit.
    std::vector<double> extr;
    for (std::size_t m = 1; m < us.size(); ++m)
        extr.push_back((ells[m] * us[m] - ells[m - 1] * us[m - 1]) / (ells[m] - ells[m - 1]));
    const double L = extr.back();
    out.limit_estimate = L;

    const std::size_t take = std::min<std::size_t>(3, extr.size());
    double lo = extr[extr.size() - take], hi = lo;
    for (std::size_t i = extr.size() - take; i < extr.size(); ++i) {
        lo = std::min(lo, extr[i]);
        hi = std::max(hi, extr[i]);
    }
    const bool stable = (hi - lo) <= 0.1 * std::max(c, std::abs(L));

    if (std::abs(L - c) > tol_c * c) {
        out.margin = std::abs(L - c) / c;
        if (!stable && std::abs(L - c) < 0.25 * c) return out;  // unstable near the boundary
        out.verdict = (L < c) ? Verdict::PositiveRecurrent : Verdict::Transient;
        return out;
    }

    // Critical regime: d from (i tail(i) - c) log i on mid-grid pairs; the
    // extreme top of the grid is dominated by 1 - cdf rounding noise.
    std::vector<double> dk, dell;
    for (std::size_t m = 0; m < us.size(); ++m) {
        if (ks[m] > 36) break;
        if (us[m] <= 0.0) continue;
        dk.push_back((us[m] - c) * ells[m]);
        dell.push_back(ells[m]);
    }
    if (dk.size() < 2) return out;
    const std::size_t spacing = std::min<std::size_t>(6, dk.size() - 1);
    const std::size_t hi_idx = dk.size() - 1;
    const std::size_t lo_idx = hi_idx - spacing;
    const double d = (dell[hi_idx] * dk[hi_idx] - dell[lo_idx] * dk[lo_idx]) /
                     (dell[hi_idx] - dell[lo_idx]);
    out.d_estimate = d;
    out.margin = std::min(std::abs(d - D), std::abs(d + D)) / D;
    if (d < -D * (1.0 + d_band)) {
        out.verdict = Verdict::PositiveRecurrent;
    } else if (std::abs(d + D) <= d_band * D) {
        out.verdict = Verdict::Inconclusive;
    } else if (d < D * (1.0 - d_band)) {
        out.verdict = Verdict::NullRecurrent;
    } else if (std::abs(d - D) <= d_band * D) {
        out.verdict = Verdict::CriticalOpen;
    } else {
        out.verdict = Verdict::Transient;
    }
    return out;
}

ExpectedMax expected_max(const laws::DiscreteLaw& nu, long i) {
    if (i < 1) throw std::invalid_argument("expected_max: i must be >= 1");
    ExpectedMax out;
    numeric::KahanSum acc;
    double prev_term = kInf;
    int heavy_hits = 0;
    for (long j = 0;; ++j) {
        const double F = nu.cdf(j);
        const double term = (F <= 0.0) ? 1.0
                            : (F >= 1.0)
                                ? 0.0
                                : -std::expm1(static_cast<double>(i) * std::log(F));
        acc.add(term);
        if (j >= 1 && term <= 0.0) break;
        if (j >= 2 && prev_term > 0.0) {
            const double r = term / prev_term;
            if (r < 0.9 && term * r / (1.0 - r) < 1e-12 * std::max(1.0, acc.value())) break;
        }
        prev_term = term;
        if (j > 4096 && (j & (j - 1)) == 0) {
            heavy_hits =
                (static_cast<double>(j) * term > 1e-3 * static_cast<double>(i)) ? heavy_hits + 1
                                                                                : 0;
            if (heavy_hits >= 2) {
                out.infinite = true;
                out.value = kInf;
                return out;
            }
        }
        if (j > 50000000L) {
            out.infinite = true;
            out.value = kInf;
            return out;
        }
    }
    out.value = acc.value();
    return out;
}

std::optional<long> foster_drift_threshold(const laws::DiscreteLaw& nu, long i_max) {
    std::vector<long> samples;
    for (long i = 1; i <= std::min<long>(i_max, 64); ++i) samples.push_back(i);
    for (long i = 128; i <= i_max; i *= 2) samples.push_back(i);
    if (samples.empty() || samples.back() != i_max) samples.push_back(i_max);

    std::optional<long> threshold;
    for (std::size_t idx = samples.size(); idx-- > 0;) {
        const long i = samples[idx];
        ExpectedMax em = expected_max(nu, i);
        if (em.infinite || em.value > static_cast<double>(i - 1)) break;
        threshold = i;
    }
    return threshold;
}

WorstStateStats worst_state_stats(const TransitionMatrix& tm, const Eigen::VectorXd& pi) {
    if (!(pi(0) > 0.0)) throw std::invalid_argument("worst_state_stats: pi(1) must be positive");
    WorstStateStats s;
    const double F1 = tm.F[1];
    s.mean_return = 1.0 / pi(0);
    s.occupation_rho = F1 * pi(0);
    s.mean_positive_excursion =
        (tm.N == 1) ? kInf : (1.0 / (1.0 - F1)) * (1.0 / pi(0) - F1);
    return s;
}

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
    os << m.rows() << "\n";
    os << std::setprecision(17);
    for (long i = 0; i < m.rows(); ++i) {
        for (long j = 0; j < m.cols(); ++j) os << m(i, j) << (j + 1 < m.cols() ? " " : "");
        os << "\n";
    }
}

namespace {
std::string next_data_line(std::istream& is) {
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line[0] != '#') return line;
    }
    throw std::runtime_error("matrix io: unexpected end of stream");
}
}  // namespace

Eigen::MatrixXd read_matrix(std::istream& is) {
    const long n = std::stol(next_data_line(is));
    Eigen::MatrixXd m(n, n);
    for (long i = 0; i < n; ++i) {
        std::istringstream row(next_data_line(is));
        for (long j = 0; j < n; ++j) row >> m(i, j);
    }
    return m;
}

void write_vector(std::ostream& os, const Eigen::VectorXd& v) {
    os << v.size() << "\n";
    os << std::setprecision(17);
    for (long i = 0; i < v.size(); ++i) os << v(i) << "\n";
}

Eigen::VectorXd read_vector(std::istream& is) {
    const long n = std::stol(next_data_line(is));
    Eigen::VectorXd v(n);
    for (long i = 0; i < n; ++i) v(i) = std::stod(next_data_line(is));
    return v;
}

}  // namespace lamperti::chain
