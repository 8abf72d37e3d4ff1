#include "lamperti/laws.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lamperti/numeric.hpp"

namespace lamperti::laws {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

long geometric_horizon(double q) {
    if (q <= 0.0) return 8;
    const double h = -14.0 * std::log(10.0) / std::log(q);
    return std::max<long>(1000, static_cast<long>(h) + 8);
}

// Gamma(j + 1 - a) / (Gamma(1 - a) Gamma(j + 1)), the Sibuya tail [1-a]_j/j!,
// stable for all representable j.
double sibuya_tail(double alpha, double j) {
    if (j <= 0.0) return 1.0;
    if (j > 1e8) {
        // Stirling ratio: Gamma(j+1-a)/Gamma(j+1) ~ j^{-a}(1 + a(a-1)/(2j)).
        const double lead = std::exp(-alpha * std::log(j)) / numeric::gamma_fn(1.0 - alpha);
        return lead * (1.0 + alpha * (alpha - 1.0) / (2.0 * j));
    }
    return std::exp(numeric::log_gamma(j + 1.0 - alpha) - numeric::log_gamma(1.0 - alpha) -
                    numeric::log_gamma(j + 1.0));
}

// Tail of the zeta series: sum_{k>j} k^{-a}, Euler-Maclaurin at m = j+1.
double zeta_tail(double alpha, double j) {
    const double m = j + 1.0;
    double s = std::pow(m, 1.0 - alpha) / (alpha - 1.0);
    s += 0.5 * std::pow(m, -alpha);
    s += alpha / 12.0 * std::pow(m, -alpha - 1.0);
    s -= alpha * (alpha + 1.0) * (alpha + 2.0) / 720.0 * std::pow(m, -alpha - 3.0);
    return s;
}

void check_prob(double p, const char* who) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument(std::string(who) + ": p outside (0,1)");
}

}  // namespace

DiscreteLaw::DiscreteLaw(std::string label, SupportKind kind, long finite_n, long support_min,
                         long horizon, std::function<double(long)> pmf,
                         std::function<double(long)> cdf,
                         std::function<double(double)> closed_pgf)
    : label_(std::move(label)),
      kind_(kind),
      finite_n_(finite_n),
      support_min_(support_min),
      horizon_(horizon),
      pmf_(std::move(pmf)),
      cdf_(std::move(cdf)),
      closed_pgf_(std::move(closed_pgf)) {}

double DiscreteLaw::pmf(long j) const {
    if (j < support_min_) return 0.0;
    if (finite() && j > finite_n_) return 0.0;
    return pmf_(j);
}

double DiscreteLaw::cdf(long j) const {
    if (j < support_min_) return 0.0;
    if (finite() && j >= finite_n_) return 1.0;
    return cdf_(j);
}

double DiscreteLaw::closed_pgf(double z) const {
    if (!closed_pgf_) throw std::logic_error("DiscreteLaw: no closed pgf for " + label_);
    return closed_pgf_(z);
}

double DiscreteLaw::mean(double tol) const {
    // E(X) = sum_{j>=0} P(X > j); detect non-summable tails.
    numeric::KahanSum acc;
    int heavy_hits = 0;
    for (long j = 0;; ++j) {
        const double t = tail(j);
        acc.add(t);
        if (t <= tol * (1.0 + acc.value())) return acc.value();
        if (j > 4096 && (j & (j - 1)) == 0) {
            // Dyadic probe: j*tail(j) bounded away from 0 means no finite mean.
            heavy_hits = (static_cast<double>(j) * t > 1e-3) ? heavy_hits + 1 : 0;
            if (heavy_hits >= 2) return kInf;
        }
        if (j > 100000000L) return kInf;
    }
}

DiscreteLaw from_pmf_vector(const std::string& label, const std::vector<double>& pmf,
                            long support_min) {
    std::vector<double> cdf(pmf.size());
    numeric::KahanSum acc;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        if (pmf[i] < 0.0) throw std::invalid_argument("from_pmf_vector: negative mass");
        acc.add(pmf[i]);
        cdf[i] = acc.value();
    }
    if (std::abs(acc.value() - 1.0) > 1e-12)
        throw std::invalid_argument("from_pmf_vector: masses do not sum to 1");
    const long n = support_min + static_cast<long>(pmf.size()) - 1;
    auto pm = [pmf, support_min](long j) -> double {
        const long i = j - support_min;
        if (i < 0 || i >= static_cast<long>(pmf.size())) return 0.0;
        return pmf[static_cast<std::size_t>(i)];
    };
    auto cd = [cdf, support_min](long j) -> double {
        const long i = j - support_min;
        if (i < 0) return 0.0;
        if (i >= static_cast<long>(cdf.size())) return 1.0;
        return cdf[static_cast<std::size_t>(i)];
    };
    auto pg = [pmf, support_min](double z) -> double {
        double acc2 = 0.0;
        for (std::size_t i = pmf.size(); i-- > 0;) acc2 = acc2 * z + pmf[i];
        return acc2 * std::pow(z, static_cast<double>(support_min));
    };
    return DiscreteLaw(label, SupportKind::Finite, n, support_min, n, pm, cd, pg);
}

PositiveMeasure::PositiveMeasure(std::string label, bool summable,
                                 std::function<double(long)> delta,
                                 std::function<double(long)> partial_sum,
                                 std::function<double(double)> closed_pgf)
    : label_(std::move(label)),
      summable_(summable),
      delta_(std::move(delta)),
      partial_(std::move(partial_sum)),
      closed_pgf_(std::move(closed_pgf)) {}

double PositiveMeasure::delta(long j) const {
    if (j < 1) return 0.0;
    return delta_(j);
}

double PositiveMeasure::partial_sum(long j) const {
    if (j < 1) return 0.0;
    return partial_(j);
}

double PositiveMeasure::closed_pgf(double z) const {
    if (!closed_pgf_) throw std::logic_error("PositiveMeasure: no closed pgf for " + label_);
    return closed_pgf_(z);
}

double logtail_norm_constant(double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("logtail: beta must be > 0");
    numeric::KahanSum acc;
    const long J = 1000000;
    for (long j = 1; j <= J; ++j) {
        const double L = std::log1p(static_cast<double>(j));
        acc.add(1.0 / (static_cast<double>(j) * std::pow(L, beta + 1.0)));
    }
    // Midpoint Euler-Maclaurin tail: integral of 1/((1+x) L^{b+1}) is
    // 1/(b L^b); the 1/(x(1+x)) remainder integral gets a frozen-L estimate.
    const double m = static_cast<double>(J) + 0.5;
    const double u0 = std::log1p(m);
    double tail = 1.0 / (beta * std::pow(u0, beta));
    tail += std::log1p(1.0 / m) / std::pow(u0, beta + 1.0);
    return 1.0 / (acc.value() + tail);
}

double logtail_target_tail(double beta, double c0, double j) {
    if (j < 1.0) return 1.0;
    if (j <= 1e6) {
        numeric::KahanSum acc;
        const long jj = static_cast<long>(j);
        for (long k = 1; k <= jj; ++k) {
            const double L = std::log1p(static_cast<double>(k));
            acc.add(1.0 / (static_cast<double>(k) * std::pow(L, beta + 1.0)));
        }
        return 1.0 - c0 * acc.value();
    }
    const double m = j + 0.5;
    const double u0 = std::log1p(m);
    double tail = 1.0 / (beta * std::pow(u0, beta));
    tail += std::log1p(1.0 / m) / std::pow(u0, beta + 1.0);
    return c0 * tail;
}

bool is_measure_family(const std::string& name) {
    return name == "counting" || name == "linear" || name == "harmonic";
}

Target make_target(const std::string& name, const FamilyParams& par) {
    using SK = SupportKind;
    if (name == "geometric") {
        const double p = par.p;
        if (p == 1.0) return make_target("delta1", par);
        check_prob(p, "geometric");
        const double q = 1.0 - p;
        return DiscreteLaw(
            "geometric", SK::Countable, -1, 1, geometric_horizon(q),
            [p, q](long j) { return p * std::pow(q, static_cast<double>(j - 1)); },
            [q](long j) { return 1.0 - std::pow(q, static_cast<double>(j)); },
            [p, q](double z) { return p * z / (1.0 - q * z); });
    }
    if (name == "delta1") {
        return DiscreteLaw(
            "delta1", SK::Finite, 1, 1, 1, [](long j) { return j == 1 ? 1.0 : 0.0; },
            [](long j) { return j >= 1 ? 1.0 : 0.0; }, [](double z) { return z; });
    }
    if (name == "negbin-positive") {
        const double p = par.p, a = par.alpha;
        check_prob(p, "negbin-positive");
        if (!(a > 0.0)) throw std::invalid_argument("negbin-positive: alpha must be > 0");
        const double q = 1.0 - p;
        const double norm = 1.0 - std::pow(p, a);
        auto pmf = [p, q, a, norm](long j) {
            // p^a [a]_j q^j / (j! (1-p^a))
            const double lg = a * std::log(p) + numeric::log_gamma(a + static_cast<double>(j)) -
                              numeric::log_gamma(a) - numeric::log_gamma(static_cast<double>(j) + 1.0) +
                              static_cast<double>(j) * std::log(q);
            return std::exp(lg) / norm;
        };
        auto cdf = [pmf](long j) {
            numeric::KahanSum acc;
            for (long k = 1; k <= j; ++k) acc.add(pmf(k));
            return acc.value();
        };
        auto pgf = [p, q, a, norm](double z) {
            return (std::pow(p / (1.0 - q * z), a) - std::pow(p, a)) / norm;
        };
        return DiscreteLaw("negbin-positive", SK::Countable, -1, 1, geometric_horizon(q), pmf,
                           cdf, pgf);
    }
    if (name == "negbin-shifted") {
        const double p = par.p, a = par.alpha;
        check_prob(p, "negbin-shifted");
        if (!(a > 0.0)) throw std::invalid_argument("negbin-shifted: alpha must be > 0");
        const double q = 1.0 - p;
        auto pmf = [p, q, a](long k) {
            const double j = static_cast<double>(k - 1);
            const double lg = a * std::log(p) + numeric::log_gamma(a + j) -
                              numeric::log_gamma(a) - numeric::log_gamma(j + 1.0) +
                              j * std::log(q);
            return std::exp(lg);
        };
        auto cdf = [pmf](long j) {
            numeric::KahanSum acc;
            for (long k = 1; k <= j; ++k) acc.add(pmf(k));
            return acc.value();
        };
        auto pgf = [p, q, a](double z) { return z * std::pow(p / (1.0 - q * z), a); };
        return DiscreteLaw("negbin-shifted", SK::Countable, -1, 1, geometric_horizon(q), pmf, cdf,
                           pgf);
    }
    if (name == "fisher-log") {
        const double p = par.p;
        check_prob(p, "fisher-log");
        const double c = -std::log1p(-p);
        auto pmf = [p, c](long k) {
            return std::exp(static_cast<double>(k) * std::log(p)) / (c * static_cast<double>(k));
        };
        auto cdf = [pmf](long j) {
            numeric::KahanSum acc;
            for (long k = 1; k <= j; ++k) acc.add(pmf(k));
            return acc.value();
        };
        auto pgf = [p, c](double z) { return -std::log1p(-p * z) / c; };
        return DiscreteLaw("fisher-log", SK::Countable, -1, 1, geometric_horizon(p), pmf, cdf,
                           pgf);
    }
    if (name == "sibuya") {
        const double a = par.alpha;
        if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("sibuya: alpha outside (0,1)");
        auto pmf = [a](long j) {
            return a / static_cast<double>(j) * sibuya_tail(a, static_cast<double>(j - 1));
        };
        auto cdf = [a](long j) { return 1.0 - sibuya_tail(a, static_cast<double>(j)); };
        auto pgf = [a](double z) { return 1.0 - std::pow(1.0 - z, a); };
        return DiscreteLaw("sibuya", SK::Countable, -1, 1, 1000000, pmf, cdf, pgf);
    }
    if (name == "pareto") {
        const double a = par.alpha;
        if (!(a > 0.0)) throw std::invalid_argument("pareto: alpha must be > 0");
        auto pmf = [a](long j) {
            const double x = static_cast<double>(j);
            return std::pow(x, -a) * (-std::expm1(-a * std::log1p(1.0 / x)));
        };
        auto cdf = [a](long j) { return 1.0 - std::pow(static_cast<double>(j) + 1.0, -a); };
        return DiscreteLaw("pareto", SK::Countable, -1, 1, 1000000, pmf, cdf, nullptr);
    }
    if (name == "zipf") {
        const double a = par.alpha;
        if (!(a > 1.0)) throw std::invalid_argument("zipf: alpha must be > 1");
        const double zeta = numeric::riemann_zeta(a);
        auto pmf = [a, zeta](long j) { return std::pow(static_cast<double>(j), -a) / zeta; };
        auto cdf = [a, zeta, pmf](long j) {
            if (j > 10000) return 1.0 - zeta_tail(a, static_cast<double>(j)) / zeta;
            numeric::KahanSum acc;
            for (long k = 1; k <= j; ++k) acc.add(pmf(k));
            return acc.value();
        };
        return DiscreteLaw("zipf", SK::Countable, -1, 1, 1000000, pmf, cdf, nullptr);
    }
    if (name == "logtail") {
        const double b = par.beta;
        const double c0 = logtail_norm_constant(b);
        auto pmf = [b, c0](long j) {
            const double L = std::log1p(static_cast<double>(j));
            return c0 / (static_cast<double>(j) * std::pow(L, b + 1.0));
        };
        auto cdf = [b, c0](long j) {
            return 1.0 - logtail_target_tail(b, c0, static_cast<double>(j));
        };
        return DiscreteLaw("logtail", SK::Countable, -1, 1, 1000000, pmf, cdf, nullptr);
    }
    if (name == "shifted-poisson") {
        const double lam = par.lambda;
        if (!(lam > 0.0)) throw std::invalid_argument("shifted-poisson: lambda must be > 0");
        auto pmf = [lam](long k) {
            const double j = static_cast<double>(k - 1);
            return std::exp(-lam + j * std::log(lam) - numeric::log_gamma(j + 1.0));
        };
        auto cdf = [pmf](long j) {
            numeric::KahanSum acc;
            for (long k = 1; k <= j; ++k) acc.add(pmf(k));
            return acc.value();
        };
        auto pgf = [lam](double z) { return z * std::exp(lam * (z - 1.0)); };
        const long h = static_cast<long>(lam + 40.0 * std::sqrt(lam) + 60.0);
        return DiscreteLaw("shifted-poisson", SK::Countable, -1, 1, std::max<long>(1000, h), pmf,
                           cdf, pgf);
    }
    if (name == "poisson-positive") {
        const double lam = par.lambda;
        if (!(lam > 0.0)) throw std::invalid_argument("poisson-positive: lambda must be > 0");
        const double norm = std::expm1(lam);
        auto pmf = [lam, norm](long k) {
            const double j = static_cast<double>(k);
            return std::exp(j * std::log(lam) - numeric::log_gamma(j + 1.0)) / norm;
        };
        auto cdf = [pmf](long j) {
            numeric::KahanSum acc;
            for (long k = 1; k <= j; ++k) acc.add(pmf(k));
            return acc.value();
        };
        auto pgf = [lam, norm](double z) { return std::expm1(lam * z) / norm; };
        const long h = static_cast<long>(lam + 40.0 * std::sqrt(lam) + 60.0);
        return DiscreteLaw("poisson-positive", SK::Countable, -1, 1, std::max<long>(1000, h), pmf,
                           cdf, pgf);
    }
    if (name == "binomial-restricted") {
        const long N = par.n;
        const double p = par.p;
        if (N < 1) throw std::invalid_argument("binomial-restricted: N must be >= 1");
        check_prob(p, "binomial-restricted");
        const double q = 1.0 - p;
        const double norm = 1.0 - std::pow(q, static_cast<double>(N));
        auto pmf = [N, p, q, norm](long k) {
            if (k < 1 || k > N) return 0.0;
            const double lg = numeric::log_gamma(static_cast<double>(N) + 1.0) -
                              numeric::log_gamma(static_cast<double>(k) + 1.0) -
                              numeric::log_gamma(static_cast<double>(N - k) + 1.0) +
                              static_cast<double>(k) * std::log(p) +
                              static_cast<double>(N - k) * std::log(q);
            return std::exp(lg) / norm;
        };
        auto cdf = [pmf](long j) {
            numeric::KahanSum acc;
            for (long k = 1; k <= j; ++k) acc.add(pmf(k));
            return acc.value();
        };
        auto pgf = [N, p, q, norm](double z) {
            return (std::pow(q + p * z, static_cast<double>(N)) -
                    std::pow(q, static_cast<double>(N))) /
                   norm;
        };
        return DiscreteLaw("binomial-restricted", SK::Finite, N, 1, N, pmf, cdf, pgf);
    }
    if (name == "binomial-shifted") {
        const long N = par.n;
        const double p = par.p;
        if (N < 1) throw std::invalid_argument("binomial-shifted: N must be >= 1");
        check_prob(p, "binomial-shifted");
        const double q = 1.0 - p;
        auto pmf = [N, p, q](long k) {
            if (k < 1 || k > N) return 0.0;
            const double m = static_cast<double>(N - 1), i = static_cast<double>(k - 1);
            const double lg = numeric::log_gamma(m + 1.0) - numeric::log_gamma(i + 1.0) -
                              numeric::log_gamma(m - i + 1.0) + i * std::log(p) +
                              (m - i) * std::log(q);
            return std::exp(lg);
        };
        auto cdf = [pmf](long j) {
            numeric::KahanSum acc;
            for (long k = 1; k <= j; ++k) acc.add(pmf(k));
            return acc.value();
        };
        auto pgf = [N, p, q](double z) {
            return z * std::pow(q + p * z, static_cast<double>(N - 1));
        };
        return DiscreteLaw("binomial-shifted", SK::Finite, N, 1, N, pmf, cdf, pgf);
    }
    if (name == "counting") {
        return PositiveMeasure(
            "counting", false, [](long) { return 1.0; },
            [](long j) { return static_cast<double>(j); },
            [](double z) { return z / (1.0 - z); });
    }
    if (name == "linear") {
        return PositiveMeasure(
            "linear", false, [](long j) { return static_cast<double>(j); },
            [](long j) {
                const double x = static_cast<double>(j);
                return x * (x + 1.0) / 2.0;
            },
            [](double z) { return z / ((1.0 - z) * (1.0 - z)); });
    }
    if (name == "harmonic") {
        return PositiveMeasure(
            "harmonic", false, [](long j) { return 1.0 / static_cast<double>(j); },
            [](long j) { return numeric::harmonic_number(static_cast<double>(j)); },
            [](double z) { return -std::log1p(-z); });
    }
    throw std::invalid_argument("make_target: unknown family '" + name + "'");
}

double pgf_eval(const DiscreteLaw& law, double z, double tol) {
    if (z < 0.0 || z > 1.0) throw std::domain_error("pgf_eval: z outside [0,1]");
    if (z == 1.0) return 1.0;
    if (z == 0.0) return law.pmf(0);  // support starting at 1 gives 0
    numeric::KahanSum acc;
    double zj = std::pow(z, static_cast<double>(law.support_min()));
    const long top = law.finite() ? law.finite_n() : (1L << 62);
    double cur = law.pmf(law.support_min());
    for (long j = law.support_min(); j <= top; ++j) {
        const double term = zj * cur;
        acc.add(term);
        if (j >= top) break;
        // Once the mass ratio settles below 1 the remainder is bounded by
        // the geometric tail term * r/(1-r). The cdf is deliberately not
        // consulted here: for slowly-closing families it costs O(j) a call.
        const double next = law.pmf(j + 1);
        if (cur > 0.0) {
            const double r = z * next / cur;
            if (r < 1.0 - 1e-15 && j >= 4 && term * r / (1.0 - r) < tol) break;
        } else if (term == 0.0 && j > law.horizon()) {
            break;
        }
        cur = next;
        zj *= z;
        if (j > 200000000L) throw std::runtime_error("pgf_eval: truncation cap reached");
    }
    return acc.value();
}

double pgf_eval(const PositiveMeasure& mu, double z, double tol) {
    if (z < 0.0 || z >= 1.0) {
        if (z == 1.0 && !mu.summable())
            throw std::domain_error("pgf_eval: z = 1 on a non-summable measure");
        if (z < 0.0 || z > 1.0) throw std::domain_error("pgf_eval: z outside [0,1)");
    }
    if (z == 0.0) return 0.0;
    numeric::KahanSum acc;
    double zj = z;
    for (long j = 1;; ++j) {
        const double term = zj * mu.delta(j);
        acc.add(term);
        const double next = mu.delta(j + 1);
        const double cur = mu.delta(j);
        if (cur > 0.0 && next >= 0.0) {
            const double r = z * next / cur;
            if (r < 1.0 - 1e-15 && term * r / (1.0 - r) < tol && j >= 4) break;
        }
        zj *= z;
        if (j > 200000000L) throw std::runtime_error("pgf_eval: truncation cap reached");
    }
    return acc.value();
}

double extinction_probability(const DiscreteLaw& nu) {
    if (!(nu.pmf(0) > 0.0))
        throw std::invalid_argument("extinction_probability: requires P(nu=0) > 0");
    const double m = nu.mean();
    if (m <= 1.0) return 1.0;
    auto phi = [&nu](double z) {
        return nu.has_closed_pgf() ? nu.closed_pgf(z) : pgf_eval(nu, z);
    };
    // g(z) = phi(z) - z is positive at 0, negative just left of 1.
    double hi = 0.5;
    while (phi(hi) - hi > 0.0) {
        hi = 0.5 * (1.0 + hi);
        if (1.0 - hi < 1e-14)
            throw std::runtime_error("extinction_probability: no sign change found");
    }
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (phi(mid) - mid > 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-16 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

DiscreteLaw condition_on_extinction(const DiscreteLaw& nu) {
    const double rho = extinction_probability(nu);
    if (!(rho > 0.0 && rho < 1.0))
        throw std::invalid_argument("condition_on_extinction: rho_e must lie in (0,1)");
    auto pmf = [nu, rho](long j) {
        return nu.pmf(j) * std::pow(rho, static_cast<double>(j - 1));
    };
    auto cdf = [pmf](long j) {
        numeric::KahanSum acc;
        for (long k = 0; k <= j; ++k) acc.add(pmf(k));
        return acc.value();
    };
    std::function<double(double)> pgf = nullptr;
    if (nu.has_closed_pgf()) pgf = [nu, rho](double z) { return nu.closed_pgf(z * rho) / rho; };
    const long n = nu.finite() ? nu.finite_n() : -1;
    return DiscreteLaw(nu.label() + "|extinction", nu.support(), n, 0, nu.horizon(), pmf, cdf,
                       pgf);
}

DiscreteLaw condition_on_explosion(const DiscreteLaw& nu) {
    const double rho = extinction_probability(nu);
    if (!(rho > 0.0 && rho < 1.0))
        throw std::invalid_argument("condition_on_explosion: rho_e must lie in (0,1)");
    const long top = nu.finite() ? nu.finite_n() : nu.horizon();
    auto pmf = [nu, rho, top](long j) -> double {
        if (j < 1) return 0.0;  // P(nu_explosion = 0) = 0
        // (1-rho)^{j-1} sum_{k>=j} C(k,j) p(k) rho^{k-j}
        numeric::KahanSum acc;
        for (long k = j; k <= top; ++k) {
            const double pk = nu.pmf(k);
            if (pk == 0.0) continue;
            const double lg = numeric::log_gamma(static_cast<double>(k) + 1.0) -
                              numeric::log_gamma(static_cast<double>(j) + 1.0) -
                              numeric::log_gamma(static_cast<double>(k - j) + 1.0) +
                              static_cast<double>(k - j) * std::log(rho);
            acc.add(std::exp(lg) * pk);
        }
        return std::pow(1.0 - rho, static_cast<double>(j - 1)) * acc.value();
    };
    auto cdf = [pmf](long j) {
        numeric::KahanSum acc;
        for (long k = 1; k <= j; ++k) acc.add(pmf(k));
        return acc.value();
    };
    std::function<double(double)> pgf = nullptr;
    if (nu.has_closed_pgf())
        pgf = [nu, rho](double z) {
            return (nu.closed_pgf(rho + z * (1.0 - rho)) - rho) / (1.0 - rho);
        };
    const long n = nu.finite() ? nu.finite_n() : -1;
    return DiscreteLaw(nu.label() + "|explosion", nu.support(), n, 0, nu.horizon(), pmf, cdf,
                       pgf);
}

bool cm_check(const DiscreteLaw& law, int k_max, long j_max) {
    if (k_max < 1) throw std::invalid_argument("cm_check: k_max must be >= 1");
    std::vector<double> d(static_cast<std::size_t>(j_max + k_max + 1));
    for (long j = 0; j <= j_max + k_max; ++j) d[static_cast<std::size_t>(j)] = law.tail(j);
    for (int k = 1; k <= k_max; ++k) {
        for (std::size_t j = 0; j + 1 < d.size(); ++j) d[j] = d[j + 1] - d[j];
        d.pop_back();
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        for (long j = 0; j <= j_max && j < static_cast<long>(d.size()); ++j)
            if (sign * d[static_cast<std::size_t>(j)] < -1e-12) return false;
    }
    return true;
}

}  // namespace lamperti::laws
