#include "lamperti/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lamperti/numeric.hpp"

namespace lamperti::montecarlo {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
}  // namespace

SplitMix64 SplitMix64::for_replica(std::uint64_t seed, std::uint64_t replica) {
    return SplitMix64(mix(seed + (replica + 1) * kGamma));
}

std::uint64_t SplitMix64::next() {
    state_ += kGamma;
    return mix(state_);
}

double SplitMix64::uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

Stepper::Stepper(std::vector<double> cdf_table) : table_(std::move(cdf_table)) {
    if (table_.empty()) throw std::invalid_argument("Stepper: empty cdf table");
    state_cap_ = static_cast<long>(table_.size());
    for (std::size_t i = 1; i < table_.size(); ++i)
        if (table_[i] < table_[i - 1]) throw std::invalid_argument("Stepper: non-monotone cdf");
    if (std::abs(table_.back() - 1.0) > 1e-9)
        throw std::invalid_argument("Stepper: cdf table must end at 1");
    table_.back() = 1.0;
}

Stepper::Stepper(laws::DiscreteLaw nu, long state_cap)
    : law_(std::move(nu)), state_cap_(state_cap) {}

double Stepper::cdf(long j) const {
    if (!table_.empty()) {
        if (j < 1) return 0.0;
        if (j > static_cast<long>(table_.size())) return 1.0;
        return table_[static_cast<std::size_t>(j - 1)];
    }
    return law_->cdf(j);
}

long Stepper::step(long x, double u) const {
    // y = u^{1/x}; log(u)/x below -745 underflows exp to 0, which the
    // inverse cdf resolves to the lowest support point.
    double y;
    if (u <= 0.0) {
        y = 0.0;
    } else {
        const double e = std::log(u) / static_cast<double>(x);
        y = (e < -745.0) ? 0.0 : std::exp(e);
    }
    if (!table_.empty()) {
        // First j with F(j) >= y.
        const auto it = std::lower_bound(table_.begin(), table_.end(), y);
        return static_cast<long>(it - table_.begin()) + 1;
    }
    if (y <= cdf(1)) return 1;
    // Gallop from the current state, then binary search the bracket.
    long lo = 1, hi = std::max<long>(2, x);
    while (cdf(hi) < y) {
        lo = hi;
        if (hi > state_cap_ / 2) return state_cap_ + 1;  // divergence sentinel
        hi *= 2;
    }
    while (lo + 1 < hi) {
        const long mid = lo + (hi - lo) / 2;
        if (cdf(mid) >= y)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

std::vector<long> simulate_path(const Stepper& st, const SimConfig& cfg, std::uint64_t replica,
                                bool* diverged) {
    if (cfg.steps <= cfg.burn_in || cfg.burn_in < 0)
        throw std::invalid_argument("simulate_path: need steps > burn_in >= 0");
    if (cfg.replicas < 1) throw std::invalid_argument("simulate_path: replicas >= 1");
    SplitMix64 rng = SplitMix64::for_replica(cfg.seed, replica);
    std::vector<long> path;
    path.reserve(static_cast<std::size_t>(cfg.steps) + 1);
    long x = cfg.x0;
    path.push_back(x);
    if (diverged) *diverged = false;
    for (long n = 0; n < cfg.steps; ++n) {
        x = st.step(x, rng.uniform());
        if (x > st.state_cap()) {
            if (diverged) *diverged = true;
            break;
        }
        path.push_back(x);
    }
    return path;
}

namespace {

Estimate batch_mean_estimate(const std::vector<double>& batch_means) {
    Estimate e;
    if (batch_means.empty()) return e;
    double mean = 0.0;
    for (double v : batch_means) mean += v;
    mean /= static_cast<double>(batch_means.size());
    double var = 0.0;
    for (double v : batch_means) var += (v - mean) * (v - mean);
    var = batch_means.size() > 1 ? var / static_cast<double>(batch_means.size() - 1) : 0.0;
    e.value = mean;
    e.stderr_est = std::sqrt(var / static_cast<double>(batch_means.size()));
    return e;
}

}  // namespace

SimSummary summarize(const Stepper& st, const SimConfig& cfg) {
    SimSummary s;
    s.seed = cfg.seed;
    constexpr int kBatches = 32;

    std::vector<std::vector<long>> paths;
    long max_state = 1;
    for (long r = 0; r < cfg.replicas; ++r) {
        bool div = false;
        std::vector<long> p = simulate_path(st, cfg, static_cast<std::uint64_t>(r), &div);
        if (div) {
            ++s.diverged_replicas;
            continue;
        }
        for (std::size_t i = static_cast<std::size_t>(cfg.burn_in) + 1; i < p.size(); ++i)
            max_state = std::max(max_state, p[i]);
        paths.push_back(std::move(p));
    }
    if (paths.empty()) throw std::runtime_error("summarize: all replicas diverged");

    std::vector<numeric::KahanSum> occ(static_cast<std::size_t>(max_state));
    std::vector<std::vector<double>> occ_batches(static_cast<std::size_t>(max_state));
    std::vector<double> exc_batches;
    std::vector<long> returns;
    double state_sum = 0.0;
    long total_steps = 0;
    double exc_count = 0.0;

    for (const auto& p : paths) {
        const long first = cfg.burn_in + 1;
        const long count = static_cast<long>(p.size()) - first;
        if (count <= 0) continue;
        total_steps += count;
        const long batch_len = std::max<long>(1, count / kBatches);
        std::vector<std::vector<long>> occ_tally(static_cast<std::size_t>(max_state),
                                                 std::vector<long>(kBatches, 0));
        std::vector<long> exc_tally(kBatches, 0);
        long last_visit = -1;
        for (long i = first; i < static_cast<long>(p.size()); ++i) {
            const long x = p[static_cast<std::size_t>(i)];
            occ[static_cast<std::size_t>(x - 1)].add(1.0);
            state_sum += static_cast<double>(x);
            const bool continuing_in_one = (x == 1 && p[static_cast<std::size_t>(i - 1)] == 1);
            if (continuing_in_one) exc_count += 1.0;
            const long b = (i - first) / batch_len;
            if (b < kBatches) {  // the remainder tail joins the point estimate only
                ++occ_tally[static_cast<std::size_t>(x - 1)][static_cast<std::size_t>(b)];
                if (continuing_in_one) ++exc_tally[static_cast<std::size_t>(b)];
            }
            if (x == 1) {
                if (last_visit >= 0) returns.push_back(i - last_visit);
                last_visit = i;
            }
        }
        for (long k = 0; k < max_state; ++k)
            for (int b = 0; b < kBatches; ++b)
                occ_batches[static_cast<std::size_t>(k)].push_back(
                    static_cast<double>(occ_tally[static_cast<std::size_t>(k)][static_cast<std::size_t>(b)]) /
                    static_cast<double>(batch_len));
        for (int b = 0; b < kBatches; ++b)
            exc_batches.push_back(static_cast<double>(exc_tally[static_cast<std::size_t>(b)]) /
                                  static_cast<double>(batch_len));
    }

    s.occupation.resize(static_cast<std::size_t>(max_state));
    s.occupation_stderr.resize(static_cast<std::size_t>(max_state));
    for (long k = 0; k < max_state; ++k) {
        s.occupation[static_cast<std::size_t>(k)] =
            occ[static_cast<std::size_t>(k)].value() / static_cast<double>(total_steps);
        s.occupation_stderr[static_cast<std::size_t>(k)] =
            batch_mean_estimate(occ_batches[static_cast<std::size_t>(k)]).stderr_est;
    }
    s.mean_state = state_sum / static_cast<double>(total_steps);
    s.excursion_fraction = batch_mean_estimate(exc_batches);
    s.excursion_fraction.value = exc_count / static_cast<double>(total_steps);
    if (!returns.empty()) {
        double mean = 0.0;
        for (long t : returns) mean += static_cast<double>(t);
        mean /= static_cast<double>(returns.size());
        double var = 0.0;
        for (long t : returns)
            var += (static_cast<double>(t) - mean) * (static_cast<double>(t) - mean);
        var = returns.size() > 1 ? var / static_cast<double>(returns.size() - 1) : 0.0;
        s.mean_return_to_one.value = mean;
        s.mean_return_to_one.stderr_est = std::sqrt(var / static_cast<double>(returns.size()));
    }
    return s;
}

HittingSample empirical_hitting(const Stepper& st, const SimConfig& cfg, long target) {
    HittingSample out;
    for (long r = 0; r < cfg.replicas; ++r) {
        SplitMix64 rng = SplitMix64::for_replica(cfg.seed, static_cast<std::uint64_t>(r));
        long x = cfg.x0;
        bool hit = false;
        for (long n = 1; n <= cfg.steps; ++n) {
            x = st.step(x, rng.uniform());
            if (x > st.state_cap()) break;
            if (x == target) {
                out.times.push_back(n);
                hit = true;
                break;
            }
        }
        if (!hit) ++out.censored;
    }
    return out;
}

RatioEstimate ratio_occupation(const Stepper& st, const SimConfig& cfg, long state_i,
                               long state_j) {
    RatioEstimate out;
    for (long r = 0; r < cfg.replicas; ++r) {
        bool div = false;
        std::vector<long> p = simulate_path(st, cfg, static_cast<std::uint64_t>(r), &div);
        for (std::size_t i = static_cast<std::size_t>(cfg.burn_in) + 1; i < p.size(); ++i) {
            if (p[i] == state_i) ++out.visits_i;
            if (p[i] == state_j) ++out.visits_j;
        }
    }
    if (out.visits_j == 0) throw std::runtime_error("ratio_occupation: zero visits to state j");
    out.ratio = static_cast<double>(out.visits_i) / static_cast<double>(out.visits_j);
    out.low_confidence = out.visits_i < 30 || out.visits_j < 30;
    return out;
}

double ks_distance(std::vector<long> sample, const std::function<double(long)>& ref_cdf) {
    if (sample.empty()) throw std::invalid_argument("ks_distance: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < sample.size()) {
        std::size_t j = i;
        while (j < sample.size() && sample[j] == sample[i]) ++j;
        const double f = ref_cdf(sample[i]);
        const double emp_lo = static_cast<double>(i) / n;
        const double emp_hi = static_cast<double>(j) / n;
        d = std::max({d, std::abs(emp_lo - ref_cdf(sample[i] - 1)), std::abs(emp_hi - f)});
        i = j;
    }
    return d;
}

double ks_critical(double level, std::size_t n) {
    // Asymptotic Kolmogorov quantile: K such that P(D_n > K/sqrt(n)) = level.
    double k;
    if (level <= 0.011)
        k = 1.62762;
    else if (level <= 0.051)
        k = 1.35810;
    else
        k = 1.22385;
    return k / std::sqrt(static_cast<double>(n));
}

}  // namespace lamperti::montecarlo
