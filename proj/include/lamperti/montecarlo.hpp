#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lamperti/laws.hpp"

namespace lamperti::montecarlo {

// SplitMix64: 64-bit counter-based generator (Steele-Lea-Flood finalizer on
// a golden-gamma Weyl sequence). Replica r of seed s runs the independent
// stream started at mix(s + (r+1) * gamma); every artifact records the
// generator name.
inline constexpr const char* kGeneratorName = "splitmix64";

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    static SplitMix64 for_replica(std::uint64_t seed, std::uint64_t replica);

    std::uint64_t next();
    // Uniform on [0,1) with 53 random bits.
    double uniform();

private:
    std::uint64_t state_;
};

// Inverse-cdf step sampler: F^{-1}(u^{1/x}) with the underflow guard
// log(u)/x < -745 resolving to the lowest support point.
class Stepper {
public:
    // Finite chain from a cdf table F(1..N).
    explicit Stepper(std::vector<double> cdf_table);
    // Countable law; inverse search gallops from the previous state.
    explicit Stepper(laws::DiscreteLaw nu, long state_cap = 1000000000L);

    long step(long x, double u) const;
    long lowest_support() const { return 1; }
    long state_cap() const { return state_cap_; }

private:
    std::vector<double> table_;  // empty for countable laws
    std::optional<laws::DiscreteLaw> law_;
    long state_cap_ = 0;
    double cdf(long j) const;
};

struct SimConfig {
    std::uint64_t seed = 1;
    long steps = 100000;
    long burn_in = 1000;
    long replicas = 1;
    long x0 = 1;
};

struct Estimate {
    double value = 0.0;
    double stderr_est = 0.0;
};

struct SimSummary {
    std::vector<double> occupation;  // frequency of states 1..K (K = max seen)
    std::vector<double> occupation_stderr;
    double mean_state = 0.0;
    Estimate excursion_fraction;   // time in state 1 inside renewal windows
    Estimate mean_return_to_one;
    long diverged_replicas = 0;
    std::uint64_t seed = 0;
    std::string generator = kGeneratorName;
};

// One replica path of length cfg.steps (including burn-in steps), started
// at cfg.x0. Deterministic for a fixed (seed, replica).
std::vector<long> simulate_path(const Stepper& st, const SimConfig& cfg,
                                std::uint64_t replica = 0, bool* diverged = nullptr);

// Aggregate occupation/excursion statistics over all replicas; stderr by
// batch means (32 batches per replica path).
SimSummary summarize(const Stepper& st, const SimConfig& cfg);

struct HittingSample {
    std::vector<long> times;  // first-passage times (n >= 1)
    long censored = 0;        // replicas that hit the path cap
};

// iid first-passage times to `target` across replicas, from x0.
HittingSample empirical_hitting(const Stepper& st, const SimConfig& cfg, long target);

struct RatioEstimate {
    double ratio = 0.0;
    long visits_i = 0;
    long visits_j = 0;
    bool low_confidence = false;  // fewer than 30 visits on either state
};

RatioEstimate ratio_occupation(const Stepper& st, const SimConfig& cfg, long state_i,
                               long state_j);

// Kolmogorov-Smirnov distance between an empirical sample and a reference
// cdf evaluator, with the asymptotic critical value at the given level.
double ks_distance(std::vector<long> sample, const std::function<double(long)>& ref_cdf);
double ks_critical(double level, std::size_t n);

}  // namespace lamperti::montecarlo
