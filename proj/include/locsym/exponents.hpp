#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "locsym/cartan.hpp"
#include "locsym/orbit.hpp"

namespace locsym {

// Whether nontrivial elements of Gamma ∩ K enter counts and sums.
enum class TorsionPolicy { Exclude, Include };

// Distances d(xK, gamma yK) and d'(xK, gamma yK) for every element of a ball,
// computed once per base-point pair.
class OrbitGeometry {
public:
    OrbitGeometry(const OrbitBall& ball, const RootSystemData& rs, const GroupElement& x, const GroupElement& y,
                  TorsionPolicy torsion = TorsionPolicy::Exclude, unsigned threads = 1);
    // Base points x = y = e.
    OrbitGeometry(const OrbitBall& ball, const RootSystemData& rs, TorsionPolicy torsion = TorsionPolicy::Exclude);

    const RootSystemData& root_system() const { return rs_; }
    std::size_t size() const { return d_.size(); }
    int max_word_length() const { return max_word_length_; }
    std::size_t level_begin(int w) const { return level_offsets_[static_cast<std::size_t>(w)]; }
    std::size_t level_end(int w) const { return level_offsets_[static_cast<std::size_t>(w) + 1]; }

    double d(std::size_t i) const { return d_[i]; }
    double dprime(std::size_t i) const { return dprime_[i]; }
    double distance(const DistanceKind& kind, std::size_t i) const {
        return combine_distance(kind, rs_.rho_norm, d_[i], dprime_[i]);
    }
    // prod over reduced positive roots of (1 + <alpha, H>), H = (y^-1 gamma^-1 x)^+.
    double root_weight(std::size_t i) const { return root_weight_[i]; }
    bool counted(std::size_t i) const { return counted_[i] != 0; }

    // Minimum of the given distance over the frontier (word length L).
    std::optional<double> trust_radius(const DistanceKind& kind) const;

private:
    void init(const OrbitBall& ball, const GroupElement* x, const GroupElement* y, TorsionPolicy torsion, unsigned threads);

    RootSystemData rs_;
    int max_word_length_ = 0;
    std::vector<std::size_t> level_offsets_;
    std::vector<double> d_;
    std::vector<double> dprime_;
    std::vector<double> root_weight_;
    std::vector<std::uint8_t> counted_;
    bool closed_ = false;
};

struct CountingSample {
    double radius = 0.0;
    std::size_t count = 0;
    bool complete = false; // radius within the trust radius
};

struct CountingCurve {
    DistanceKind kind;
    std::vector<CountingSample> samples;
    double trust_radius = 0.0;
    double rho_norm = 0.0;
};

// 0, step, 2 step, ... up to and including r_max (within rounding).
std::vector<double> radii_grid(double step, double r_max);

CountingCurve counting_function(const OrbitGeometry& geom, const DistanceKind& kind, const std::vector<double>& radii);
CountingCurve counting_function(const OrbitBall& ball, const RootSystemData& rs, const DistanceKind& kind,
                                const GroupElement& x, const GroupElement& y, const std::vector<double>& radii);

// Per-word-length sums of the Poincare series of the given family:
//   D:       sum e^{-s d},   DPrime: sum e^{-s d'},   DSecond: sum e^{-d''_s}.
std::vector<double> poincare_level_sums(const OrbitGeometry& geom, DistanceKind::Type family, double s);
double poincare_partial_sum(const OrbitGeometry& geom, DistanceKind::Type family, double s);
double poincare_partial_sum(const OrbitBall& ball, const RootSystemData& rs, DistanceKind::Type family, double s,
                            const GroupElement& x, const GroupElement& y);

struct ExponentEstimate {
    double value = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    double residual = 0.0;
    std::size_t points = 0;
    bool complete = false;
    bool out_of_range = false; // outside [0, 2|rho| + 0.2]
};

inline constexpr double kExponentFitSlack = 0.2;

// Least-squares slope of log N_R against R over [f R_max, R_max], R_max the
// curve's trust radius.
ExponentEstimate estimate_exponent(const CountingCurve& curve, double window_fraction = 0.5);

enum class SeriesVerdict { Converging, Diverging, Inconclusive };
std::string to_string(SeriesVerdict v);

struct LevelSeriesOptions {
    double relative_tail = 1e-3;
    bool use_decay_ratio = true;
};

struct LevelSeriesAnalysis {
    SeriesVerdict verdict = SeriesVerdict::Inconclusive;
    std::vector<double> partial_sums;
    double last_relative_increment = 0.0;
    double last_ratio = 0.0;      // I_L / I_{L-1}
    double previous_ratio = 0.0;  // I_{L-1} / I_{L-2}
};

// Convergence call for a positive series from its word-length level sums.
// Converging when the last two increments are below relative_tail of the
// partial sum, or (use_decay_ratio) when both of the last two level ratios
// are below 1; diverging when both exceed 1.
LevelSeriesAnalysis classify_level_series(const std::vector<double>& level_sums, const LevelSeriesOptions& opts = {});

struct ExponentOptions {
    double radii_step = 0.25;
    double window_fraction = 0.5;
    int bisection_iterations = 40;
    LevelSeriesOptions series;
};

struct ExponentTriple {
    ExponentEstimate delta;
    ExponentEstimate delta_prime;
    double delta_second = 0.0;
    // Bracket [lo, hi] the d'' bisection was clipped to.
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    bool trivial = false;
    bool ordered = true; // delta <= delta'' <= delta' within 0.05
    std::vector<std::string> notes;
};

inline constexpr double kOrderingTolerance = 0.05;

ExponentTriple exponent_triple(const OrbitGeometry& geom, const ExponentOptions& opts = {});
ExponentTriple exponent_triple(const OrbitBall& ball, const RootSystemData& rs, const GroupElement& x,
                               const GroupElement& y, const ExponentOptions& opts = {});

} // namespace locsym
