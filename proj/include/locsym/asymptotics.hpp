#pragma once

#include <optional>
#include <string>
#include <vector>

#include "locsym/exponents.hpp"
#include "locsym/lie.hpp"

namespace locsym {

// prod over positive roots of sinh(<alpha, H>)^{m_alpha}.
double density_omega(const RootSystemData& rs, const ChamberVector& H);

enum class BallKind { Polyhedral, Classical };
std::string to_string(BallKind k);

struct QuadratureOptions {
    double relative_tolerance = 1e-4;
    long long max_evaluations = 10'000'000;
};

// Integral of omega over {H in chamber : <rho, H> <= |rho| r} (polyhedral) or
// {|H| <= r} (classical), with the Lebesgue measure of a and constant 1.
// Rank at most 3.
double ball_volume(const RootSystemData& rs, BallKind kind, double r, const QuadratureOptions& opts = {});
double polyhedral_ball_volume(const RootSystemData& rs, double r, const QuadratureOptions& opts = {});
double classical_ball_volume(const RootSystemData& rs, double r, const QuadratureOptions& opts = {});

enum class VolumeRegime { Small, Large };
std::string to_string(VolumeRegime r);

struct VolumeFit {
    BallKind kind = BallKind::Polyhedral;
    VolumeRegime regime = VolumeRegime::Large;
    std::vector<double> radii;
    std::vector<double> volumes;
    std::vector<double> log_volumes;
    // Large regime: rate from the free fit
    //   log V = a + b log r + rate r + e/r + f/r^2,
    // degree from log V - 2|rho| r = a + degree log r. The joint b swings by
    // about -9x any rate error on [5, 15], so it is reported only as a diagnostic.
    // Small regime: log V = a + degree log r, rate 0.
    double fitted_exponential_rate = 0.0;
    double fitted_polynomial_degree = 0.0;
    double joint_polynomial_degree = 0.0;
    double residual = 0.0;
};

// Default radii: [0.05, 0.2] (small) and [5, 15] (large).
std::vector<double> default_volume_radii(VolumeRegime regime);
VolumeFit fit_ball_volume(const RootSystemData& rs, BallKind kind, VolumeRegime regime,
                          const std::vector<double>& radii = {}, const QuadratureOptions& opts = {});

// Green function representative with constant 1; branch switch at |H| = 1/2.
double green_asymptotic(const RootSystemData& rs, double zeta, const ChamberVector& H);

// One summand of the periodized Green series given d, d' and the root weight.
double green_series_term(const RootSystemData& rs, double zeta, double d, double dprime, double root_weight);

struct GreenSeriesDiagnostic {
    double zeta = 0.0;
    std::vector<double> level_sums;
    std::vector<double> partial_sums;
    SeriesVerdict verdict = SeriesVerdict::Inconclusive;
    std::size_t terms = 0;
    std::size_t skipped = 0; // zero-distance or excluded elements
    double last_ratio = 0.0;
    double previous_ratio = 0.0;
};

GreenSeriesDiagnostic green_series_diagnostic(const OrbitGeometry& geom, double zeta, const LevelSeriesOptions& opts = {});
GreenSeriesDiagnostic green_series_diagnostic(const OrbitBall& ball, const RootSystemData& rs, double zeta,
                                              const GroupElement& x, const GroupElement& y,
                                              const LevelSeriesOptions& opts = {});

enum class HeatCase { I, II, III };
HeatCase parse_heat_case(const std::string& s);
std::string to_string(HeatCase c);

struct HeatBoundParams {
    HeatCase which = HeatCase::I;
    double t = 1.0;
    double s = 0.0;   // (i), (iii)
    double s1 = 0.0;  // (ii)
    double s2 = 0.0;  // (ii)
    double eps = 0.0; // (iii)
    std::optional<double> D; // (i); defaults to rank + 2 |reduced positive roots|
};

// Numbers entering the bound expression besides the parameters.
struct HeatBoundTerms {
    double rho_norm = 0.0;
    int dim_x = 0;
    double delta_second = 0.0;
    double quotient_distance = 0.0; // d(Gamma xK, Gamma yK), over the enumerated ball
    double p_xy = 0.0;
    double p_xx = 0.0;
    double p_yy = 0.0;
};

double heat_default_D(const RootSystemData& rs);

// Throws std::invalid_argument for parameter-order violations.
void validate_heat_params(const HeatBoundParams& p, double rho_norm, double delta_second);

// Evaluates the bound expression with constant 1. The P'' values are partial
// sums, so the result under-estimates the bound of the infinite series.
double heat_bound(const HeatBoundParams& p, const HeatBoundTerms& terms, double default_D);
// Same in log form, finite where the bound itself underflows.
double log_heat_bound(const HeatBoundParams& p, const HeatBoundTerms& terms, double default_D);

// Fills the terms from enumerated geometries; xx and yy default to xy.
HeatBoundTerms heat_bound_terms(const HeatBoundParams& p, double delta_second, const OrbitGeometry& xy,
                                const OrbitGeometry* xx = nullptr, const OrbitGeometry* yy = nullptr);

} // namespace locsym
