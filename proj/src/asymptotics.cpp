#include "locsym/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "locsym/summation.hpp"

namespace locsym {

double density_omega(const RootSystemData& rs, const ChamberVector& H) {
    if (static_cast<int>(H.size()) != rs.ambient_dim) throw std::invalid_argument("density_omega: dimension mismatch");
    double out = 1.0;
    for (const auto& a : rs.positive_roots) {
        const double v = std::sinh(H.dot(a.vector));
        out *= a.multiplicity == 1 ? v : std::pow(v, a.multiplicity);
    }
    return out;
}

std::string to_string(BallKind k) { return k == BallKind::Polyhedral ? "polyhedral" : "classical"; }
std::string to_string(VolumeRegime r) { return r == VolumeRegime::Small ? "small" : "large"; }

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
constexpr unsigned kMaxDepth = 18;

// H = lambda (W u) with u on the standard simplex; dH = sqrt(det W^T W) lambda^{l-1} dlambda du.
class ConeIntegrator {
public:
    ConeIntegrator(const RootSystemData& rs, BallKind kind, double r, const QuadratureOptions& opts)
        : rs_(rs), kind_(kind), r_(r), opts_(opts), l_(rs.rank) {
        const int m = rs.ambient_dim;
        Eigen::MatrixXd W(m, l_);
        for (int k = 0; k < l_; ++k)
            for (int i = 0; i < m; ++i) W(i, k) = rs.chamber_rays[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
        gram_sqrt_ = std::sqrt((W.transpose() * W).determinant());
        // <alpha, W_k> and <rho, W_k>, |W u|^2 = u^T G u
        ray_pairings_.assign(rs.positive_roots.size(), std::vector<double>(static_cast<std::size_t>(l_)));
        for (std::size_t a = 0; a < rs.positive_roots.size(); ++a)
            for (int k = 0; k < l_; ++k)
                ray_pairings_[a][static_cast<std::size_t>(k)] = dot(rs.positive_roots[a].vector, rs.chamber_rays[static_cast<std::size_t>(k)]);
        rho_pairing_.resize(static_cast<std::size_t>(l_));
        for (int k = 0; k < l_; ++k) rho_pairing_[static_cast<std::size_t>(k)] = dot(rs.rho, rs.chamber_rays[static_cast<std::size_t>(k)]);
        gram_ = W.transpose() * W;
    }

    double integrate() {
        double err = 0.0, value = 0.0;
        const double tol = opts_.relative_tolerance * 0.1;
        if (l_ == 1) {
            value = radial({1.0});
            err = last_inner_error_;
        } else if (l_ == 2) {
            value = GK::integrate([&](double a) { return radial({a, 1.0 - a}); }, 0.0, 1.0, kMaxDepth, tol, &err);
        } else {
            value = GK::integrate(
                [&](double a) {
                    double e2 = 0.0;
                    const double v = GK::integrate(
                        [&](double b) { return (1.0 - a) * radial({a, (1.0 - a) * b, (1.0 - a) * (1.0 - b)}); }, 0.0, 1.0,
                        kMaxDepth, tol, &e2);
                    return v;
                },
                0.0, 1.0, kMaxDepth, tol, &err);
        }
        if (!std::isfinite(value) || !(value > 0.0)) throw NumericalError("ball volume quadrature: non-positive or non-finite result");
        if (err > 10 * opts_.relative_tolerance * value) throw NumericalError("ball volume quadrature did not reach tolerance");
        return gram_sqrt_ * value;
    }

private:
    double radial(std::vector<double> u) {
        std::vector<double> a(ray_pairings_.size(), 0.0);
        for (std::size_t i = 0; i < a.size(); ++i)
            for (int k = 0; k < l_; ++k) a[i] += ray_pairings_[i][static_cast<std::size_t>(k)] * u[static_cast<std::size_t>(k)];
        double cutoff = 0.0;
        if (kind_ == BallKind::Polyhedral) {
            double rp = 0.0;
            for (int k = 0; k < l_; ++k) rp += rho_pairing_[static_cast<std::size_t>(k)] * u[static_cast<std::size_t>(k)];
            cutoff = rs_.rho_norm * r_ / rp;
        } else {
            Eigen::Map<const Eigen::VectorXd> uv(u.data(), l_);
            cutoff = r_ / std::sqrt(uv.dot(gram_ * uv));
        }
        auto f = [&](double lambda) {
            if (++evaluations_ > opts_.max_evaluations) throw NumericalError("ball volume quadrature exceeded the evaluation cap");
            double v = std::pow(lambda, l_ - 1);
            for (std::size_t i = 0; i < a.size(); ++i) {
                const double s = std::sinh(lambda * a[i]);
                const int m = rs_.positive_roots[i].multiplicity;
                v *= m == 1 ? s : std::pow(s, m);
            }
            return v;
        };
        double err = 0.0;
        const double v = GK::integrate(f, 0.0, cutoff, kMaxDepth, opts_.relative_tolerance * 0.01, &err);
        last_inner_error_ = err;
        return v;
    }

    const RootSystemData& rs_;
    BallKind kind_;
    double r_;
    QuadratureOptions opts_;
    int l_;
    double gram_sqrt_ = 0.0;
    Eigen::MatrixXd gram_;
    std::vector<std::vector<double>> ray_pairings_;
    std::vector<double> rho_pairing_;
    long long evaluations_ = 0;
    double last_inner_error_ = 0.0;
};

double least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, Eigen::VectorXd& coef) {
    coef = A.colPivHouseholderQr().solve(y);
    return std::sqrt((A * coef - y).squaredNorm() / static_cast<double>(y.size()));
}

} // namespace

double ball_volume(const RootSystemData& rs, BallKind kind, double r, const QuadratureOptions& opts) {
    if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("ball volume: radius must be positive");
    if (rs.rank < 1 || rs.rank > 3) throw UnsupportedGroupError("ball volume quadrature supports rank 1 to 3, got " + std::to_string(rs.rank));
    return ConeIntegrator(rs, kind, r, opts).integrate();
}

double polyhedral_ball_volume(const RootSystemData& rs, double r, const QuadratureOptions& opts) {
    return ball_volume(rs, BallKind::Polyhedral, r, opts);
}

double classical_ball_volume(const RootSystemData& rs, double r, const QuadratureOptions& opts) {
    return ball_volume(rs, BallKind::Classical, r, opts);
}

std::vector<double> default_volume_radii(VolumeRegime regime) {
    std::vector<double> out;
    if (regime == VolumeRegime::Small) {
        for (int i = 0; i <= 15; ++i) out.push_back(0.05 + 0.01 * i);
    } else {
        for (int i = 0; i <= 20; ++i) out.push_back(5.0 + 0.5 * i);
    }
    return out;
}

VolumeFit fit_ball_volume(const RootSystemData& rs, BallKind kind, VolumeRegime regime, const std::vector<double>& radii,
                          const QuadratureOptions& opts) {
    VolumeFit fit;
    fit.kind = kind;
    fit.regime = regime;
    fit.radii = radii.empty() ? default_volume_radii(regime) : radii;
    const bool large = regime == VolumeRegime::Large;
    const int params = large ? 5 : 2;
    if (static_cast<int>(fit.radii.size()) < params + 1) throw std::invalid_argument("volume fit: too few radii");
    const auto n = static_cast<Eigen::Index>(fit.radii.size());
    Eigen::MatrixXd A(n, params), B(n, 2);
    Eigen::VectorXd y(n), z(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double r = fit.radii[static_cast<std::size_t>(i)];
        const double v = ball_volume(rs, kind, r, opts);
        fit.volumes.push_back(v);
        fit.log_volumes.push_back(std::log(v));
        A(i, 0) = 1.0;
        A(i, 1) = std::log(r);
        if (large) {
            A(i, 2) = r;
            A(i, 3) = 1.0 / r;
            A(i, 4) = 1.0 / (r * r);
        }
        y(i) = std::log(v);
        B(i, 0) = 1.0;
        B(i, 1) = std::log(r);
        z(i) = y(i) - (large ? 2 * rs.rho_norm * r : 0.0);
    }
    Eigen::VectorXd coef, fixed;
    least_squares(A, y, coef);
    fit.residual = least_squares(B, z, fixed);
    fit.joint_polynomial_degree = coef(1);
    fit.fitted_polynomial_degree = fixed(1);
    fit.fitted_exponential_rate = large ? coef(2) : 0.0;
    return fit;
}

double green_asymptotic(const RootSystemData& rs, double zeta, const ChamberVector& H) {
    if (!(zeta > 0.0)) throw std::invalid_argument("green_asymptotic: zeta must be positive");
    const double h = H.norm();
    if (!(h > 0.0)) throw std::invalid_argument("green_asymptotic: H must be nonzero");
    if (h < 0.5) {
        if (rs.dim_x == 2) return std::log(1.0 / h);
        return std::pow(h, -(rs.dim_x - 2));
    }
    double w = 1.0;
    for (const auto& a : rs.reduced_positive_roots) w *= 1.0 + H.dot(a.vector);
    const double k = 0.5 * (rs.rank - 1) + static_cast<double>(rs.reduced_positive_roots.size());
    return w * std::pow(h, -k) * std::exp(-H.dot(rs.rho) - zeta * h);
}

double green_series_term(const RootSystemData& rs, double zeta, double d, double dprime, double root_weight) {
    const double k = 0.5 * (rs.rank - 1) + static_cast<double>(rs.reduced_positive_roots.size());
    return root_weight * std::pow(d, -k) * std::exp(-rs.rho_norm * dprime - zeta * d);
}

GreenSeriesDiagnostic green_series_diagnostic(const OrbitGeometry& geom, double zeta, const LevelSeriesOptions& opts) {
    if (!(zeta > 0.0)) throw std::invalid_argument("green_series_diagnostic: zeta must be positive");
    GreenSeriesDiagnostic out;
    out.zeta = zeta;
    const auto& rs = geom.root_system();
    for (int w = 0; w <= geom.max_word_length(); ++w) {
        CompensatedSum sum;
        for (std::size_t i = geom.level_begin(w); i < geom.level_end(w); ++i) {
            if (!geom.counted(i) || geom.d(i) < 1e-12) {
                ++out.skipped;
                continue;
            }
            sum.add(green_series_term(rs, zeta, geom.d(i), geom.dprime(i), geom.root_weight(i)));
            ++out.terms;
        }
        out.level_sums.push_back(sum.value());
    }
    auto analysis = classify_level_series(out.level_sums, opts);
    out.partial_sums = std::move(analysis.partial_sums);
    out.verdict = analysis.verdict;
    out.last_ratio = analysis.last_ratio;
    out.previous_ratio = analysis.previous_ratio;
    return out;
}

GreenSeriesDiagnostic green_series_diagnostic(const OrbitBall& ball, const RootSystemData& rs, double zeta,
                                              const GroupElement& x, const GroupElement& y, const LevelSeriesOptions& opts) {
    return green_series_diagnostic(OrbitGeometry(ball, rs, x, y), zeta, opts);
}

HeatCase parse_heat_case(const std::string& s) {
    if (s == "i") return HeatCase::I;
    if (s == "ii") return HeatCase::II;
    if (s == "iii") return HeatCase::III;
    throw ConfigError("unknown heat bound case '" + s + "' (expected i, ii or iii)");
}

std::string to_string(HeatCase c) {
    switch (c) {
    case HeatCase::I: return "i";
    case HeatCase::II: return "ii";
    case HeatCase::III: return "iii";
    }
    return "?";
}

double heat_default_D(const RootSystemData& rs) {
    return rs.rank + 2.0 * static_cast<double>(rs.reduced_positive_roots.size());
}

void validate_heat_params(const HeatBoundParams& p, double rho, double ds) {
    if (!(p.t > 0.0)) throw std::invalid_argument("heat bound: t must be positive");
    switch (p.which) {
    case HeatCase::I:
        if (!(ds < p.s && p.s < rho)) throw std::invalid_argument("heat bound (i): need delta'' < s < |rho|");
        break;
    case HeatCase::II:
        if (!(rho <= ds && ds < 2 * rho)) throw std::invalid_argument("heat bound (ii): need |rho| <= delta'' < 2|rho|");
        if (!(ds - rho < p.s1 && p.s1 < p.s2 && p.s2 < rho))
            throw std::invalid_argument("heat bound (ii): need delta'' - |rho| < s1 < s2 < |rho|");
        break;
    case HeatCase::III:
        if (!(ds < 2 * rho)) throw std::invalid_argument("heat bound (iii): need delta'' < 2|rho|");
        if (!(p.s > ds)) throw std::invalid_argument("heat bound (iii): need s > delta''");
        if (!(p.eps > 0.0)) throw std::invalid_argument("heat bound (iii): need eps > 0");
        break;
    }
}

double log_heat_bound(const HeatBoundParams& p, const HeatBoundTerms& tm, double default_D) {
    const double rho = tm.rho_norm;
    validate_heat_params(p, rho, tm.delta_second);
    const double t = p.t;
    const double n = tm.dim_x;
    const double d2 = tm.quotient_distance * tm.quotient_distance;
    const double lead = -0.5 * n * std::log(t);
    switch (p.which) {
    case HeatCase::I: {
        const double D = p.D.value_or(default_D);
        return lead + 0.5 * (n - D) * std::log1p(t) - rho * rho * t - d2 / (4 * t) + std::log(tm.p_xy);
    }
    case HeatCase::II:
        return lead - (rho * rho - p.s2 * p.s2) * t + std::log(tm.p_xy);
    case HeatCase::III: {
        const double g = tm.delta_second - rho;
        return lead - (rho * rho - g * g - 2 * p.eps) * t - d2 / (4 * (1 + p.eps) * t) + 0.5 * (std::log(tm.p_xx) + std::log(tm.p_yy));
    }
    }
    return 0.0;
}

double heat_bound(const HeatBoundParams& p, const HeatBoundTerms& tm, double default_D) {
    return std::exp(log_heat_bound(p, tm, default_D));
}

HeatBoundTerms heat_bound_terms(const HeatBoundParams& p, double delta_second, const OrbitGeometry& xy,
                                const OrbitGeometry* xx, const OrbitGeometry* yy) {
    const auto& rs = xy.root_system();
    HeatBoundTerms tm;
    tm.rho_norm = rs.rho_norm;
    tm.dim_x = rs.dim_x;
    tm.delta_second = delta_second;
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xy.size(); ++i) dmin = std::min(dmin, xy.d(i));
    tm.quotient_distance = xy.size() ? dmin : 0.0;
    const double s = p.which == HeatCase::II ? rs.rho_norm + p.s1 : p.s;
    tm.p_xy = poincare_partial_sum(xy, DistanceKind::Type::DSecond, s);
    tm.p_xx = poincare_partial_sum(xx ? *xx : xy, DistanceKind::Type::DSecond, s);
    tm.p_yy = poincare_partial_sum(yy ? *yy : xy, DistanceKind::Type::DSecond, s);
    return tm;
}

} // namespace locsym
