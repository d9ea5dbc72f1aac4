#include "locsym/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "locsym/error.hpp"
#include "locsym/summation.hpp"

namespace locsym {

namespace {

Eigen::MatrixXd block_product(const Eigen::MatrixXd& a, std::span<const double> g, int n, const Eigen::MatrixXd& b) {
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(g.data(), n, n);
    return a * m * b;
}

} // namespace

OrbitGeometry::OrbitGeometry(const OrbitBall& ball, const RootSystemData& rs, const GroupElement& x,
                             const GroupElement& y, TorsionPolicy torsion, unsigned threads)
    : rs_(rs) {
    if (x.spec().factors != ball.spec().factors || y.spec().factors != ball.spec().factors) {
        throw std::invalid_argument("OrbitGeometry: base points do not match the group");
    }
    const bool identity_points = x.is_identity() && y.is_identity();
    init(ball, identity_points ? nullptr : &x, identity_points ? nullptr : &y, torsion, threads);
}

OrbitGeometry::OrbitGeometry(const OrbitBall& ball, const RootSystemData& rs, TorsionPolicy torsion) : rs_(rs) {
    init(ball, nullptr, nullptr, torsion, 1);
}

void OrbitGeometry::init(const OrbitBall& ball, const GroupElement* x, const GroupElement* y, TorsionPolicy torsion,
                         unsigned threads) {
    if (ball.spec().factors != rs_.spec.factors) throw std::invalid_argument("OrbitGeometry: root system does not match the ball");
    const std::size_t n = ball.size();
    const std::size_t dim = static_cast<std::size_t>(rs_.ambient_dim);
    max_word_length_ = ball.max_word_length();
    for (int w = 0; w <= max_word_length_ + 1; ++w)
        level_offsets_.push_back(w <= max_word_length_ ? ball.level_begin(w) : ball.size());
    d_.resize(n);
    dprime_.resize(n);
    root_weight_.resize(n);
    counted_.resize(n);

    std::vector<Eigen::MatrixXd> xinv, yf;
    if (x) {
        xinv = x->inverse().float_image();
        yf = y->float_image();
    }
    const auto sizes = block_sizes(ball.spec());

    auto work = [&](std::size_t i0, std::size_t i1) {
        std::vector<double> h(dim), buf(ball.stride());
        for (std::size_t i = i0; i < i1; ++i) {
            std::span<const double> proj;
            if (!x) {
                proj = ball.projection(i);
            } else {
                // (x^-1 gamma y)^+ = -w0 (y^-1 gamma^-1 x)^+; every quantity below is -w0 invariant.
                ball.float_entries(i, buf);
                std::size_t off = 0, poff = 0;
                for (std::size_t b = 0; b < sizes.size(); ++b) {
                    const int nb = sizes[b];
                    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> m =
                        block_product(xinv[b], std::span<const double>(buf.data() + off, static_cast<std::size_t>(nb) * nb), nb, yf[b]);
                    block_cartan_projection(std::span<const double>(m.data(), static_cast<std::size_t>(nb) * nb), nb,
                                            std::span<double>(h.data() + poff, static_cast<std::size_t>(nb)));
                    off += static_cast<std::size_t>(nb) * nb;
                    poff += static_cast<std::size_t>(nb);
                }
                proj = h;
            }
            d_[i] = norm(proj);
            dprime_[i] = dot(proj, rs_.rho) / rs_.rho_norm;
            double weight = 1.0;
            for (const auto& root : rs_.reduced_positive_roots) weight *= 1.0 + dot(root.vector, proj);
            root_weight_[i] = weight;
            counted_[i] = (torsion == TorsionPolicy::Exclude && i != 0 && ball.in_compact(i)) ? 0 : 1;
        }
    };
    const unsigned t = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n / 4096 + 1)));
    if (t == 1) {
        work(0, n);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(t);
        for (unsigned k = 0; k < t; ++k) {
            pool.emplace_back([&, k] {
                try {
                    work(n * k / t, n * (k + 1) / t);
                } catch (...) {
                    errors[k] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    closed_ = ball.generators().closure().empty() ||
              (max_word_length_ >= 1 && ball.level_end(max_word_length_) == ball.level_begin(max_word_length_));
}

std::optional<double> OrbitGeometry::trust_radius(const DistanceKind& kind) const {
    if (closed_) return std::numeric_limits<double>::infinity();
    if (max_word_length_ < 1) return std::nullopt;
    double best = std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t i = level_begin(max_word_length_); i < level_end(max_word_length_); ++i) {
        if (!counted(i)) continue;
        best = std::min(best, distance(kind, i));
        any = true;
    }
    if (!any) return std::nullopt;
    return best;
}

std::vector<double> radii_grid(double step, double r_max) {
    if (!(step > 0.0)) throw std::invalid_argument("radii_grid: step must be positive");
    std::vector<double> out;
    if (!std::isfinite(r_max)) throw std::invalid_argument("radii_grid: infinite maximum radius");
    for (long k = 0;; ++k) {
        const double r = static_cast<double>(k) * step;
        if (r > r_max * (1 + 1e-12) + 1e-12) break;
        out.push_back(r);
    }
    return out;
}

CountingCurve counting_function(const OrbitGeometry& geom, const DistanceKind& kind, const std::vector<double>& radii) {
    if (!std::is_sorted(radii.begin(), radii.end())) throw std::invalid_argument("counting_function: radii must be ascending");
    std::vector<double> dist;
    dist.reserve(geom.size());
    for (std::size_t i = 0; i < geom.size(); ++i)
        if (geom.counted(i)) dist.push_back(geom.distance(kind, i));
    std::sort(dist.begin(), dist.end());

    CountingCurve curve;
    curve.kind = kind;
    curve.rho_norm = geom.root_system().rho_norm;
    curve.trust_radius = geom.trust_radius(kind).value_or(0.0);
    for (double r : radii) {
        const double tol = 1e-12 * std::max(1.0, std::abs(r));
        CountingSample s;
        s.radius = r;
        s.count = static_cast<std::size_t>(std::upper_bound(dist.begin(), dist.end(), r + tol) - dist.begin());
        s.complete = r <= curve.trust_radius + tol;
        curve.samples.push_back(s);
    }
    return curve;
}

CountingCurve counting_function(const OrbitBall& ball, const RootSystemData& rs, const DistanceKind& kind,
                                const GroupElement& x, const GroupElement& y, const std::vector<double>& radii) {
    return counting_function(OrbitGeometry(ball, rs, x, y), kind, radii);
}

std::vector<double> poincare_level_sums(const OrbitGeometry& geom, DistanceKind::Type family, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("Poincare series: s must be positive");
    const double rho = geom.root_system().rho_norm;
    std::vector<double> out;
    for (int w = 0; w <= geom.max_word_length(); ++w) {
        CompensatedSum sum;
        for (std::size_t i = geom.level_begin(w); i < geom.level_end(w); ++i) {
            if (!geom.counted(i)) continue;
            double exponent = 0.0;
            switch (family) {
            case DistanceKind::Type::D: exponent = s * geom.d(i); break;
            case DistanceKind::Type::DPrime: exponent = s * geom.dprime(i); break;
            case DistanceKind::Type::DSecond: exponent = dsecond_from(s, rho, geom.d(i), geom.dprime(i)); break;
            }
            sum.add(std::exp(-exponent));
        }
        out.push_back(sum.value());
    }
    return out;
}

double poincare_partial_sum(const OrbitGeometry& geom, DistanceKind::Type family, double s) {
    CompensatedSum total;
    for (double v : poincare_level_sums(geom, family, s)) total.add(v);
    return total.value();
}

double poincare_partial_sum(const OrbitBall& ball, const RootSystemData& rs, DistanceKind::Type family, double s,
                            const GroupElement& x, const GroupElement& y) {
    return poincare_partial_sum(OrbitGeometry(ball, rs, x, y), family, s);
}

ExponentEstimate estimate_exponent(const CountingCurve& curve, double window_fraction) {
    if (!(window_fraction > 0.0 && window_fraction <= 1.0)) {
        throw std::invalid_argument("estimate_exponent: window fraction must lie in (0, 1]");
    }
    double r_max = curve.trust_radius;
    if (!std::isfinite(r_max)) {
        r_max = 0.0;
        for (const auto& s : curve.samples) r_max = std::max(r_max, s.radius);
    }
    ExponentEstimate est;
    est.window_lo = window_fraction * r_max;
    est.window_hi = r_max;
    std::vector<std::pair<double, double>> pts;
    bool all_complete = true;
    for (const auto& s : curve.samples) {
        if (s.radius < est.window_lo - 1e-12 || s.radius > r_max + 1e-12) continue;
        if (s.count == 0) throw NumericalError("estimate_exponent: zero count inside the fit window");
        all_complete = all_complete && s.complete;
        pts.emplace_back(s.radius, std::log(static_cast<double>(s.count)));
    }
    if (pts.size() < 6) {
        throw NumericalError("estimate_exponent: only " + std::to_string(pts.size()) +
                             " sample points in the fit window (need 6); raise the word length or shrink the radius step");
    }
    const double m = static_cast<double>(pts.size());
    double sx = 0, sy = 0;
    for (const auto& [x, y] : pts) {
        sx += x;
        sy += y;
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0;
    for (const auto& [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    est.value = sxy / sxx;
    const double intercept = my - est.value * mx;
    double ss = 0;
    for (const auto& [x, y] : pts) {
        const double e = y - (intercept + est.value * x);
        ss += e * e;
    }
    est.residual = std::sqrt(ss / m);
    est.points = pts.size();
    est.complete = all_complete;
    est.out_of_range = est.value < -kExponentFitSlack || est.value > 2 * curve.rho_norm + kExponentFitSlack;
    return est;
}

std::string to_string(SeriesVerdict v) {
    switch (v) {
    case SeriesVerdict::Converging: return "converging";
    case SeriesVerdict::Diverging: return "diverging";
    case SeriesVerdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

LevelSeriesAnalysis classify_level_series(const std::vector<double>& level_sums, const LevelSeriesOptions& opts) {
    LevelSeriesAnalysis out;
    CompensatedSum acc;
    for (double v : level_sums) {
        acc.add(v);
        out.partial_sums.push_back(acc.value());
    }
    const std::size_t n = level_sums.size();
    if (n <= 1 || out.partial_sums.back() == 0.0) {
        out.verdict = SeriesVerdict::Converging;
        return out;
    }
    const std::size_t last = n - 1;
    out.last_relative_increment = level_sums[last] / out.partial_sums[last];
    const bool small_last = out.last_relative_increment < opts.relative_tail;
    const bool small_prev = last == 0 || level_sums[last - 1] < opts.relative_tail * out.partial_sums[last - 1];
    if (small_last && small_prev) {
        out.verdict = SeriesVerdict::Converging;
        return out;
    }
    if (n < 3 || level_sums[last - 1] <= 0.0 || level_sums[last - 2] <= 0.0) {
        out.verdict = SeriesVerdict::Inconclusive;
        return out;
    }
    out.last_ratio = level_sums[last] / level_sums[last - 1];
    out.previous_ratio = level_sums[last - 1] / level_sums[last - 2];
    if (out.last_ratio > 1.0 && out.previous_ratio > 1.0) {
        out.verdict = SeriesVerdict::Diverging;
    } else if (opts.use_decay_ratio && out.last_ratio < 1.0 && out.previous_ratio < 1.0) {
        out.verdict = SeriesVerdict::Converging;
    } else {
        out.verdict = SeriesVerdict::Inconclusive;
    }
    return out;
}

ExponentTriple exponent_triple(const OrbitGeometry& geom, const ExponentOptions& opts) {
    ExponentTriple t;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < geom.size(); ++i) counted += geom.counted(i) ? 1 : 0;
    const auto rd = geom.trust_radius(DistanceKind::d());
    if (counted <= 1 || (rd && std::isinf(*rd))) {
        // Trivial or finite group: the series are finite sums.
        t.trivial = true;
        t.notes.push_back("finite orbit: all critical exponents vanish");
        return t;
    }
    if (geom.max_word_length() < 6) {
        t.notes.push_back("word length below 6: exponent estimates are unreliable");
    }
    const auto rp = geom.trust_radius(DistanceKind::dprime());
    if (!rd || !rp) throw NumericalError("exponent_triple: empty frontier");

    t.delta = estimate_exponent(counting_function(geom, DistanceKind::d(), radii_grid(opts.radii_step, *rd)),
                                opts.window_fraction);
    t.delta_prime = estimate_exponent(
        counting_function(geom, DistanceKind::dprime(), radii_grid(opts.radii_step, *rp)), opts.window_fraction);

    const double rho2 = 2 * geom.root_system().rho_norm;
    double lo = std::clamp(t.delta.value, 0.0, rho2);
    double hi = std::clamp(t.delta_prime.value, 0.0, rho2);
    if (lo > hi) {
        t.notes.push_back("fitted delta exceeds fitted delta'; bracket swapped");
        std::swap(lo, hi);
    }
    t.bracket_lo = lo;
    t.bracket_hi = hi;

    auto converges = [&](double s) {
        if (s <= 0.0) return false;
        return classify_level_series(poincare_level_sums(geom, DistanceKind::Type::DSecond, s), opts.series).verdict ==
               SeriesVerdict::Converging;
    };
    if (lo > 0.0 && converges(lo)) {
        t.delta_second = lo;
        t.notes.push_back("d'' series already converges at the lower bracket");
    } else if (!converges(hi)) {
        t.delta_second = hi;
        t.notes.push_back("d'' series not yet converging at the upper bracket");
    } else {
        double a = lo, b = hi;
        for (int k = 0; k < opts.bisection_iterations; ++k) {
            const double mid = 0.5 * (a + b);
            if (converges(mid)) b = mid;
            else a = mid;
        }
        t.delta_second = b;
    }
    t.ordered = t.delta.value <= t.delta_second + kOrderingTolerance &&
                t.delta_second <= t.delta_prime.value + kOrderingTolerance &&
                t.delta_prime.value <= rho2 + kOrderingTolerance;
    return t;
}

ExponentTriple exponent_triple(const OrbitBall& ball, const RootSystemData& rs, const GroupElement& x,
                               const GroupElement& y, const ExponentOptions& opts) {
    return exponent_triple(OrbitGeometry(ball, rs, x, y), opts);
}

} // namespace locsym
