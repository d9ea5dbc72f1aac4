#include "locsym/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace locsym {

namespace {

double rank_one_formula(double rho, double delta) {
    return delta <= rho ? rho * rho : rho * rho - (delta - rho) * (delta - rho);
}

void check_rho(double rho_norm) {
    if (!(rho_norm > 0.0)) throw std::invalid_argument("spectrum: |rho| must be positive");
}

} // namespace

double clip_exponent(double value, double rho_norm, const std::string& name, std::vector<std::string>* warnings) {
    const double clipped = std::clamp(value, 0.0, 2 * rho_norm);
    if (clipped != value && warnings) {
        std::ostringstream os;
        os.precision(12);
        os << name << " estimate " << value << " clipped to " << clipped;
        warnings->push_back(os.str());
    }
    return clipped;
}

double lambda0_characterization(double rho_norm, double delta_second, std::vector<std::string>* warnings) {
    check_rho(rho_norm);
    return rank_one_formula(rho_norm, clip_exponent(delta_second, rho_norm, "delta''", warnings));
}

Interval lambda0_bounds_riemannian(double rho_norm, double rho_min, double delta, std::vector<std::string>* warnings) {
    check_rho(rho_norm);
    if (!(rho_min > 0.0 && rho_min <= rho_norm * (1 + 1e-12))) throw std::invalid_argument("spectrum: rho_min must lie in (0, |rho|]");
    delta = clip_exponent(delta, rho_norm, "delta", warnings);
    const double rho2 = rho_norm * rho_norm;
    Interval out;
    out.upper = rank_one_formula(rho_norm, delta);
    out.lower = delta <= rho_min ? rho2 : std::max(0.0, rho2 - (delta - rho_min) * (delta - rho_min));
    return out;
}

double lambda0_lower_first_improvement(double rho_norm, double delta_prime, std::vector<std::string>* warnings) {
    check_rho(rho_norm);
    return rank_one_formula(rho_norm, clip_exponent(delta_prime, rho_norm, "delta'", warnings));
}

Interval lambda0_combined_bounds(double rho_norm, double delta, double delta_prime, std::vector<std::string>* warnings) {
    check_rho(rho_norm);
    Interval out;
    out.lower = lambda0_lower_first_improvement(rho_norm, delta_prime, warnings);
    out.upper = rank_one_formula(rho_norm, clip_exponent(delta, rho_norm, "delta", nullptr));
    return out;
}

SpectrumReport consistency_check(const SpectrumInputs& in) {
    SpectrumReport r;
    r.inputs = in;
    const double rho = in.rho_norm;
    const double rho2 = rho * rho;
    const double tol = in.tolerance;

    r.lambda0_exact = lambda0_characterization(rho, in.delta_second, &r.warnings);
    r.riemannian_bounds = lambda0_bounds_riemannian(rho, in.rho_min, in.delta, &r.warnings);
    r.polyhedral_lower = lambda0_lower_first_improvement(rho, in.delta_prime, &r.warnings);
    r.combined_bounds = lambda0_combined_bounds(rho, in.delta, in.delta_prime, nullptr);
    r.lambda0_interval = {std::max(r.riemannian_bounds.lower, r.polyhedral_lower), r.riemannian_bounds.upper};
    r.theorem_tags = {"characterization", "riemannian-bounds", "polyhedral-lower-bound", "combined-bounds"};
    if (std::abs(in.rho_min - rho) <= 1e-12 * rho) r.theorem_tags.push_back("rank-one");

    // Every bound is monotone in its exponent, so the tolerance widens each
    // endpoint by evaluating at the shifted exponent.
    const double lower_wide = std::max(lambda0_bounds_riemannian(rho, in.rho_min, std::clamp(in.delta + tol, 0.0, 2 * rho)).lower,
                                       lambda0_lower_first_improvement(rho, std::clamp(in.delta_prime + tol, 0.0, 2 * rho)));
    const double upper_wide = lambda0_bounds_riemannian(rho, in.rho_min, std::clamp(in.delta - tol, 0.0, 2 * rho)).upper;
    const double exact_lo = lambda0_characterization(rho, std::clamp(in.delta_second + tol, 0.0, 2 * rho));
    const double exact_hi = lambda0_characterization(rho, std::clamp(in.delta_second - tol, 0.0, 2 * rho));

    if (lower_wide > upper_wide) r.violations.push_back("lower bounds exceed the upper bound beyond tolerance");
    if (exact_hi < lower_wide || exact_lo > upper_wide) {
        r.violations.push_back("characterization value lies outside the bound intersection beyond tolerance");
    }
    if (in.delta > in.delta_second + tol || in.delta_second > in.delta_prime + tol) {
        r.violations.push_back("exponents violate delta <= delta'' <= delta' beyond tolerance");
    }
    const double lo = r.lambda0_interval.lower, up = r.lambda0_interval.upper;
    if (lo < 0.0 || up > rho2 + 1e-12) r.violations.push_back("interval leaves [0, |rho|^2]");
    r.consistent = r.violations.empty();
    return r;
}

} // namespace locsym
