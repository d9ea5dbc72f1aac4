#pragma once

#include <optional>
#include <string>
#include <vector>

namespace locsym {

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
    bool contains(double x, double tol = 0.0) const { return x >= lower - tol && x <= upper + tol; }
    bool empty() const { return lower > upper; }
};

// Clamps an exponent estimate into [0, 2|rho|], appending a warning when it moved.
double clip_exponent(double value, double rho_norm, const std::string& name, std::vector<std::string>* warnings);

// bottom of the spectrum from the d''-exponent:
//   |rho|^2                          if delta'' <= |rho|
//   |rho|^2 - (delta'' - |rho|)^2    otherwise.
// In rank one delta'' = delta and this is the classical formula.
double lambda0_characterization(double rho_norm, double delta_second, std::vector<std::string>* warnings = nullptr);

// Two-sided bounds in terms of the Riemannian exponent delta and rho_min.
Interval lambda0_bounds_riemannian(double rho_norm, double rho_min, double delta, std::vector<std::string>* warnings = nullptr);

// Lower bound in terms of the polyhedral exponent delta'.
double lambda0_lower_first_improvement(double rho_norm, double delta_prime, std::vector<std::string>* warnings = nullptr);

// Polyhedral lower bound combined with the Riemannian upper bound.
Interval lambda0_combined_bounds(double rho_norm, double delta, double delta_prime, std::vector<std::string>* warnings = nullptr);

struct SpectrumInputs {
    double rho_norm = 0.0;
    double rho_min = 0.0;
    double delta = 0.0;
    double delta_prime = 0.0;
    double delta_second = 0.0;
    // Uncertainty of each exponent estimate, propagated through the formulas.
    double tolerance = 0.05;
};

struct SpectrumReport {
    SpectrumInputs inputs;
    std::optional<double> lambda0_exact;
    Interval riemannian_bounds;
    double polyhedral_lower = 0.0;
    Interval combined_bounds;
    // Riemannian interval intersected with [polyhedral lower, |rho|^2].
    Interval lambda0_interval;
    bool consistent = true;
    std::vector<std::string> theorem_tags;
    std::vector<std::string> warnings;
    std::vector<std::string> violations;
};

SpectrumReport consistency_check(const SpectrumInputs& inputs);

} // namespace locsym
