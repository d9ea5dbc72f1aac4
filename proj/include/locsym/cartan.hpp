#pragma once

#include <cmath>
#include <span>
#include <type_traits>
#include <string>

#include "locsym/group_element.hpp"
#include "locsym/lie.hpp"

namespace locsym {

// Writes the non-increasing log-singular values of the n x n row-major block
// m into out[0..n). Requires det(m) = 1 up to float tolerance.
void block_cartan_projection(std::span<const double> m, int n, std::span<double> out);

// Largest log-singular value of an exact det-1 2x2 block [[a,b],[c,d]]. The
// sum of squares (a-d)^2 + (b+c)^2 = |M|_F^2 - 2 is formed exactly, so no
// entry-size limit applies.
template <class T>
double exact_sl2_log_singular(const T& a, const T& b, const T& c, const T& d) {
    if constexpr (std::is_integral_v<T>) {
        const long double u = static_cast<long double>(a) - static_cast<long double>(d);
        const long double v = static_cast<long double>(b) + static_cast<long double>(c);
        return static_cast<double>(std::asinh(0.5L * std::sqrt(u * u + v * v)));
    } else {
        const T s = (a - d) * (a - d) + (b + c) * (b + c);
        return std::asinh(0.5 * std::sqrt(static_cast<double>(s)));
    }
}

ChamberVector cartan_projection(const GroupElement& g);

// Riemannian distance d(xK, yK) = |(y^-1 x)^+|.
double distance_d(const GroupElement& x, const GroupElement& y);
// Polyhedral distance <rho/|rho|, (y^-1 x)^+>.
double distance_dprime(const RootSystemData& rs, const GroupElement& x, const GroupElement& y);
// min{s,|rho|} d' + max{s-|rho|,0} d.
double distance_dsecond(const RootSystemData& rs, double s, const GroupElement& x, const GroupElement& y);

// The family of distances counted by orbital counting functions.
struct DistanceKind {
    enum class Type { D, DPrime, DSecond };
    Type type = Type::D;
    double s = 0.0; // only used by DSecond

    static DistanceKind d() { return {Type::D, 0.0}; }
    static DistanceKind dprime() { return {Type::DPrime, 0.0}; }
    static DistanceKind dsecond(double s);

    std::string label() const;
};

// Combines precomputed d and d' into the distance of the given kind.
double combine_distance(const DistanceKind& kind, double rho_norm, double d, double dprime);

double dsecond_from(double s, double rho_norm, double d, double dprime);

} // namespace locsym
