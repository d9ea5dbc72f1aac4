#include "locsym/cartan.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "locsym/error.hpp"

namespace locsym {

void block_cartan_projection(std::span<const double> m, int n, std::span<double> out) {
    for (int i = 0; i < n * n; ++i) {
        if (!std::isfinite(m[i])) throw NumericalError("Cartan projection: non-finite matrix entry");
        if (std::abs(m[i]) > kMaxFloatEntry) throw NumericalError("Cartan projection: matrix entry beyond 1e15");
    }
    if (n == 2) {
        // For det 1: sigma - 1/sigma = 2 sinh(h) and |M|_F^2 - 2 = (a-d)^2 + (b+c)^2.
        const double a = m[0], b = m[1], c = m[2], d = m[3];
        const double h = std::asinh(0.5 * std::hypot(a - d, b + c));
        out[0] = h;
        out[1] = -h;
        return;
    }
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> mat(m.data(), n, n);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(mat);
    const auto& sv = svd.singularValues();
    double mean = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!(sv(i) > 0.0)) throw NumericalError("Cartan projection: singular matrix");
        out[i] = std::log(sv(i));
        mean += out[i];
    }
    mean /= n;
    for (int i = 0; i < n; ++i) out[i] -= mean;
    std::sort(out.begin(), out.begin() + n, std::greater<>());
}

ChamberVector cartan_projection(const GroupElement& g) {
    const auto sizes = block_sizes(g.spec());
    std::vector<double> coords;
    if (g.is_exact()) {
        bool all_sl2 = true;
        for (const auto& b : g.exact_blocks()) all_sl2 = all_sl2 && b.size() == 2;
        if (all_sl2) {
            for (const auto& b : g.exact_blocks()) {
                const double h = exact_sl2_log_singular(b(0, 0), b(0, 1), b(1, 0), b(1, 1));
                coords.push_back(h);
                coords.push_back(-h);
            }
            return ChamberVector(std::move(coords), sizes);
        }
    }
    for (const auto& block : g.float_image()) {
        const int n = static_cast<int>(block.rows());
        std::vector<double> rowmajor(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) rowmajor[static_cast<std::size_t>(i) * n + j] = block(i, j);
        std::vector<double> h(n);
        block_cartan_projection(rowmajor, n, h);
        coords.insert(coords.end(), h.begin(), h.end());
    }
    return ChamberVector(std::move(coords), sizes);
}

double distance_d(const GroupElement& x, const GroupElement& y) {
    return cartan_projection(y.inverse() * x).norm();
}

double distance_dprime(const RootSystemData& rs, const GroupElement& x, const GroupElement& y) {
    return cartan_projection(y.inverse() * x).dot(rs.rho) / rs.rho_norm;
}

double dsecond_from(double s, double rho_norm, double d, double dprime) {
    return std::min(s, rho_norm) * dprime + std::max(s - rho_norm, 0.0) * d;
}

double distance_dsecond(const RootSystemData& rs, double s, const GroupElement& x, const GroupElement& y) {
    if (!(s > 0.0)) throw std::invalid_argument("distance_dsecond: s must be positive");
    const auto h = cartan_projection(y.inverse() * x);
    return dsecond_from(s, rs.rho_norm, h.norm(), h.dot(rs.rho) / rs.rho_norm);
}

DistanceKind DistanceKind::dsecond(double s) {
    if (!(s > 0.0)) throw std::invalid_argument("DistanceKind: d'' needs s > 0");
    return {Type::DSecond, s};
}

std::string DistanceKind::label() const {
    switch (type) {
    case Type::D: return "d";
    case Type::DPrime: return "dprime";
    case Type::DSecond: {
        std::ostringstream os;
        os.precision(12);
        os << "dsecond(" << s << ")";
        return os.str();
    }
    }
    return "?";
}

double combine_distance(const DistanceKind& kind, double rho_norm, double d, double dprime) {
    switch (kind.type) {
    case DistanceKind::Type::D: return d;
    case DistanceKind::Type::DPrime: return dprime;
    case DistanceKind::Type::DSecond: return dsecond_from(kind.s, rho_norm, d, dprime);
    }
    return d;
}

} // namespace locsym
