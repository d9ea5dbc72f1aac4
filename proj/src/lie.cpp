#include "locsym/lie.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "locsym/error.hpp"

namespace locsym {

namespace {

constexpr double kTraceTolerance = 1e-9;

} // namespace

Arithmetic parse_arithmetic(const std::string& name) {
    if (name == "exact-int") return Arithmetic::ExactInt;
    if (name == "exact-rational") return Arithmetic::ExactRational;
    if (name == "float") return Arithmetic::Float;
    throw ConfigError("unknown arithmetic mode '" + name + "' (expected exact-int, exact-rational or float)");
}

std::string to_string(Arithmetic a) {
    switch (a) {
    case Arithmetic::ExactInt: return "exact-int";
    case Arithmetic::ExactRational: return "exact-rational";
    case Arithmetic::Float: return "float";
    }
    return "unknown";
}

void GroupSpec::validate() const {
    if (factors.empty()) throw ConfigError("group needs at least one factor");
    for (const auto& f : factors) {
        if (f.type != "sl") throw UnsupportedGroupError("unsupported factor type '" + f.type + "'");
        if (f.n < 2) throw ConfigError("SL(n) factor needs n >= 2, got " + std::to_string(f.n));
    }
}

int GroupSpec::ambient_dim() const {
    int d = 0;
    for (const auto& f : factors) d += f.n;
    return d;
}

std::vector<int> GroupSpec::block_offsets() const {
    std::vector<int> out;
    int off = 0;
    for (const auto& f : factors) {
        out.push_back(off);
        off += f.n;
    }
    return out;
}

bool operator==(const FactorSpec& a, const FactorSpec& b) { return a.type == b.type && a.n == b.n; }
bool operator==(const GroupSpec& a, const GroupSpec& b) {
    return a.arithmetic == b.arithmetic && a.factors == b.factors;
}

std::vector<int> block_sizes(const GroupSpec& spec) {
    std::vector<int> out;
    for (const auto& f : spec.factors) out.push_back(f.n);
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

RootSystemData build_root_system(const GroupSpec& spec) {
    spec.validate();
    RootSystemData rs;
    rs.spec = spec;
    rs.ambient_dim = spec.ambient_dim();
    const auto offsets = spec.block_offsets();
    const auto d = static_cast<std::size_t>(rs.ambient_dim);

    for (std::size_t f = 0; f < spec.factors.size(); ++f) {
        const int n = spec.factors[f].n;
        const int off = offsets[f];
        rs.rank += n - 1;
        // e_i - e_j, i < j; type A is reduced with unit multiplicities.
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                PositiveRoot root;
                root.vector.assign(d, 0.0);
                root.vector[off + i] = 1.0;
                root.vector[off + j] = -1.0;
                rs.positive_roots.push_back(root);
            }
        }
        for (int k = 1; k < n; ++k) {
            std::vector<double> ray(d, 0.0);
            for (int i = 0; i < n; ++i) {
                ray[off + i] = (i < k ? 1.0 : 0.0) - static_cast<double>(k) / n;
            }
            rs.chamber_rays.push_back(std::move(ray));
        }
    }
    rs.reduced_positive_roots = rs.positive_roots;

    rs.rho.assign(d, 0.0);
    int dim = rs.rank;
    for (const auto& root : rs.positive_roots) {
        for (std::size_t i = 0; i < d; ++i) rs.rho[i] += 0.5 * root.multiplicity * root.vector[i];
        dim += root.multiplicity;
    }
    rs.dim_x = dim;
    rs.rho_norm = norm(rs.rho);
    rs.rho_min = rho_min(rs);
    return rs;
}

double rho_min(const RootSystemData& rs) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& ray : rs.chamber_rays) {
        best = std::min(best, dot(rs.rho, ray) / norm(ray));
    }
    return best;
}

ChamberVector::ChamberVector(std::vector<double> coords, std::vector<int> block_sizes)
    : coords_(std::move(coords)), block_sizes_(std::move(block_sizes)) {
    std::size_t total = 0;
    for (int b : block_sizes_) total += static_cast<std::size_t>(b);
    if (total != coords_.size()) throw std::invalid_argument("ChamberVector: block sizes do not match coordinates");
}

double ChamberVector::norm() const { return locsym::norm(coords_); }

double ChamberVector::dot(std::span<const double> other) const { return locsym::dot(coords_, other); }

ChamberVector dominant_projection(std::span<const double> v, const std::vector<int>& sizes) {
    std::vector<double> out(v.begin(), v.end());
    std::size_t off = 0;
    for (int b : sizes) {
        if (off + static_cast<std::size_t>(b) > out.size()) {
            throw std::invalid_argument("dominant_projection: block sizes exceed vector length");
        }
        auto first = out.begin() + static_cast<std::ptrdiff_t>(off);
        auto last = first + b;
        double sum = 0.0, scale = 1.0;
        for (auto it = first; it != last; ++it) {
            sum += *it;
            scale = std::max(scale, std::abs(*it));
        }
        if (std::abs(sum) > kTraceTolerance * scale) {
            throw std::invalid_argument("dominant_projection: block is not trace-free");
        }
        std::sort(first, last, std::greater<>());
        off += static_cast<std::size_t>(b);
    }
    if (off != out.size()) throw std::invalid_argument("dominant_projection: block sizes do not cover vector");
    return ChamberVector(std::move(out), sizes);
}

std::vector<double> opposition_involution(std::span<const double> v, const std::vector<int>& sizes) {
    std::vector<double> out(v.size());
    std::size_t off = 0;
    for (int b : sizes) {
        for (int i = 0; i < b; ++i) out[off + i] = -v[off + (b - 1 - i)];
        off += static_cast<std::size_t>(b);
    }
    return out;
}

} // namespace locsym
