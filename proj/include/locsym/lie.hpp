#pragma once

#include <span>
#include <string>
#include <vector>

#include "locsym/error.hpp"

namespace locsym {

enum class Arithmetic { ExactInt, ExactRational, Float };

Arithmetic parse_arithmetic(const std::string& name);
std::string to_string(Arithmetic a);

struct FactorSpec {
    std::string type = "sl";
    int n = 2;
};

// G as a product of SL(n_i, R) factors; arithmetic selects how group
// elements are stored and compared.
struct GroupSpec {
    std::vector<FactorSpec> factors;
    Arithmetic arithmetic = Arithmetic::ExactInt;

    void validate() const;
    int ambient_dim() const;
    // Offset of each factor's coordinate block inside the ambient vector.
    std::vector<int> block_offsets() const;
};

bool operator==(const FactorSpec& a, const FactorSpec& b);
bool operator==(const GroupSpec& a, const GroupSpec& b);

struct PositiveRoot {
    std::vector<double> vector;
    int multiplicity = 1;
};

// Restricted root data of the product of A_{n_i - 1} systems, embedded
// block-diagonally in R^{sum n_i} with the standard dot product.
struct RootSystemData {
    GroupSpec spec;
    int rank = 0;
    int ambient_dim = 0;
    std::vector<PositiveRoot> positive_roots;
    std::vector<PositiveRoot> reduced_positive_roots;
    std::vector<double> rho;
    double rho_norm = 0.0;
    double rho_min = 0.0;
    int dim_x = 0;
    // Extreme rays of the closed positive chamber (fundamental coweights),
    // one per simple root, ordered factor by factor.
    std::vector<std::vector<double>> chamber_rays;
};

RootSystemData build_root_system(const GroupSpec& spec);

// min over unit H in the closed chamber of <rho, H>, attained on an extreme ray.
double rho_min(const RootSystemData& rs);

// Cartan-chamber vector: each SL(n) block non-increasing and trace-free.
class ChamberVector {
public:
    ChamberVector() = default;
    ChamberVector(std::vector<double> coords, std::vector<int> block_sizes);

    std::span<const double> coords() const { return coords_; }
    const std::vector<int>& block_sizes() const { return block_sizes_; }
    std::size_t size() const { return coords_.size(); }
    double operator[](std::size_t i) const { return coords_[i]; }

    double norm() const;
    double dot(std::span<const double> other) const;

private:
    std::vector<double> coords_;
    std::vector<int> block_sizes_;
};

// Weyl-group representative in the closed chamber: sorts each block descending.
ChamberVector dominant_projection(std::span<const double> v, const std::vector<int>& block_sizes);

// -w0 acting blockwise: reverse then negate.
std::vector<double> opposition_involution(std::span<const double> v, const std::vector<int>& block_sizes);

std::vector<int> block_sizes(const GroupSpec& spec);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

} // namespace locsym
