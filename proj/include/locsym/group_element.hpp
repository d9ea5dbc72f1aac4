#pragma once

#include <Eigen/Dense>
#include <optional>
#include <variant>
#include <vector>

#include "locsym/error.hpp"
#include "locsym/lie.hpp"
#include "locsym/matrix.hpp"

namespace locsym {

using ExactBlock = SquareMatrix<Rational>;
using FloatBlock = SquareMatrix<double>;

// An element of G: one determinant-one block per SL(n) factor. Exact modes
// (integer and rational) share rational storage; integrality is checked
// against the group spec.
class GroupElement {
public:
    using ExactBlocks = std::vector<ExactBlock>;
    using FloatBlocks = std::vector<FloatBlock>;

    GroupElement() = default;
    GroupElement(const GroupSpec& spec, ExactBlocks blocks);
    GroupElement(const GroupSpec& spec, FloatBlocks blocks);

    static GroupElement identity(const GroupSpec& spec);
    // diag(exp(h_1), ..., exp(h_n)) per block; always float.
    static GroupElement exp_diagonal(const GroupSpec& spec, const std::vector<double>& h);

    const GroupSpec& spec() const { return spec_; }
    bool is_exact() const { return std::holds_alternative<ExactBlocks>(blocks_); }
    const ExactBlocks& exact_blocks() const { return std::get<ExactBlocks>(blocks_); }
    const FloatBlocks& float_blocks() const { return std::get<FloatBlocks>(blocks_); }
    std::size_t block_count() const;

    std::vector<Eigen::MatrixXd> float_image() const;

    // Throws ConfigError if a block is not in SL(n) (exactly, or within 1e-9).
    void validate() const;
    bool is_identity() const;

    GroupElement operator*(const GroupElement& other) const;
    GroupElement inverse() const;
    bool operator==(const GroupElement& other) const;

    std::optional<int> word_length;

private:
    GroupSpec spec_;
    std::variant<ExactBlocks, FloatBlocks> blocks_;
};

// Tolerance for det = 1 in float mode.
inline constexpr double kFloatDetTolerance = 1e-9;
// Float entries above this magnitude are rejected (SVD conditioning).
inline constexpr double kMaxFloatEntry = 1e15;

} // namespace locsym
