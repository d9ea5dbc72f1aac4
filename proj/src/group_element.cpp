#include "locsym/group_element.hpp"

#include <cmath>
#include <string>

#include "locsym/error.hpp"

namespace locsym {

namespace {

FloatBlock to_float(const ExactBlock& b) {
    FloatBlock f(b.size());
    for (int i = 0; i < b.size(); ++i)
        for (int j = 0; j < b.size(); ++j) f(i, j) = static_cast<double>(b(i, j));
    return f;
}

GroupElement::FloatBlocks to_float(const GroupElement::ExactBlocks& bs) {
    GroupElement::FloatBlocks out;
    for (const auto& b : bs) out.push_back(to_float(b));
    return out;
}

void check_shapes(const GroupSpec& spec, const std::vector<int>& sizes) {
    if (sizes.size() != spec.factors.size()) {
        throw ConfigError("group element has " + std::to_string(sizes.size()) + " blocks, group has " +
                          std::to_string(spec.factors.size()) + " factors");
    }
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] != spec.factors[i].n) {
            throw ConfigError("block " + std::to_string(i) + " is " + std::to_string(sizes[i]) + "x" +
                              std::to_string(sizes[i]) + ", factor expects SL(" +
                              std::to_string(spec.factors[i].n) + ")");
        }
    }
}

template <class Blocks>
std::vector<int> sizes_of(const Blocks& bs) {
    std::vector<int> s;
    for (const auto& b : bs) s.push_back(b.size());
    return s;
}

bool same_factors(const GroupSpec& a, const GroupSpec& b) { return a.factors == b.factors; }

} // namespace

GroupElement::GroupElement(const GroupSpec& spec, ExactBlocks blocks) : spec_(spec), blocks_(std::move(blocks)) {
    check_shapes(spec_, sizes_of(exact_blocks()));
}

GroupElement::GroupElement(const GroupSpec& spec, FloatBlocks blocks) : spec_(spec), blocks_(std::move(blocks)) {
    check_shapes(spec_, sizes_of(float_blocks()));
}

GroupElement GroupElement::identity(const GroupSpec& spec) {
    if (spec.arithmetic == Arithmetic::Float) {
        FloatBlocks bs;
        for (const auto& f : spec.factors) bs.push_back(FloatBlock::identity(f.n));
        GroupElement e(spec, std::move(bs));
        e.word_length = 0;
        return e;
    }
    ExactBlocks bs;
    for (const auto& f : spec.factors) bs.push_back(ExactBlock::identity(f.n));
    GroupElement e(spec, std::move(bs));
    e.word_length = 0;
    return e;
}

GroupElement GroupElement::exp_diagonal(const GroupSpec& spec, const std::vector<double>& h) {
    if (h.size() != static_cast<std::size_t>(spec.ambient_dim())) {
        throw std::invalid_argument("exp_diagonal: coordinate count does not match group");
    }
    GroupSpec fs = spec;
    fs.arithmetic = Arithmetic::Float;
    FloatBlocks bs;
    std::size_t off = 0;
    for (const auto& f : spec.factors) {
        FloatBlock b(f.n);
        for (int i = 0; i < f.n; ++i) b(i, i) = std::exp(h[off + i]);
        off += f.n;
        bs.push_back(std::move(b));
    }
    return GroupElement(fs, std::move(bs));
}

std::size_t GroupElement::block_count() const {
    return is_exact() ? exact_blocks().size() : float_blocks().size();
}

std::vector<Eigen::MatrixXd> GroupElement::float_image() const {
    std::vector<Eigen::MatrixXd> out;
    auto emit = [&](const auto& blocks) {
        for (const auto& b : blocks) {
            Eigen::MatrixXd m(b.size(), b.size());
            for (int i = 0; i < b.size(); ++i)
                for (int j = 0; j < b.size(); ++j) m(i, j) = static_cast<double>(b(i, j));
            out.push_back(std::move(m));
        }
    };
    std::visit(emit, blocks_);
    return out;
}

void GroupElement::validate() const {
    if (is_exact()) {
        for (std::size_t i = 0; i < exact_blocks().size(); ++i) {
            const auto& b = exact_blocks()[i];
            if (spec_.arithmetic == Arithmetic::ExactInt) {
                for (const auto& e : b.entries())
                    if (denominator(e) != 1) throw ConfigError("block " + std::to_string(i) + " has a non-integer entry in exact-int mode");
            }
            if (determinant(b) != Rational(1)) {
                throw ConfigError("block " + std::to_string(i) + " has determinant " + determinant(b).str() + ", expected 1");
            }
        }
        return;
    }
    for (std::size_t i = 0; i < float_blocks().size(); ++i) {
        const auto& b = float_blocks()[i];
        for (double e : b.entries()) {
            if (!std::isfinite(e)) throw NumericalError("block " + std::to_string(i) + " has a non-finite entry");
            if (std::abs(e) > kMaxFloatEntry) throw NumericalError("block " + std::to_string(i) + " has an entry beyond 1e15");
        }
        const double det = determinant(b);
        if (std::abs(det - 1.0) > kFloatDetTolerance) {
            throw ConfigError("block " + std::to_string(i) + " has determinant " + std::to_string(det) + ", expected 1");
        }
    }
}

bool GroupElement::is_identity() const {
    return *this == identity(spec_);
}

GroupElement GroupElement::operator*(const GroupElement& other) const {
    if (!same_factors(spec_, other.spec_)) throw std::invalid_argument("group elements from different groups");
    if (is_exact() && other.is_exact()) {
        ExactBlocks out;
        for (std::size_t i = 0; i < exact_blocks().size(); ++i) out.push_back(exact_blocks()[i] * other.exact_blocks()[i]);
        GroupSpec s = spec_;
        if (other.spec_.arithmetic == Arithmetic::ExactRational) s.arithmetic = Arithmetic::ExactRational;
        return GroupElement(s, std::move(out));
    }
    const FloatBlocks a = is_exact() ? to_float(exact_blocks()) : float_blocks();
    const FloatBlocks b = other.is_exact() ? to_float(other.exact_blocks()) : other.float_blocks();
    FloatBlocks out;
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(a[i] * b[i]);
    GroupSpec s = spec_;
    s.arithmetic = Arithmetic::Float;
    return GroupElement(s, std::move(out));
}

GroupElement GroupElement::inverse() const {
    GroupElement out;
    if (is_exact()) {
        ExactBlocks bs;
        for (const auto& b : exact_blocks()) bs.push_back(locsym::inverse(b));
        out = GroupElement(spec_, std::move(bs));
    } else {
        FloatBlocks bs;
        for (const auto& b : float_blocks()) bs.push_back(locsym::inverse(b));
        out = GroupElement(spec_, std::move(bs));
    }
    out.word_length = word_length;
    return out;
}

bool GroupElement::operator==(const GroupElement& other) const {
    if (!same_factors(spec_, other.spec_)) return false;
    if (is_exact() && other.is_exact()) return exact_blocks() == other.exact_blocks();
    const FloatBlocks a = is_exact() ? to_float(exact_blocks()) : float_blocks();
    const FloatBlocks b = other.is_exact() ? to_float(other.exact_blocks()) : other.float_blocks();
    return a == b;
}

} // namespace locsym
