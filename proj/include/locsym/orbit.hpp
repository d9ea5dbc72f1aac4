#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "locsym/group_element.hpp"
#include "locsym/lie.hpp"

namespace locsym {

// Generators of a finitely generated subgroup; inverses are appended when
// symmetric is set. Discreteness and torsion-freeness are not checked.
class GeneratorSet {
public:
    GeneratorSet(GroupSpec spec, std::vector<GroupElement> generators, bool symmetric = true);

    const GroupSpec& spec() const { return spec_; }
    const std::vector<GroupElement>& given() const { return given_; }
    // Generators actually used by the enumeration (given, then new inverses).
    const std::vector<GroupElement>& closure() const { return closure_; }
    bool symmetric() const { return symmetric_; }

private:
    GroupSpec spec_;
    std::vector<GroupElement> given_;
    std::vector<GroupElement> closure_;
    bool symmetric_;
};

struct EnumerateOptions {
    std::size_t max_elements = 10'000'000;
    unsigned threads = 1;
};

// Deduplicated ball {gamma : word length <= L}, stored in breadth-first order
// so each word-length level is a contiguous index range.
class OrbitBall {
public:
    using Storage = std::variant<std::vector<std::int64_t>, std::vector<BigInt>, std::vector<Rational>, std::vector<double>>;

    const GroupSpec& spec() const { return spec_; }
    const GeneratorSet& generators() const { return *generators_; }
    std::size_t size() const { return word_length_.size(); }
    int max_word_length() const { return max_word_length_; }
    int word_length(std::size_t i) const { return word_length_[i]; }

    // growth_per_level()[w] = number of elements first reached at length w.
    const std::vector<std::size_t>& growth_per_level() const { return level_counts_; }
    std::size_t level_begin(int w) const { return level_offsets_[static_cast<std::size_t>(w)]; }
    std::size_t level_end(int w) const { return level_offsets_[static_cast<std::size_t>(w) + 1]; }

    GroupElement element(std::size_t i) const;
    std::optional<std::size_t> find(const GroupElement& g) const;

    // Float image of element i, blocks concatenated row-major.
    void float_entries(std::size_t i, std::span<double> out) const;
    std::size_t stride() const { return stride_; }

    // Cartan projection gamma^+ of element i (ambient coordinates).
    std::span<const double> projection(std::size_t i) const {
        return {projection_.data() + i * ambient_, ambient_};
    }
    // gamma lies in K, i.e. gamma^+ = 0 (exact test in exact modes).
    bool in_compact(std::size_t i) const { return in_compact_[i] != 0; }

    // Minimum of d(gamma K, eK) over the elements of word length exactly L.
    std::optional<double> frontier_min_d() const { return frontier_min_d_; }
    // True when ball arithmetic was promoted from 64-bit to arbitrary precision.
    bool promoted_to_bigint() const { return promoted_; }
    const char* storage_name() const;

private:
    friend OrbitBall enumerate(const GeneratorSet&, int, const EnumerateOptions&);
    template <class S>
    friend class Enumerator;

    GroupSpec spec_;
    std::shared_ptr<const GeneratorSet> generators_;
    int max_word_length_ = 0;
    std::size_t stride_ = 0;
    std::size_t ambient_ = 0;
    Storage entries_;
    std::vector<std::uint16_t> word_length_;
    std::vector<std::size_t> level_counts_;
    std::vector<std::size_t> level_offsets_;
    std::vector<double> projection_;
    std::vector<std::uint8_t> in_compact_;
    std::optional<double> frontier_min_d_;
    bool promoted_ = false;
};

OrbitBall enumerate(const GeneratorSet& gens, int max_word_length, const EnumerateOptions& options = {});

// Heuristic radius up to which metric counting over the ball is taken as
// complete; throws if the ball has no frontier.
double trust_radius(const OrbitBall& ball);

// (2k)(2k-1)^(w-1) for 2k symmetric generators; 1 at w = 0.
double free_group_level_bound(std::size_t symmetric_generators, int w);

} // namespace locsym
