#include "locsym/orbit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <thread>

#include "locsym/cartan.hpp"
#include "locsym/error.hpp"

namespace locsym {

namespace {

struct Int64Overflow {};

constexpr double kFloatQuantum = 1e-9;

inline std::size_t mix(std::size_t h, std::size_t v) {
    // splitmix-style combiner
    v += 0x9e3779b97f4a7c15ULL;
    v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
    v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
    v ^= v >> 31;
    return (h * 0x100000001b3ULL) ^ v;
}

template <class S>
struct ScalarOps;

template <>
struct ScalarOps<std::int64_t> {
    static void multiply(const std::int64_t* a, const std::int64_t* b, int n, std::int64_t* c) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                std::int64_t acc = 0;
                for (int k = 0; k < n; ++k) {
                    std::int64_t p;
                    if (__builtin_mul_overflow(a[i * n + k], b[k * n + j], &p)) throw Int64Overflow{};
                    if (__builtin_add_overflow(acc, p, &acc)) throw Int64Overflow{};
                }
                c[i * n + j] = acc;
            }
    }
    static std::size_t hash(std::int64_t x) { return static_cast<std::size_t>(x); }
    static bool equal(std::int64_t x, std::int64_t y) { return x == y; }
    static double to_double(std::int64_t x) { return static_cast<double>(x); }
    static void check_entry(std::int64_t) {}
};

template <class Exact>
struct ExactOps {
    static void multiply(const Exact* a, const Exact* b, int n, Exact* c) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Exact acc = 0;
                for (int k = 0; k < n; ++k) acc += a[i * n + k] * b[k * n + j];
                c[i * n + j] = std::move(acc);
            }
    }
    static bool equal(const Exact& x, const Exact& y) { return x == y; }
    static double to_double(const Exact& x) { return static_cast<double>(x); }
    static void check_entry(const Exact&) {}
};

std::size_t hash_bigint(const BigInt& x) {
    static const BigInt kMod = BigInt(std::numeric_limits<std::uint64_t>::max()) - 58; // 2^64 - 59, prime
    const BigInt r = abs(x) % kMod;
    return static_cast<std::size_t>(static_cast<std::uint64_t>(r)) ^ (x.sign() < 0 ? 0x5bd1e995ULL : 0ULL);
}

template <>
struct ScalarOps<BigInt> : ExactOps<BigInt> {
    static std::size_t hash(const BigInt& x) { return hash_bigint(x); }
};

template <>
struct ScalarOps<Rational> : ExactOps<Rational> {
    static std::size_t hash(const Rational& x) {
        return mix(hash_bigint(numerator(x)), hash_bigint(denominator(x)));
    }
};

template <>
struct ScalarOps<double> {
    static void multiply(const double* a, const double* b, int n, double* c) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double acc = 0.0;
                for (int k = 0; k < n; ++k) acc += a[i * n + k] * b[k * n + j];
                c[i * n + j] = acc;
            }
    }
    static double quantize(double x) {
        const double q = std::nearbyint(x / kFloatQuantum);
        return q == 0.0 ? 0.0 : q;
    }
    static std::size_t hash(double x) { return std::bit_cast<std::size_t>(quantize(x)); }
    static bool equal(double x, double y) { return quantize(x) == quantize(y); }
    static double to_double(double x) { return x; }
    static void check_entry(double x) {
        if (!std::isfinite(x) || std::abs(x) > kMaxFloatEntry) {
            throw NumericalError("orbit enumeration: float entry beyond 1e15; lower the word length");
        }
    }
};

template <class S>
S convert_entry(const Rational& r);

template <>
std::int64_t convert_entry<std::int64_t>(const Rational& r) {
    if (denominator(r) != 1) throw ConfigError("non-integer generator entry in exact-int mode");
    const BigInt& num = numerator(r);
    if (num > std::numeric_limits<std::int64_t>::max() || num < std::numeric_limits<std::int64_t>::min()) {
        throw Int64Overflow{};
    }
    return static_cast<std::int64_t>(num);
}
template <>
BigInt convert_entry<BigInt>(const Rational& r) {
    if (denominator(r) != 1) throw ConfigError("non-integer generator entry in exact-int mode");
    return numerator(r);
}
template <>
Rational convert_entry<Rational>(const Rational& r) { return r; }

template <class S>
std::vector<S> flatten(const GroupElement& g) {
    std::vector<S> out;
    if constexpr (std::is_same_v<S, double>) {
        for (const auto& b : g.float_image())
            for (int i = 0; i < b.rows(); ++i)
                for (int j = 0; j < b.cols(); ++j) out.push_back(b(i, j));
    } else {
        if (!g.is_exact()) throw ConfigError("float generator supplied to an exact-arithmetic group");
        for (const auto& b : g.exact_blocks())
            for (const auto& e : b.entries()) out.push_back(convert_entry<S>(e));
    }
    return out;
}

// Signed permutation test: the integer points of O(n).
template <class S>
bool integer_block_orthogonal(const S* m, int n) {
    for (int i = 0; i < n; ++i) {
        int row_nonzero = 0, col_nonzero = 0;
        for (int j = 0; j < n; ++j) {
            const S& r = m[i * n + j];
            const S& c = m[j * n + i];
            if (r != 0) {
                if (r != 1 && r != -1) return false;
                ++row_nonzero;
            }
            if (c != 0) ++col_nonzero;
        }
        if (row_nonzero != 1 || col_nonzero != 1) return false;
    }
    return true;
}

bool rational_block_orthogonal(const Rational* m, int n) {
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Rational acc = 0;
            for (int k = 0; k < n; ++k) acc += m[i * n + k] * m[j * n + k];
            if (acc != (i == j ? 1 : 0)) return false;
        }
    return true;
}

} // namespace

template <class S>
class Enumerator {
public:
    using Ops = ScalarOps<S>;

    Enumerator(const GeneratorSet& gens, const EnumerateOptions& opts) : opts_(opts) {
        for (const auto& f : gens.spec().factors) {
            block_sizes_.push_back(f.n);
            stride_ += static_cast<std::size_t>(f.n) * f.n;
        }
        for (const auto& g : gens.closure()) generators_.push_back(flatten<S>(g));
    }

    void run(int max_len, OrbitBall& ball) {
        arena_.reserve(stride_ * 1024);
        std::vector<S> id(stride_, S(0));
        std::size_t off = 0;
        for (int n : block_sizes_) {
            for (int i = 0; i < n; ++i) id[off + static_cast<std::size_t>(i) * n + i] = S(1);
            off += static_cast<std::size_t>(n) * n;
        }
        rehash(1024);
        insert(id.data(), 0);
        ball.level_offsets_ = {0, 1};
        ball.level_counts_ = {1};

        const std::size_t ngen = generators_.size();
        constexpr std::size_t kChunk = 1 << 14;
        std::vector<S> candidates;
        for (int w = 1; w <= max_len; ++w) {
            const std::size_t begin = ball.level_offsets_[static_cast<std::size_t>(w) - 1];
            const std::size_t end = ball.level_offsets_[static_cast<std::size_t>(w)];
            for (std::size_t c0 = begin; c0 < end; c0 += kChunk) {
                const std::size_t c1 = std::min(end, c0 + kChunk);
                const std::size_t count = (c1 - c0) * ngen;
                candidates.resize(count * stride_);
                compute_products(c0, c1, candidates);
                for (std::size_t k = 0; k < count; ++k) insert(candidates.data() + k * stride_, w);
            }
            ball.level_offsets_.push_back(word_length_.size());
            ball.level_counts_.push_back(word_length_.size() - end);
        }
        ball.stride_ = stride_;
        ball.word_length_ = std::move(word_length_);
        ball.entries_ = std::move(arena_);
    }

private:
    void product(const S* parent, const S* gen, S* out) const {
        std::size_t off = 0;
        for (int n : block_sizes_) {
            Ops::multiply(parent + off, gen + off, n, out + off);
            off += static_cast<std::size_t>(n) * n;
        }
        for (std::size_t i = 0; i < stride_; ++i) Ops::check_entry(out[i]);
    }

    void compute_products(std::size_t c0, std::size_t c1, std::vector<S>& out) const {
        const std::size_t ngen = generators_.size();
        auto work = [&](std::size_t p0, std::size_t p1) {
            for (std::size_t p = p0; p < p1; ++p)
                for (std::size_t g = 0; g < ngen; ++g)
                    product(arena_.data() + p * stride_, generators_[g].data(),
                            out.data() + ((p - c0) * ngen + g) * stride_);
        };
        const std::size_t n = c1 - c0;
        const unsigned threads = std::max(1u, std::min<unsigned>(opts_.threads, static_cast<unsigned>(n / 256 + 1)));
        if (threads == 1) {
            work(c0, c1);
            return;
        }
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        bool overflow = false;
        std::vector<char> overflowed(threads, 0);
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t p0 = c0 + n * t / threads, p1 = c0 + n * (t + 1) / threads;
            pool.emplace_back([&, t, p0, p1] {
                try {
                    work(p0, p1);
                } catch (const Int64Overflow&) {
                    overflowed[t] = 1;
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (unsigned t = 0; t < threads; ++t) {
            if (errors[t]) std::rethrow_exception(errors[t]);
            overflow = overflow || overflowed[t];
        }
        if (overflow) throw Int64Overflow{};
    }

    std::size_t hash_of(const S* p) const {
        std::size_t h = 0xcbf29ce484222325ULL;
        for (std::size_t i = 0; i < stride_; ++i) h = mix(h, Ops::hash(p[i]));
        return h;
    }

    bool same(const S* a, const S* b) const {
        for (std::size_t i = 0; i < stride_; ++i)
            if (!Ops::equal(a[i], b[i])) return false;
        return true;
    }

    void rehash(std::size_t capacity) {
        slots_.assign(capacity, 0);
        mask_ = capacity - 1;
        for (std::size_t i = 0; i < word_length_.size(); ++i) {
            std::size_t h = hash_of(arena_.data() + i * stride_) & mask_;
            while (slots_[h] != 0) h = (h + 1) & mask_;
            slots_[h] = static_cast<std::uint32_t>(i + 1);
        }
    }

    void insert(const S* cand, int w) {
        std::size_t h = hash_of(cand) & mask_;
        while (slots_[h] != 0) {
            if (same(arena_.data() + (slots_[h] - 1) * stride_, cand)) return;
            h = (h + 1) & mask_;
        }
        if (word_length_.size() >= opts_.max_elements) {
            throw ResourceCapError("orbit enumeration exceeded the element cap of " + std::to_string(opts_.max_elements));
        }
        const std::size_t index = word_length_.size();
        arena_.insert(arena_.end(), cand, cand + stride_);
        word_length_.push_back(static_cast<std::uint16_t>(w));
        slots_[h] = static_cast<std::uint32_t>(index + 1);
        if (2 * word_length_.size() > slots_.size()) rehash(slots_.size() * 2);
    }

    EnumerateOptions opts_;
    std::vector<int> block_sizes_;
    std::size_t stride_ = 0;
    std::vector<std::vector<S>> generators_;
    std::vector<S> arena_;
    std::vector<std::uint16_t> word_length_;
    std::vector<std::uint32_t> slots_;
    std::size_t mask_ = 0;
};

GeneratorSet::GeneratorSet(GroupSpec spec, std::vector<GroupElement> generators, bool symmetric)
    : spec_(std::move(spec)), given_(std::move(generators)), symmetric_(symmetric) {
    spec_.validate();
    for (std::size_t i = 0; i < given_.size(); ++i) {
        auto& g = given_[i];
        if (g.spec().factors != spec_.factors) throw ConfigError("generator " + std::to_string(i) + " does not match the group");
        try {
            g.validate();
        } catch (const Error& e) {
            throw ConfigError("generator " + std::to_string(i) + ": " + e.what());
        }
        if (g.is_identity()) throw ConfigError("generator " + std::to_string(i) + " is the identity");
        g.word_length = 1;
    }
    closure_ = given_;
    if (symmetric_) {
        for (const auto& g : given_) {
            GroupElement inv = g.inverse();
            if (std::find(closure_.begin(), closure_.end(), inv) == closure_.end()) closure_.push_back(std::move(inv));
        }
    }
}

const char* OrbitBall::storage_name() const {
    switch (entries_.index()) {
    case 0: return "int64";
    case 1: return "bigint";
    case 2: return "rational";
    default: return "float";
    }
}

GroupElement OrbitBall::element(std::size_t i) const {
    const auto sizes = block_sizes(spec_);
    GroupElement out = std::visit(
        [&](const auto& arena) -> GroupElement {
            using S = typename std::decay_t<decltype(arena)>::value_type;
            const S* p = arena.data() + i * stride_;
            if constexpr (std::is_same_v<S, double>) {
                GroupElement::FloatBlocks bs;
                for (int n : sizes) {
                    bs.emplace_back(n, std::vector<double>(p, p + static_cast<std::size_t>(n) * n));
                    p += static_cast<std::size_t>(n) * n;
                }
                return GroupElement(spec_, std::move(bs));
            } else {
                GroupElement::ExactBlocks bs;
                for (int n : sizes) {
                    std::vector<Rational> e;
                    for (int k = 0; k < n * n; ++k) e.emplace_back(p[k]);
                    bs.emplace_back(n, std::move(e));
                    p += static_cast<std::size_t>(n) * n;
                }
                return GroupElement(spec_, std::move(bs));
            }
        },
        entries_);
    out.word_length = word_length_[i];
    return out;
}

std::optional<std::size_t> OrbitBall::find(const GroupElement& g) const {
    for (std::size_t i = 0; i < size(); ++i) {
        if (g.is_exact() == (entries_.index() != 3)) {
            if (element(i) == g) return i;
        } else {
            std::vector<double> a(stride_);
            float_entries(i, a);
            std::size_t k = 0;
            bool match = true;
            for (const auto& b : g.float_image())
                for (int r = 0; r < b.rows(); ++r)
                    for (int c = 0; c < b.cols(); ++c, ++k)
                        if (!ScalarOps<double>::equal(a[k], b(r, c))) match = false;
            if (match) return i;
        }
    }
    return std::nullopt;
}

void OrbitBall::float_entries(std::size_t i, std::span<double> out) const {
    std::visit(
        [&](const auto& arena) {
            using S = typename std::decay_t<decltype(arena)>::value_type;
            const S* p = arena.data() + i * stride_;
            for (std::size_t k = 0; k < stride_; ++k) out[k] = ScalarOps<S>::to_double(p[k]);
        },
        entries_);
}

namespace {

template <class S>
void finish_ball(OrbitBall& ball, const std::vector<S>& arena, std::size_t stride, const std::vector<int>& sizes,
                 std::vector<double>& projection, std::vector<std::uint8_t>& in_compact) {
    const std::size_t count = arena.size() / stride;
    std::size_t ambient = 0;
    for (int n : sizes) ambient += static_cast<std::size_t>(n);
    projection.assign(count * ambient, 0.0);
    in_compact.assign(count, 0);
    std::vector<double> buf(stride);
    auto integer_or_rational_orthogonal = [](const S* b, int n) {
        if constexpr (std::is_same_v<S, Rational>) return rational_block_orthogonal(b, n);
        else return integer_block_orthogonal(b, n);
    };
    for (std::size_t i = 0; i < count; ++i) {
        const S* p = arena.data() + i * stride;
        ball.float_entries(i, buf);
        std::size_t off = 0, poff = 0;
        bool compact = true;
        for (int n : sizes) {
            double* out = projection.data() + i * ambient + poff;
            if constexpr (!std::is_same_v<S, double>) {
                if (n == 2) {
                    const S* b = p + off;
                    out[0] = exact_sl2_log_singular(b[0], b[1], b[2], b[3]);
                    out[1] = -out[0];
                    compact = compact && integer_or_rational_orthogonal(b, n);
                    off += 4;
                    poff += 2;
                    continue;
                }
            }
            block_cartan_projection(std::span<const double>(buf.data() + off, static_cast<std::size_t>(n) * n), n,
                                    std::span<double>(projection.data() + i * ambient + poff, static_cast<std::size_t>(n)));
            if constexpr (std::is_same_v<S, double>) {
                for (int k = 0; k < n; ++k)
                    if (std::abs(projection[i * ambient + poff + k]) > 1e-9) compact = false;
            } else if constexpr (std::is_same_v<S, Rational>) {
                compact = compact && rational_block_orthogonal(p + off, n);
            } else {
                compact = compact && integer_block_orthogonal(p + off, n);
            }
            off += static_cast<std::size_t>(n) * n;
            poff += static_cast<std::size_t>(n);
        }
        in_compact[i] = compact ? 1 : 0;
    }
}

template <class S>
void run_enumeration(const GeneratorSet& gens, int max_len, const EnumerateOptions& opts, OrbitBall& ball) {
    Enumerator<S> e(gens, opts);
    e.run(max_len, ball);
}

} // namespace

OrbitBall enumerate(const GeneratorSet& gens, int max_len, const EnumerateOptions& options) {
    if (max_len < 0) throw std::invalid_argument("enumerate: negative word length");
    if (max_len > std::numeric_limits<std::uint16_t>::max()) throw ConfigError("enumerate: word length too large");
    OrbitBall ball;
    ball.spec_ = gens.spec();
    ball.generators_ = std::make_shared<const GeneratorSet>(gens);
    ball.max_word_length_ = max_len;
    ball.ambient_ = static_cast<std::size_t>(gens.spec().ambient_dim());

    switch (gens.spec().arithmetic) {
    case Arithmetic::ExactInt:
        try {
            run_enumeration<std::int64_t>(gens, max_len, options, ball);
        } catch (const Int64Overflow&) {
            ball.level_offsets_.clear();
            ball.level_counts_.clear();
            run_enumeration<BigInt>(gens, max_len, options, ball);
            ball.promoted_ = true;
        }
        break;
    case Arithmetic::ExactRational: run_enumeration<Rational>(gens, max_len, options, ball); break;
    case Arithmetic::Float: run_enumeration<double>(gens, max_len, options, ball); break;
    }

    const auto sizes = block_sizes(ball.spec_);
    std::visit([&](const auto& arena) { finish_ball(ball, arena, ball.stride_, sizes, ball.projection_, ball.in_compact_); },
               ball.entries_);

    if (max_len >= 1 && ball.level_end(max_len) > ball.level_begin(max_len)) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = ball.level_begin(max_len); i < ball.level_end(max_len); ++i) {
            best = std::min(best, norm(ball.projection(i)));
        }
        ball.frontier_min_d_ = best;
    }
    return ball;
}

double trust_radius(const OrbitBall& ball) {
    if (!ball.frontier_min_d()) {
        throw std::invalid_argument("trust_radius: ball has an empty frontier (word length 0 or finite group)");
    }
    return *ball.frontier_min_d();
}

double free_group_level_bound(std::size_t k2, int w) {
    if (w == 0) return 1.0;
    return static_cast<double>(k2) * std::pow(static_cast<double>(k2) - 1.0, w - 1);
}

} // namespace locsym
