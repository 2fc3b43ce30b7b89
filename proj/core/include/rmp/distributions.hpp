#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rmp/random.hpp"

namespace rmp {

/// One draw (a, b, c). The matrix it generates is [[a, b], [c, bc/a]].
struct EntryTriple {
    double a = 1.0;
    double b = 0.0;
    double c = 0.0;

    friend bool operator==(const EntryTriple&, const EntryTriple&) = default;
};

// True when a != 0 and all entries are finite.
bool is_valid(const EntryTriple& t) noexcept;

struct Atom {
    EntryTriple triple;
    double probability = 0.0;
};

// x takes alpha w.p. p and beta otherwise; matrix [[x, 1/x], [1, 1/x^2]].
struct BinaryHill {
    double alpha = 2.0;
    double beta = 3.0;
    double p = 0.5;
};

// x, y i.i.d. uniform on [-a, b]; matrix [[x, x], [y, y]].
struct UniformRankOne {
    double a = 1.0;
    double b = 1.0;
};

// x, y i.i.d. exponential with rate theta; matrix [[x, x], [y, y]].
struct ExponentialRankOne {
    double theta = 1.0;
};

// x, y i.i.d. standard Cauchy; matrix [[x, x], [y, y]].
struct CauchyRankOne {};

// Hill's-equation matrices [[1, x], [1/x, 1]] with x exponential of rate theta.
struct HillRandom {
    double theta = 1.0;
};

struct DiscreteAtoms {
    std::vector<Atom> atoms;
};

struct ConstantTriple {
    EntryTriple value;
};

enum class Family {
    BinaryHill,
    UniformRankOne,
    ExponentialRankOne,
    CauchyRankOne,
    HillRandom,
    DiscreteAtoms,
    ConstantTriple,
};

std::string_view family_name(Family f) noexcept;

/// Joint law of the entry triple. Immutable once built; every constructor
/// path validates, so a DistributionSpec in hand is always a valid one.
class DistributionSpec {
public:
    using Params = std::variant<BinaryHill, UniformRankOne, ExponentialRankOne, CauchyRankOne, HillRandom,
                                DiscreteAtoms, ConstantTriple>;

    explicit DistributionSpec(Params params);

    Family family() const noexcept { return static_cast<Family>(params_.index()); }
    const Params& params() const noexcept { return params_; }

    template <class T>
    const T& as() const {
        return std::get<T>(params_);
    }

    // Rank-one laws have b = a, so the cross term only involves one triple.
    bool is_rank_one() const noexcept;
    bool is_discrete() const noexcept;

private:
    Params params_;
};

// Parses a JSON configuration document. Throws SpecError naming the offending field.
DistributionSpec parse_spec(std::string_view text);

// Serializes back to the configuration grammar (compact JSON, fixed key order).
std::string to_json_text(const DistributionSpec& spec);

EntryTriple sample_triple(const DistributionSpec& spec, RandomStream& stream);

// Finite support with exact probabilities; zero-probability atoms are dropped.
// Throws NotDiscreteError for continuous families.
std::vector<Atom> enumerate_atoms(const DistributionSpec& spec);

}  // namespace rmp
