#include "rmp/distributions.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include <json.hpp>

#include "rmp/errors.hpp"

namespace rmp {

namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

constexpr double kAtomSumTolerance = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_finite(double v, const std::string& field) {
    if (!std::isfinite(v)) throw SpecError(field, "must be finite");
}

void validate_triple(const EntryTriple& t, const std::string& field) {
    require_finite(t.a, field + ".a");
    require_finite(t.b, field + ".b");
    require_finite(t.c, field + ".c");
    if (t.a == 0.0) throw SpecError(field + ".a", "a must be nonzero");
}

void validate(const BinaryHill& d) {
    require_finite(d.alpha, "alpha");
    require_finite(d.beta, "beta");
    require_finite(d.p, "p");
    for (auto [v, name] : {std::pair{d.alpha, "alpha"}, std::pair{d.beta, "beta"}}) {
        if (v == 0.0 || v == -1.0) throw SpecError(name, "must not be 0 or -1");
    }
    const double a = d.alpha;
    const double b = d.beta;
    if ((a * b * b + 1.0) * (a * a * b + 1.0) == 0.0)
        throw SpecError("alpha", "(alpha*beta^2 + 1)(alpha^2*beta + 1) must be nonzero");
    if (d.p < 0.0 || d.p > 1.0) throw SpecError("p", "must lie in [0, 1]");
}

void validate(const UniformRankOne& d) {
    require_finite(d.a, "a");
    require_finite(d.b, "b");
    if (d.a < 0.0) throw SpecError("a", "interval is [-a, b]; a must be >= 0");
    if (d.b < 0.0) throw SpecError("b", "interval is [-a, b]; b must be >= 0");
    if (d.a + d.b <= 0.0) throw SpecError("b", "interval [-a, b] must have positive length");
}

void validate(const ExponentialRankOne& d) {
    if (!std::isfinite(d.theta) || d.theta <= 0.0) throw SpecError("theta", "rate must be finite and > 0");
}

void validate(const CauchyRankOne&) {}

void validate(const HillRandom& d) {
    if (!std::isfinite(d.theta) || d.theta <= 0.0) throw SpecError("theta", "rate must be finite and > 0");
}

void validate(const DiscreteAtoms& d) {
    if (d.atoms.empty()) throw SpecError("atoms", "must contain at least one atom");
    double total = 0.0;
    for (std::size_t i = 0; i < d.atoms.size(); ++i) {
        const std::string field = "atoms[" + std::to_string(i) + "]";
        validate_triple(d.atoms[i].triple, field);
        const double p = d.atoms[i].probability;
        if (!std::isfinite(p) || p <= 0.0) throw SpecError(field + ".p", "probability must be > 0");
        total += p;
    }
    if (std::abs(total - 1.0) > kAtomSumTolerance)
        throw SpecError("atoms", "probabilities must sum to 1 (got " + std::to_string(total) + ")");
}

void validate(const ConstantTriple& d) { validate_triple(d.value, "value"); }

// --- parsing -------------------------------------------------------------

double number_field(const Json& doc, const char* name) {
    if (!doc.contains(name)) throw SpecError(name, "missing required field");
    const Json& v = doc.at(name);
    if (!v.is_number()) throw SpecError(name, "must be a number");
    return v.get<double>();
}

EntryTriple triple_field(const Json& v, const std::string& field) {
    if (!v.is_array() || v.size() != 3) throw SpecError(field, "must be an array [a, b, c]");
    std::array<double, 3> xs{};
    static constexpr std::array<const char*, 3> names{".a", ".b", ".c"};
    for (std::size_t k = 0; k < 3; ++k) {
        if (!v[k].is_number()) throw SpecError(field + names[k], "must be a number");
        xs[k] = v[k].get<double>();
    }
    return {xs[0], xs[1], xs[2]};
}

void reject_unknown(const Json& doc, std::initializer_list<const char*> allowed) {
    std::set<std::string> ok{"family"};
    for (const char* a : allowed) ok.insert(a);
    for (const auto& [key, value] : doc.items()) {
        if (!ok.contains(key)) throw SpecError(key, "unknown field for family " + doc.at("family").get<std::string>());
    }
}

DistributionSpec::Params parse_params(const Json& doc) {
    if (!doc.is_object()) throw SpecError("document", "top level must be a JSON object");
    if (!doc.contains("family")) throw SpecError("family", "missing required field");
    if (!doc.at("family").is_string()) throw SpecError("family", "must be a string");
    const auto family = doc.at("family").get<std::string>();

    if (family == "BinaryHill") {
        reject_unknown(doc, {"alpha", "beta", "p"});
        return BinaryHill{number_field(doc, "alpha"), number_field(doc, "beta"), number_field(doc, "p")};
    }
    if (family == "UniformRankOne") {
        reject_unknown(doc, {"a", "b"});
        return UniformRankOne{number_field(doc, "a"), number_field(doc, "b")};
    }
    if (family == "ExponentialRankOne") {
        reject_unknown(doc, {"theta"});
        return ExponentialRankOne{number_field(doc, "theta")};
    }
    if (family == "CauchyRankOne") {
        reject_unknown(doc, {});
        return CauchyRankOne{};
    }
    if (family == "HillRandom") {
        reject_unknown(doc, {"theta"});
        return HillRandom{number_field(doc, "theta")};
    }
    if (family == "DiscreteAtoms") {
        reject_unknown(doc, {"atoms"});
        if (!doc.contains("atoms")) throw SpecError("atoms", "missing required field");
        const Json& list = doc.at("atoms");
        if (!list.is_array()) throw SpecError("atoms", "must be an array of [[a, b, c], p] pairs");
        DiscreteAtoms out;
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string field = "atoms[" + std::to_string(i) + "]";
            const Json& item = list[i];
            if (!item.is_array() || item.size() != 2) throw SpecError(field, "must be [[a, b, c], p]");
            if (!item[1].is_number()) throw SpecError(field + ".p", "must be a number");
            out.atoms.push_back({triple_field(item[0], field), item[1].get<double>()});
        }
        return out;
    }
    if (family == "ConstantTriple") {
        reject_unknown(doc, {"value"});
        if (!doc.contains("value")) throw SpecError("value", "missing required field");
        return ConstantTriple{triple_field(doc.at("value"), "value")};
    }
    throw SpecError("family", "unknown family '" + family + "'");
}

OrderedJson triple_json(const EntryTriple& t) { return OrderedJson::array({t.a, t.b, t.c}); }

double exponential(RandomStream& s, double rate) { return -std::log(s.uniform_open()) / rate; }

double cauchy(RandomStream& s) { return std::tan(std::numbers::pi * (s.uniform_open() - 0.5)); }

// Draws until nonzero; a zero is a probability-zero floating point event.
template <class Draw>
double nonzero(Draw&& draw) {
    for (;;) {
        const double x = draw();
        if (x != 0.0) return x;
    }
}

}  // namespace

bool is_valid(const EntryTriple& t) noexcept {
    return t.a != 0.0 && std::isfinite(t.a) && std::isfinite(t.b) && std::isfinite(t.c);
}

std::string_view family_name(Family f) noexcept {
    switch (f) {
        case Family::BinaryHill: return "BinaryHill";
        case Family::UniformRankOne: return "UniformRankOne";
        case Family::ExponentialRankOne: return "ExponentialRankOne";
        case Family::CauchyRankOne: return "CauchyRankOne";
        case Family::HillRandom: return "HillRandom";
        case Family::DiscreteAtoms: return "DiscreteAtoms";
        case Family::ConstantTriple: return "ConstantTriple";
    }
    return "unknown";
}

DistributionSpec::DistributionSpec(Params params) : params_(std::move(params)) {
    std::visit([](const auto& p) { validate(p); }, params_);
}

bool DistributionSpec::is_rank_one() const noexcept {
    const Family f = family();
    return f == Family::UniformRankOne || f == Family::ExponentialRankOne || f == Family::CauchyRankOne;
}

bool DistributionSpec::is_discrete() const noexcept {
    const Family f = family();
    return f == Family::BinaryHill || f == Family::DiscreteAtoms || f == Family::ConstantTriple;
}

DistributionSpec parse_spec(std::string_view text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw SpecError("document", std::string("malformed JSON: ") + e.what());
    }
    return DistributionSpec(parse_params(doc));
}

std::string to_json_text(const DistributionSpec& spec) {
    OrderedJson out;
    out["family"] = std::string(family_name(spec.family()));
    std::visit(Overloaded{
                   [&](const BinaryHill& d) {
                       out["alpha"] = d.alpha;
                       out["beta"] = d.beta;
                       out["p"] = d.p;
                   },
                   [&](const UniformRankOne& d) {
                       out["a"] = d.a;
                       out["b"] = d.b;
                   },
                   [&](const ExponentialRankOne& d) { out["theta"] = d.theta; },
                   [&](const CauchyRankOne&) {},
                   [&](const HillRandom& d) { out["theta"] = d.theta; },
                   [&](const DiscreteAtoms& d) {
                       auto list = OrderedJson::array();
                       for (const auto& atom : d.atoms)
                           list.push_back(OrderedJson::array({triple_json(atom.triple), atom.probability}));
                       out["atoms"] = std::move(list);
                   },
                   [&](const ConstantTriple& d) { out["value"] = triple_json(d.value); },
               },
               spec.params());
    return out.dump();
}

EntryTriple sample_triple(const DistributionSpec& spec, RandomStream& stream) {
    return std::visit(
        Overloaded{
            [&](const BinaryHill& d) {
                const double x = stream.uniform_open() < d.p ? d.alpha : d.beta;
                return EntryTriple{x, 1.0 / x, 1.0};
            },
            [&](const UniformRankOne& d) {
                const double width = d.a + d.b;
                const double x = nonzero([&] { return -d.a + width * stream.uniform_open(); });
                const double y = -d.a + width * stream.uniform_open();
                return EntryTriple{x, x, y};
            },
            [&](const ExponentialRankOne& d) {
                const double x = nonzero([&] { return exponential(stream, d.theta); });
                const double y = exponential(stream, d.theta);
                return EntryTriple{x, x, y};
            },
            [&](const CauchyRankOne&) {
                const double x = nonzero([&] { return cauchy(stream); });
                const double y = cauchy(stream);
                return EntryTriple{x, x, y};
            },
            [&](const HillRandom& d) {
                const double x = nonzero([&] { return exponential(stream, d.theta); });
                return EntryTriple{1.0, x, 1.0 / x};
            },
            [&](const DiscreteAtoms& d) {
                const double u = stream.uniform_open();
                double cumulative = 0.0;
                for (const auto& atom : d.atoms) {
                    cumulative += atom.probability;
                    if (u < cumulative) return atom.triple;
                }
                return d.atoms.back().triple;
            },
            [&](const ConstantTriple& d) { return d.value; },
        },
        spec.params());
}

std::vector<Atom> enumerate_atoms(const DistributionSpec& spec) {
    return std::visit(
        Overloaded{
            [](const BinaryHill& d) {
                std::vector<Atom> out;
                if (d.p > 0.0) out.push_back({{d.alpha, 1.0 / d.alpha, 1.0}, d.p});
                if (d.p < 1.0) out.push_back({{d.beta, 1.0 / d.beta, 1.0}, 1.0 - d.p});
                return out;
            },
            [](const DiscreteAtoms& d) { return d.atoms; },
            [](const ConstantTriple& d) { return std::vector<Atom>{{d.value, 1.0}}; },
            [&](const auto&) -> std::vector<Atom> {
                throw NotDiscreteError("not discrete: family " + std::string(family_name(spec.family())) +
                                       " has no finite support");
            },
        },
        spec.params());
}

}  // namespace rmp
