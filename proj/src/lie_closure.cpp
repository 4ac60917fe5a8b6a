#include "flowlab/lie_closure.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "flowlab/families.hpp"

namespace flowlab {

namespace {

// Coordinate of the ambient vector space: a monomial slot inside one field
// component. Ordered graded-lex on the monomial with the component index as
// tie break, matching the echelon pivoting rule.
struct CoordKey {
    Monomial mono;
    int comp;
};

struct CoordKeyLess {
    bool operator()(const CoordKey& a, const CoordKey& b) const {
        if (!(a.mono == b.mono)) return graded_lex_before(a.mono, b.mono);
        return a.comp < b.comp;
    }
};

std::optional<CoordKey> leading_coordinate(const VectorField& f) {
    std::optional<CoordKey> best;
    const CoordKeyLess less;
    for (int i = 0; i < f.dimension(); ++i) {
        const auto& terms = f.component(i).terms();
        if (terms.empty()) continue;
        CoordKey candidate{terms.begin()->first, i};
        if (!best || less(candidate, *best)) best = candidate;
    }
    return best;
}

Rational coordinate_of(const VectorField& f, const CoordKey& key) {
    return f.component(key.comp).coefficient(key.mono);
}

struct Entry {
    VectorField field;
    int depth;
};

using Basis = std::map<CoordKey, Entry, CoordKeyLess>;

// One pass suffices: basis tails never contain pivot coordinates, so each
// subtraction clears exactly one pivot slot of `f` and introduces none.
void reduce_against(const Basis& basis, VectorField& f, std::vector<Rational>* coords) {
    std::size_t index = 0;
    for (const auto& [pivot, entry] : basis) {
        const Rational c = coordinate_of(f, pivot);
        if (c != 0) {
            f = f - entry.field * c;
            if (coords) (*coords)[index] = c;
        }
        ++index;
    }
}

// Inserts `f` if independent of the current basis, keeping the basis in
// fully reduced echelon form. Returns whether a new element was added.
bool insert_reduced(Basis& basis, VectorField f, int depth) {
    reduce_against(basis, f, nullptr);
    const auto pivot = leading_coordinate(f);
    if (!pivot) return false;
    f = f * (Rational(1) / coordinate_of(f, *pivot));
    for (auto& [key, entry] : basis) {
        const Rational c = coordinate_of(entry.field, *pivot);
        if (c != 0) entry.field = entry.field - f * c;
    }
    basis.emplace(*pivot, Entry{std::move(f), depth});
    return true;
}

std::vector<const Entry*> snapshot(const Basis& basis) {
    std::vector<const Entry*> out;
    out.reserve(basis.size());
    for (const auto& [key, entry] : basis) out.push_back(&entry);
    return out;
}

}  // namespace

ClosureBasis lie_closure(const std::vector<VectorField>& generators, int degree_cap,
                         int depth_cap) {
    if (generators.empty()) throw std::invalid_argument("lie_closure: empty generator list");
    if (degree_cap < 1 || depth_cap < 1)
        throw std::invalid_argument("lie_closure: caps must be >= 1");
    const int d = generators.front().dimension();
    for (const auto& g : generators) {
        if (g.dimension() != d)
            throw std::invalid_argument("lie_closure: generator dimension mismatch");
    }

    Basis basis;
    for (const auto& g : generators) {
        if (g.degree() <= degree_cap) insert_reduced(basis, g, 0);
    }

    int rounds = 0;
    // Growth phase: bracket last round's fresh elements against everything.
    for (int round = 1; round <= depth_cap; ++round) {
        const auto snap = snapshot(basis);
        std::vector<VectorField> fresh;
        for (const auto* e : snap) {
            if (e->depth == round - 1) fresh.push_back(e->field);
        }
        if (fresh.empty()) break;
        std::vector<VectorField> all;
        all.reserve(snap.size());
        for (const auto* e : snap) all.push_back(e->field);

        bool added = false;
        for (const auto& f : fresh) {
            for (const auto& g : all) {
                VectorField br = lie_bracket(f, g);
                if (br.is_zero() || br.degree() > degree_cap) continue;
                added |= insert_reduced(basis, std::move(br), round);
            }
        }
        rounds = round;
        if (!added) break;
    }

    // Certification phase: the basis mutates during reduction, so re-bracket
    // final pairs until a full sweep adds nothing. A sweep that would need to
    // nest beyond depth_cap leaves the slice uncertified.
    bool fixpoint = false;
    bool depth_exhausted = false;
    while (!fixpoint && !depth_exhausted) {
        const auto snap = snapshot(basis);
        bool added = false;
        for (std::size_t i = 0; i < snap.size() && !depth_exhausted; ++i) {
            for (std::size_t j = i + 1; j < snap.size(); ++j) {
                VectorField br = lie_bracket(snap[i]->field, snap[j]->field);
                if (br.is_zero() || br.degree() > degree_cap) continue;
                const int nd = std::max(snap[i]->depth, snap[j]->depth) + 1;
                if (nd > depth_cap) {
                    VectorField probe = br;
                    reduce_against(basis, probe, nullptr);
                    if (!probe.is_zero()) {
                        depth_exhausted = true;
                        break;
                    }
                    continue;
                }
                if (insert_reduced(basis, std::move(br), nd)) {
                    added = true;
                    rounds = std::max(rounds, nd);
                }
            }
        }
        fixpoint = !added && !depth_exhausted;
    }

    ClosureBasis result;
    result.dimension_ = d;
    result.degree_cap_ = degree_cap;
    result.depth_cap_ = depth_cap;
    result.reached_fixpoint_ = fixpoint;
    result.rounds_used_ = rounds;
    result.generators_ = generators;
    result.basis_.reserve(basis.size());
    for (const auto& [key, entry] : basis) result.basis_.push_back(entry.field);
    return result;
}

MembershipCertificate ClosureBasis::contains(const VectorField& f) const {
    if (f.dimension() != dimension_)
        throw std::invalid_argument("contains: dimension mismatch");
    MembershipCertificate cert;
    if (f.degree() > degree_cap_) {
        cert.status = MembershipCertificate::Status::Indeterminate;
        return cert;
    }
    // Rebuild the pivot map from the stored basis (each element keeps its
    // leading coordinate as pivot).
    Basis basis;
    for (const auto& b : basis_) {
        const auto pivot = leading_coordinate(b);
        basis.emplace(*pivot, Entry{b, 0});
    }
    cert.coordinates.assign(basis_.size(), Rational(0));
    VectorField rem = f;
    reduce_against(basis, rem, &cert.coordinates);
    if (rem.is_zero()) {
        cert.status = MembershipCertificate::Status::Member;
    } else {
        cert.status = MembershipCertificate::Status::NotMember;
        cert.coordinates.clear();
    }
    return cert;
}

VectorField ClosureBasis::combine(std::span<const Rational> coordinates) const {
    if (coordinates.size() != basis_.size())
        throw std::invalid_argument("combine: coordinate count mismatch");
    VectorField acc = VectorField::zero(dimension_);
    for (std::size_t i = 0; i < basis_.size(); ++i) {
        if (coordinates[i] != 0) acc = acc + basis_[i] * coordinates[i];
    }
    return acc;
}

bool verify_monomial_closure(const std::vector<VectorField>& generators, int degree_cap) {
    const ClosureBasis closure = lie_closure(generators, degree_cap, 12);
    for (int total = 2; total <= degree_cap; ++total) {
        for (int i = 0; i <= total; ++i) {
            const int j = total - i;
            const Polynomial mono =
                Polynomial::monomial(2, Monomial(std::vector<int>{i, j}), Rational(1));
            for (int comp = 0; comp < 2; ++comp) {
                std::vector<Polynomial> comps(2, Polynomial::zero(2));
                comps[comp] = mono;
                if (!closure.contains(VectorField(std::move(comps))).is_member()) return false;
            }
        }
    }
    return true;
}

bool verify_origin_fixed_closure(int degree_cap) {
    if (degree_cap < 3)
        throw std::invalid_argument("verify_origin_fixed_closure: degree_cap must be >= 3");
    return verify_monomial_closure(families::origin_fixed_generators(), degree_cap);
}

}  // namespace flowlab
