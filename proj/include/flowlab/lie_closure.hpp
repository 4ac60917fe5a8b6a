#pragma once

#include <optional>
#include <span>
#include <vector>

#include "flowlab/vector_field.hpp"

namespace flowlab {

// Result of testing a field against a ClosureBasis. Coordinates are aligned
// with the basis order and reconstruct the field exactly when status is
// Member. Fields whose degree exceeds the basis cap are Indeterminate: the
// filtered slice cannot decide them either way.
struct MembershipCertificate {
    enum class Status { Member, NotMember, Indeterminate };
    Status status = Status::NotMember;
    std::vector<Rational> coordinates;

    bool is_member() const { return status == Status::Member; }
};

// Finite slice of a Lie closure: the span of all bracket-generated fields
// with component degree <= degree_cap and bracket nesting <= depth_cap, kept
// as a reduced echelon basis over Q. Pivoting is graded-lex on the leading
// monomial with first-nonzero-component tie break, so the basis is canonical
// for a given generator list and caps.
class ClosureBasis {
   public:
    int dimension() const { return dimension_; }
    int degree_cap() const { return degree_cap_; }
    int depth_cap() const { return depth_cap_; }
    // True when iteration stopped because no new independent bracket appeared
    // (rather than hitting depth_cap); only then is the slice certified
    // bracket-closed.
    bool reached_fixpoint() const { return reached_fixpoint_; }
    int rounds_used() const { return rounds_used_; }

    const std::vector<VectorField>& generators() const { return generators_; }
    const std::vector<VectorField>& basis() const { return basis_; }
    std::size_t size() const { return basis_.size(); }

    MembershipCertificate contains(const VectorField& f) const;

    // Exact linear combination of basis elements.
    VectorField combine(std::span<const Rational> coordinates) const;

   private:
    friend ClosureBasis lie_closure(const std::vector<VectorField>&, int, int);

    int dimension_ = 0;
    int degree_cap_ = 0;
    int depth_cap_ = 0;
    bool reached_fixpoint_ = false;
    int rounds_used_ = 0;
    std::vector<VectorField> generators_;
    std::vector<VectorField> basis_;
};

// Fixed-point bracket generation: seed with the degree-filtered generators,
// bracket new elements against the whole basis each round, discard results
// over degree_cap, reduce the rest, and stop at depth_cap or when a full
// all-pairs sweep adds nothing.
ClosureBasis lie_closure(const std::vector<VectorField>& generators, int degree_cap,
                         int depth_cap);

inline constexpr int kDefaultDegreeCap = 8;
inline constexpr int kDefaultDepthCap = 8;

// Closure completeness check for the componentwise cubic family: builds the
// closure of its six generator fields and reports whether every monomial
// field (x1^i x2^j, 0) and (0, x1^i x2^j) with 2 <= i+j <= degree_cap is a
// member.
bool verify_origin_fixed_closure(int degree_cap);

// Same check against an arbitrary generator list (used to show the check
// fails when a generator is removed).
bool verify_monomial_closure(const std::vector<VectorField>& generators, int degree_cap);

}  // namespace flowlab
