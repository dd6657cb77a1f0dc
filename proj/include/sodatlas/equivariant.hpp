#pragma once

#include "sodatlas/catalog.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sodatlas {

struct EquivariantError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A finite group acting on the Picard lattice through integer matrices (acting on columns).
// Generators must preserve the intersection form and fix K; the closure is enumerated eagerly.
class GroupAction {
public:
    static constexpr std::size_t kDefaultCap = 10000;

    GroupAction(std::shared_ptr<const SurfaceModel> s, std::vector<Mat> generators, std::size_t cap = kDefaultCap);
    static GroupAction trivial(std::shared_ptr<const SurfaceModel> s);

    const SurfaceModel& surface() const { return *surface_; }
    std::shared_ptr<const SurfaceModel> surface_ptr() const { return surface_; }
    const std::vector<Mat>& generators() const { return generators_; }
    const std::vector<Mat>& elements() const { return elements_; } // elements()[0] is the identity
    std::size_t order() const { return elements_.size(); }
    std::size_t index_of(const Mat& g) const;
    std::size_t multiply_index(std::size_t a, std::size_t b) const;
    std::size_t inverse_index(std::size_t a) const;
    std::size_t element_order(std::size_t a) const;
    // Index of an element generating the whole group, if the group is cyclic.
    std::optional<std::size_t> cyclic_generator() const;

    DivisorClass apply(std::size_t element, const DivisorClass& d) const;
    KClass apply(std::size_t element, const KClass& k) const;

private:
    std::shared_ptr<const SurfaceModel> surface_;
    std::vector<Mat> generators_;
    std::vector<Mat> elements_;
    std::map<Mat, std::size_t> index_;
};

// Generators touching only the exceptional classes, written as permutations of E_i (1-based).
Mat exceptional_permutation(const SurfaceModel& s, const std::vector<std::size_t>& perm);
// Quadratic transformation centred at E_a, E_b, E_c on a blow-up of P2.
Mat quadratic_involution(const SurfaceModel& s, std::size_t a, std::size_t b, std::size_t c);

std::size_t invariant_rank(const GroupAction& a);

// Throws EquivariantError if the set is not stable under the generators.
std::vector<std::vector<DivisorClass>> orbits(const GroupAction& a, const std::vector<DivisorClass>& classes);

bool is_invariant_collection(const Collection& c, const GroupAction& a);

using Subgroup = std::vector<std::size_t>; // sorted element indices

struct TransitiveGSet {
    std::size_t size = 1;
    Subgroup stabilizer;               // empty for an abstract G-set
    std::string label;                 // abstract G-sets compare by (size, label)
    std::shared_ptr<const GroupAction> group;

    static TransitiveGSet abstract(std::string label, std::size_t size);
    static TransitiveGSet point(std::shared_ptr<const GroupAction> g);
    static TransitiveGSet of_orbit(std::shared_ptr<const GroupAction> g, const std::vector<DivisorClass>& orbit);

    // Same size and conjugate stabilizers (or same abstract label).
    bool isomorphic(const TransitiveGSet& o) const;
    std::string describe() const;
};

bool conjugate_subgroups(const GroupAction& g, const Subgroup& a, const Subgroup& b);

class BurnsideElement {
public:
    void add(const TransitiveGSet& x, long coefficient);
    BurnsideElement operator+(const BurnsideElement& o) const;
    BurnsideElement operator-() const;
    bool is_zero() const { return terms_.empty(); }
    const std::vector<std::pair<TransitiveGSet, long>>& terms() const { return terms_; }
    bool operator==(const BurnsideElement& o) const;
    std::string describe() const; // "0", "-[Z:3]", "[1] - [3, |H|=2]"

private:
    std::vector<std::pair<TransitiveGSet, long>> terms_;
};

struct BirationalStep {
    enum class Kind { BlowUp, BlowDown };
    Kind kind = Kind::BlowUp;
    TransitiveGSet orbit;
};

// Sum of +[orbit] over blow-downs and -[orbit] over blow-ups.
BurnsideElement burnside_invariant(const std::vector<BirationalStep>& steps);

struct Atom {
    enum class Kind { PermutationType, Opaque };
    Kind kind = Kind::PermutationType;
    TransitiveGSet gset;
    std::optional<std::string> twist;
    std::string shape; // opaque atoms: "O-perp", "ker pi_*", "K-nef"
    Int degree = 0;

    bool same_as(const Atom& o) const;
    std::string describe() const;
};

struct Contraction {
    enum class Minimal { Point, ConicBundle, Curve };
    std::vector<std::vector<DivisorClass>> blown_orbits; // contracted first to last
    Minimal minimal = Minimal::Point;
    std::optional<DivisorClass> fibre;                   // conic bundle fibre on the minimal model
    std::map<std::size_t, std::string> twists;           // 0-based index into the standard atoms
};

std::vector<Atom> atom_multiset(std::shared_ptr<const GroupAction> a, const Contraction& c);
// Multiset difference with equality of (gset, twist, shape, degree); returns atoms of x not in y and vice versa.
std::pair<std::vector<Atom>, std::vector<Atom>> atom_difference(const std::vector<Atom>& x, const std::vector<Atom>& y);

struct H1Result {
    Vec torsion; // invariant factors > 1
    std::size_t free_rank = 0;
    bool is_zero() const { return torsion.empty() && free_rank == 0; }
    std::string describe() const; // "0", "Z/2", "Z/2 + Z/2"
};

// Group cohomology H^1(G, Pic) from cocycles determined by their values on generators.
H1Result h1_picard(const GroupAction& a, std::size_t cap = 48);
// ker(Norm) / im(g - 1) for a cyclic group generated by g of order m.
H1Result h1_cyclic(const Mat& g, std::size_t m);

struct PermutationCertificate {
    bool ok = false;
    std::vector<KClass> basis;
    std::vector<std::vector<std::size_t>> permutations; // one per generator: basis i -> permutations[i]
    std::vector<std::size_t> block_orbit_sizes;
    std::string detail;
};

// Checks that the classes of c form a Z-basis of K0 permuted by every generator.
PermutationCertificate permutation_basis_certificate(const Collection& c, const GroupAction& a);

struct MinimalityProxy {
    bool minimal = true;
    std::vector<std::vector<DivisorClass>> contractible_orbits; // orbits of pairwise disjoint (-1)-classes
};

// Numerical proxy: no orbit of pairwise disjoint (-1)-classes.
MinimalityProxy minimality_proxy(const GroupAction& a);

// "[group]" stanza: surface = P2 [3], gen = [[...],...] (repeated), optional cap.
GroupAction parse_group_action(const std::string& text);
Mat parse_matrix(const std::string& text);
// "[contraction]" stanza: blowup = E1, E2 (repeated, in contraction order),
// minimal = point | conic <fibre> | curve, and optional "twist N = label".
Contraction parse_contraction(const std::string& text, const SurfaceModel& s);
// "[steps]" stanza of "up = ..." / "down = ..." lines. With a group an orbit is a list of
// divisor classes; without one it is an abstract G-set written label:size.
std::vector<BirationalStep> parse_birational_steps(const std::string& text, std::shared_ptr<const GroupAction> g);

} // namespace sodatlas
