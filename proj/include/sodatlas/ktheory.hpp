#pragma once

#include "sodatlas/lattice.hpp"

#include <string>

namespace sodatlas {

// Class in K0 of a rational surface: (rank, c1, chi).
struct KClass {
    Int rank = 0;
    DivisorClass c1;
    Int chi = 0;

    KClass() = default;
    KClass(Int r, DivisorClass c, Int x) : rank(r), c1(std::move(c)), chi(x) {}
    static KClass zero(std::size_t picard_rank) { return KClass(0, DivisorClass::zero(picard_rank), 0); }

    KClass operator+(const KClass& o) const;
    KClass operator-(const KClass& o) const;
    KClass operator-() const;
    friend KClass operator*(Int k, const KClass& a);
    auto operator<=>(const KClass&) const = default;

    // Coordinates (rank, c1..., chi) as one integer vector.
    Vec coords() const;
    static KClass from_coords(const Vec& v);
};

enum class Side { Left, Right };

Int chi_line_bundle(const SurfaceModel& s, const DivisorClass& d);
KClass line_bundle_class(const SurfaceModel& s, const DivisorClass& d);
// O_E(k) for a (-1)-class E.
KClass torsion_class(const SurfaceModel& s, const DivisorClass& e, Int k);
Int euler_pairing(const SurfaceModel& s, const KClass& a, const KClass& b);
KClass twist(const SurfaceModel& s, const KClass& a, const DivisorClass& l);
KClass serre_class(const SurfaceModel& s, const KClass& a);
KClass mutate_class(const SurfaceModel& s, const KClass& e, const KClass& t, Side side);

// Flip sign so the first nonzero coordinate is positive.
KClass normalize_sign(const KClass& a);
// "(r; c1-coeffs; chi)"
std::string format_kclass(const KClass& a);
// Best-effort readable name: O(D), -O(D), O_E(k), or the raw triple.
std::string describe_kclass(const SurfaceModel& s, const KClass& a);

// Matrix of x -> twist(x, l) acting on coords() columns.
Mat twist_matrix(const SurfaceModel& s, const DivisorClass& l);
// Gram matrix of the Euler pairing on the coordinate basis: chi(a,b) = a^T P b.
Mat euler_form_matrix(const SurfaceModel& s);

} // namespace sodatlas
