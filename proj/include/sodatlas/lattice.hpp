#pragma once

#include "sodatlas/intmath.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sodatlas {

enum class BaseSurface { ProjectivePlane, Hirzebruch };

// Picard lattice of an iterated blow-up of P^2 or of a Hirzebruch surface F_d.
// Basis: (H, E1..En) over P^2, (s, h, E1..En) over F_d with s^2 = -d, s.h = 1, h^2 = 0.
class SurfaceModel {
public:
    static SurfaceModel projective_plane(std::vector<Int> blowup_orbits = {});
    static SurfaceModel hirzebruch(Int d, std::vector<Int> blowup_orbits = {});

    BaseSurface base() const { return base_; }
    Int hirzebruch_d() const { return d_; }
    const std::vector<Int>& blowup_orbits() const { return orbits_; }
    std::size_t points() const;
    std::size_t picard_rank() const { return gram_.size(); }
    std::size_t base_rank() const { return base_ == BaseSurface::ProjectivePlane ? 1 : 2; }
    const std::vector<std::string>& labels() const { return labels_; }
    const Mat& gram() const { return gram_; }
    const Vec& canonical() const { return canonical_; }
    // K.v for every basis vector v, cached for the Euler pairing.
    const Vec& canonical_dual() const { return canonical_dual_; }
    Int degree() const { return degree_; }
    std::string describe() const;

    bool operator==(const SurfaceModel& o) const
    {
        return base_ == o.base_ && d_ == o.d_ && orbits_ == o.orbits_;
    }

private:
    SurfaceModel(BaseSurface base, Int d, std::vector<Int> orbits);

    BaseSurface base_;
    Int d_;
    std::vector<Int> orbits_;
    std::vector<std::string> labels_;
    Mat gram_;
    Vec canonical_;
    Vec canonical_dual_;
    Int degree_;
};

struct DivisorClass {
    Vec c;

    DivisorClass() = default;
    explicit DivisorClass(Vec coeffs) : c(std::move(coeffs)) {}
    static DivisorClass zero(std::size_t n) { return DivisorClass(Vec(n, 0)); }
    static DivisorClass basis(std::size_t n, std::size_t i);

    std::size_t size() const { return c.size(); }
    bool is_zero() const;
    DivisorClass operator+(const DivisorClass& o) const;
    DivisorClass operator-(const DivisorClass& o) const;
    DivisorClass operator-() const;
    DivisorClass& operator+=(const DivisorClass& o);
    friend DivisorClass operator*(Int k, const DivisorClass& d);
    auto operator<=>(const DivisorClass&) const = default;
};

enum class DualMode { AntiCanonical, TwiceAntiCanonical };

struct LatticeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

Int intersect(const SurfaceModel& s, const DivisorClass& a, const DivisorClass& b);
DivisorClass canonical_class(const SurfaceModel& s);
std::optional<Int> r_class_value(const SurfaceModel& s, const DivisorClass& d);
// All r-classes; throws LatticeError outside the supported range.
std::vector<DivisorClass> enumerate_r_classes(const SurfaceModel& s, Int r);
// r-classes of the surface obtained by contracting the given pairwise orthogonal (-1)-classes,
// returned as pullbacks: classes orthogonal to every contracted class, measured against K - sum E.
std::vector<DivisorClass> enumerate_contracted_r_classes(const SurfaceModel& s, Int r, const std::vector<DivisorClass>& contracted);
DivisorClass dual_class(const SurfaceModel& s, const DivisorClass& d, DualMode mode);
SurfaceModel blow_up(const SurfaceModel& s, Int orbit_size);

// Lattice points x with x^T q x == target for a positive definite integer form q.
std::vector<Vec> lattice_points_of_norm(const Mat& q, Int target);

// Rendering and parsing in the surface basis, e.g. "2H-E1-E2".
std::string format_divisor(const SurfaceModel& s, const DivisorClass& d);

// Named classes available to expressions: basis labels, K, plus user definitions.
class DivisorNames {
public:
    explicit DivisorNames(const SurfaceModel& s);
    void define(const std::string& name, const DivisorClass& d);
    bool contains(const std::string& name) const { return names_.count(name) != 0; }
    const DivisorClass& at(const std::string& name) const;
    const std::map<std::string, DivisorClass>& all() const { return names_; }
    DivisorClass parse(const std::string& expr) const;

private:
    std::size_t rank_;
    std::map<std::string, DivisorClass> names_;
};

} // namespace sodatlas
