#include "sodatlas/equivariant.hpp"

#include "json.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

namespace sodatlas {

GroupAction::GroupAction(std::shared_ptr<const SurfaceModel> s, std::vector<Mat> generators, std::size_t cap)
    : surface_(std::move(s)), generators_(std::move(generators))
{
    const std::size_t n = surface_->picard_rank();
    const Mat& m = surface_->gram();
    for (std::size_t i = 0; i < generators_.size(); ++i) {
        const Mat& g = generators_[i];
        if (g.size() != n || std::any_of(g.begin(), g.end(), [n](const Vec& r) { return r.size() != n; }))
            throw EquivariantError("generator " + std::to_string(i + 1) + " is not " + std::to_string(n) + "x" + std::to_string(n));
        if (multiply(transpose(g), multiply(m, g)) != m)
            throw EquivariantError("generator " + std::to_string(i + 1) + " does not preserve the intersection form");
        if (multiply(g, surface_->canonical()) != surface_->canonical())
            throw EquivariantError("generator " + std::to_string(i + 1) + " does not fix K");
    }
    elements_.push_back(identity(n));
    index_[elements_[0]] = 0;
    for (std::size_t at = 0; at < elements_.size(); ++at)
        for (const Mat& g : generators_) {
            Mat next = multiply(elements_[at], g);
            if (index_.count(next))
                continue;
            if (elements_.size() >= cap)
                throw EquivariantError("group closure exceeds the cap of " + std::to_string(cap) + " elements");
            index_[next] = elements_.size();
            elements_.push_back(std::move(next));
        }
}

GroupAction GroupAction::trivial(std::shared_ptr<const SurfaceModel> s)
{
    return GroupAction(std::move(s), {});
}

std::size_t GroupAction::index_of(const Mat& g) const
{
    auto it = index_.find(g);
    if (it == index_.end())
        throw EquivariantError("matrix is not an element of the group");
    return it->second;
}

std::size_t GroupAction::multiply_index(std::size_t a, std::size_t b) const
{
    return index_of(multiply(elements_.at(a), elements_.at(b)));
}

std::size_t GroupAction::inverse_index(std::size_t a) const
{
    return index_of(inverse_unimodular(elements_.at(a)));
}

std::size_t GroupAction::element_order(std::size_t a) const
{
    std::size_t k = 1;
    for (std::size_t x = a; x != 0; x = multiply_index(x, a))
        ++k;
    return k;
}

std::optional<std::size_t> GroupAction::cyclic_generator() const
{
    for (std::size_t i = 0; i < elements_.size(); ++i)
        if (element_order(i) == elements_.size())
            return i;
    return std::nullopt;
}

DivisorClass GroupAction::apply(std::size_t element, const DivisorClass& d) const
{
    return DivisorClass(multiply(elements_.at(element), d.c));
}

KClass GroupAction::apply(std::size_t element, const KClass& k) const
{
    return KClass(k.rank, apply(element, k.c1), k.chi);
}

Mat exceptional_permutation(const SurfaceModel& s, const std::vector<std::size_t>& perm)
{
    const std::size_t n = s.picard_rank(), b = s.base_rank();
    if (perm.size() != s.points())
        throw EquivariantError("permutation must list an image for every exceptional class");
    Mat m = identity(n);
    std::vector<bool> seen(perm.size(), false);
    for (std::size_t i = 0; i < perm.size(); ++i) {
        if (perm[i] < 1 || perm[i] > perm.size() || seen[perm[i] - 1])
            throw EquivariantError("not a permutation of the exceptional classes");
        seen[perm[i] - 1] = true;
        m[b + i][b + i] = 0;
    }
    for (std::size_t i = 0; i < perm.size(); ++i)
        m[b + perm[i] - 1][b + i] = 1;
    return m;
}

Mat quadratic_involution(const SurfaceModel& s, std::size_t a, std::size_t b, std::size_t c)
{
    if (s.base() != BaseSurface::ProjectivePlane)
        throw EquivariantError("quadratic involution needs a blow-up of P2");
    const std::size_t n = s.picard_rank();
    std::set<std::size_t> centres = {a, b, c};
    if (centres.size() != 3 || *centres.begin() < 1 || *centres.rbegin() > s.points())
        throw EquivariantError("quadratic involution needs three distinct exceptional classes");
    Mat m = identity(n);
    // H -> 2H - Ea - Eb - Ec, Ea -> H - Eb - Ec.
    m[0][0] = 2;
    for (std::size_t e : centres)
        m[e][0] = -1;
    for (std::size_t e : centres) {
        for (std::size_t i = 0; i < n; ++i)
            m[i][e] = 0;
        m[0][e] = 1;
        for (std::size_t f : centres)
            if (f != e)
                m[f][e] = -1;
    }
    return m;
}

std::size_t invariant_rank(const GroupAction& a)
{
    const std::size_t n = a.surface().picard_rank();
    Mat stacked;
    for (const Mat& g : a.generators()) {
        const Mat d = subtract(g, identity(n));
        stacked.insert(stacked.end(), d.begin(), d.end());
    }
    return stacked.empty() ? n : n - rank(stacked);
}

std::vector<std::vector<DivisorClass>> orbits(const GroupAction& a, const std::vector<DivisorClass>& classes)
{
    std::set<DivisorClass> all(classes.begin(), classes.end());
    std::set<DivisorClass> seen;
    std::vector<std::vector<DivisorClass>> out;
    std::vector<std::size_t> gens;
    for (const Mat& g : a.generators())
        gens.push_back(a.index_of(g));
    for (const auto& start : all) {
        if (seen.count(start))
            continue;
        std::vector<DivisorClass> orbit = {start};
        seen.insert(start);
        for (std::size_t at = 0; at < orbit.size(); ++at)
            for (std::size_t g : gens) {
                DivisorClass img = a.apply(g, orbit[at]);
                if (!all.count(img))
                    throw EquivariantError("class set is not stable: " + format_divisor(a.surface(), orbit[at]) + " maps to "
                        + format_divisor(a.surface(), img));
                if (seen.insert(img).second)
                    orbit.push_back(std::move(img));
            }
        std::sort(orbit.begin(), orbit.end());
        out.push_back(std::move(orbit));
    }
    return out;
}

bool is_invariant_collection(const Collection& c, const GroupAction& a)
{
    for (const Mat& g : a.generators()) {
        const std::size_t gi = a.index_of(g);
        for (const Block& b : c.blocks) {
            if (b.kind == BlockKind::Opaque) {
                Block img = b;
                for (auto& o : img.objects)
                    o.cls = a.apply(gi, o.cls);
                if (!blocks_equal(b, img, CompareMode::UpToSignAndBlockPerm))
                    return false;
                continue;
            }
            std::multiset<KClass> before, after;
            for (const auto& o : b.objects) {
                before.insert(normalize_sign(o.cls));
                after.insert(normalize_sign(a.apply(gi, o.cls)));
            }
            if (before != after)
                return false;
        }
    }
    return true;
}

TransitiveGSet TransitiveGSet::abstract(std::string label, std::size_t size)
{
    if (size == 0)
        throw EquivariantError("a transitive G-set is nonempty");
    TransitiveGSet t;
    t.size = size;
    t.label = std::move(label);
    return t;
}

TransitiveGSet TransitiveGSet::point(std::shared_ptr<const GroupAction> g)
{
    TransitiveGSet t;
    t.size = 1;
    t.stabilizer.resize(g->order());
    std::iota(t.stabilizer.begin(), t.stabilizer.end(), 0);
    t.group = std::move(g);
    return t;
}

TransitiveGSet TransitiveGSet::of_orbit(std::shared_ptr<const GroupAction> g, const std::vector<DivisorClass>& orbit)
{
    if (orbit.empty())
        throw EquivariantError("empty orbit");
    const auto parts = orbits(*g, orbit);
    if (parts.size() != 1)
        throw EquivariantError("classes do not form a single orbit");
    TransitiveGSet t;
    t.size = orbit.size();
    for (std::size_t e = 0; e < g->order(); ++e)
        if (g->apply(e, orbit.front()) == orbit.front())
            t.stabilizer.push_back(e);
    if (t.size * t.stabilizer.size() != g->order())
        throw EquivariantError("orbit-stabilizer count mismatch");
    t.group = std::move(g);
    return t;
}

bool conjugate_subgroups(const GroupAction& g, const Subgroup& a, const Subgroup& b)
{
    if (a.size() != b.size())
        return false;
    const std::set<std::size_t> target(b.begin(), b.end());
    for (std::size_t x = 0; x < g.order(); ++x) {
        const std::size_t xi = g.inverse_index(x);
        bool ok = true;
        for (std::size_t h : a)
            if (!target.count(g.multiply_index(g.multiply_index(x, h), xi))) {
                ok = false;
                break;
            }
        if (ok)
            return true;
    }
    return false;
}

bool TransitiveGSet::isomorphic(const TransitiveGSet& o) const
{
    if (size != o.size)
        return false;
    if (!group || !o.group)
        return !group && !o.group && label == o.label;
    if (group != o.group)
        throw EquivariantError("G-sets over different group objects cannot be compared");
    return conjugate_subgroups(*group, stabilizer, o.stabilizer);
}

std::string TransitiveGSet::describe() const
{
    if (!group)
        return label + ":" + std::to_string(size);
    return "G/H(" + std::to_string(size) + ", |H|=" + std::to_string(stabilizer.size()) + ")";
}

void BurnsideElement::add(const TransitiveGSet& x, long coefficient)
{
    for (auto it = terms_.begin(); it != terms_.end(); ++it)
        if (it->first.isomorphic(x)) {
            it->second += coefficient;
            if (it->second == 0)
                terms_.erase(it);
            return;
        }
    if (coefficient != 0)
        terms_.emplace_back(x, coefficient);
}

BurnsideElement BurnsideElement::operator+(const BurnsideElement& o) const
{
    BurnsideElement r = *this;
    for (const auto& [x, c] : o.terms_)
        r.add(x, c);
    return r;
}

BurnsideElement BurnsideElement::operator-() const
{
    BurnsideElement r = *this;
    for (auto& t : r.terms_)
        t.second = -t.second;
    return r;
}

bool BurnsideElement::operator==(const BurnsideElement& o) const
{
    return (*this + (-o)).is_zero();
}

std::string BurnsideElement::describe() const
{
    if (terms_.empty())
        return "0";
    auto sorted = terms_;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        return std::make_tuple(a.first.size, a.first.stabilizer.size(), a.first.label)
            < std::make_tuple(b.first.size, b.first.stabilizer.size(), b.first.label);
    });
    std::ostringstream os;
    bool first = true;
    for (const auto& [x, c] : sorted) {
        os << (c < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
        const long m = c < 0 ? -c : c;
        if (m != 1)
            os << m;
        os << "[" << x.describe() << "]";
        first = false;
    }
    return os.str();
}

BurnsideElement burnside_invariant(const std::vector<BirationalStep>& steps)
{
    BurnsideElement r;
    for (const auto& s : steps)
        r.add(s.orbit, s.kind == BirationalStep::Kind::BlowDown ? 1 : -1);
    return r;
}

bool Atom::same_as(const Atom& o) const
{
    if (kind != o.kind)
        return false;
    if (kind == Kind::Opaque)
        return shape == o.shape && degree == o.degree;
    return twist == o.twist && gset.isomorphic(o.gset);
}

std::string Atom::describe() const
{
    if (kind == Kind::Opaque)
        return "opaque(" + shape + ", deg " + std::to_string(degree) + ")";
    return "perm(" + gset.describe() + (twist ? ", twist " + *twist : "") + ")";
}

namespace {

Atom perm_atom(TransitiveGSet g)
{
    Atom a;
    a.gset = std::move(g);
    return a;
}

Atom opaque_atom(std::string shape, Int degree)
{
    Atom a;
    a.kind = Atom::Kind::Opaque;
    a.shape = std::move(shape);
    a.degree = degree;
    return a;
}

} // namespace

std::vector<Atom> atom_multiset(std::shared_ptr<const GroupAction> a, const Contraction& c)
{
    const SurfaceModel& s = a->surface();
    std::vector<Atom> out;
    std::vector<DivisorClass> contracted;
    for (const auto& orbit : c.blown_orbits) {
        try {
            out.push_back(perm_atom(TransitiveGSet::of_orbit(a, orbit)));
        } catch (const EquivariantError& e) {
            throw EquivariantError(std::string("inconsistent contraction: ") + e.what());
        }
        contracted.insert(contracted.end(), orbit.begin(), orbit.end());
    }
    DivisorClass kmin = canonical_class(s);
    for (const auto& e : contracted)
        kmin = kmin - e;
    const Int d = intersect(s, kmin, kmin);
    const auto point = [&] { return perm_atom(TransitiveGSet::point(a)); };
    auto r_classes = [&](Int r) {
        try {
            return enumerate_contracted_r_classes(s, r, contracted);
        } catch (const LatticeError& e) {
            throw EquivariantError(std::string("inconsistent contraction: ") + e.what());
        }
    };
    std::vector<Atom> std_atoms;
    auto orbit_atoms = [&](const std::vector<DivisorClass>& classes) {
        for (const auto& o : orbits(*a, classes))
            std_atoms.push_back(perm_atom(TransitiveGSet::of_orbit(a, o)));
    };

    switch (c.minimal) {
    case Contraction::Minimal::Point:
        if (d == 9) {
            std_atoms = {point(), point(), point()};
        } else if (d == 8) {
            const auto h = r_classes(0);
            if (h.size() != 2)
                throw EquivariantError("inconsistent contraction: degree 8 minimal model is not the quadric");
            std_atoms.push_back(point());
            orbit_atoms(h);
            std_atoms.push_back(point());
        } else if (d == 6) {
            orbit_atoms(r_classes(1));
            orbit_atoms(r_classes(0));
            std_atoms.push_back(point());
        } else if (d == 5) {
            std_atoms.push_back(point());
            orbit_atoms(r_classes(0));
            std_atoms.push_back(point());
        } else if (d >= 1 && d <= 4) {
            std_atoms = {opaque_atom("O-perp", d), point()};
        } else {
            throw EquivariantError("inconsistent contraction: no minimal del Pezzo surface of degree " + std::to_string(d));
        }
        break;
    case Contraction::Minimal::ConicBundle: {
        if (!c.fibre)
            throw EquivariantError("conic bundle contraction needs a fibre class");
        for (const Mat& g : a->generators())
            if (a->apply(a->index_of(g), *c.fibre) != *c.fibre)
                throw EquivariantError("fibre class is not invariant");
        for (const auto& e : contracted)
            if (intersect(s, e, *c.fibre) != 0)
                throw EquivariantError("inconsistent contraction: fibre meets a contracted class");
        if (intersect(s, *c.fibre, *c.fibre) != 0 || intersect(s, *c.fibre, kmin) != -2)
            throw EquivariantError("fibre is not a 0-class of the minimal model");
        if (d == 8) {
            std_atoms = {point(), point(), point(), point()};
        } else if (d == 6 || d == 5) {
            std::vector<DivisorClass> rest;
            for (const auto& h : r_classes(0))
                if (h != *c.fibre)
                    rest.push_back(h);
            if (d == 6)
                orbit_atoms(r_classes(1));
            else
                std_atoms.push_back(point());
            orbit_atoms(rest);
            std_atoms.push_back(point());
            std_atoms.push_back(point());
        } else if (d <= 4) {
            std_atoms = {opaque_atom("ker pi_*", d), point(), point()};
        } else {
            throw EquivariantError("inconsistent contraction: no Mori conic bundle of degree " + std::to_string(d));
        }
        break;
    }
    case Contraction::Minimal::Curve:
        std_atoms = {opaque_atom("ker pi_*", d), opaque_atom("pi^* Db(B)", d)};
        break;
    }
    for (const auto& [idx, label] : c.twists) {
        if (idx >= std_atoms.size() || std_atoms[idx].kind != Atom::Kind::PermutationType)
            throw EquivariantError("twist index " + std::to_string(idx) + " does not name a permutation type atom");
        std_atoms[idx].twist = label;
    }
    out.insert(out.end(), std_atoms.begin(), std_atoms.end());
    return out;
}

std::pair<std::vector<Atom>, std::vector<Atom>> atom_difference(const std::vector<Atom>& x, const std::vector<Atom>& y)
{
    std::vector<Atom> left;
    std::vector<bool> used(y.size(), false);
    for (const auto& a : x) {
        bool matched = false;
        for (std::size_t j = 0; j < y.size() && !matched; ++j)
            if (!used[j] && a.same_as(y[j]))
                used[j] = matched = true;
        if (!matched)
            left.push_back(a);
    }
    std::vector<Atom> right;
    for (std::size_t j = 0; j < y.size(); ++j)
        if (!used[j])
            right.push_back(y[j]);
    return {left, right};
}

std::string H1Result::describe() const
{
    if (is_zero())
        return "0";
    std::ostringstream os;
    bool first = true;
    for (Int t : torsion) {
        os << (first ? "" : " + ") << "Z/" << t;
        first = false;
    }
    if (free_rank)
        os << (first ? "" : " + ") << "Z^" << free_rank;
    return os.str();
}

namespace {

// H^1 = Z / B with B given by rows, both inside Z^m; Z is a row basis.
H1Result quotient(const Mat& z, const Mat& b_rows)
{
    H1Result r;
    if (z.empty())
        return r;
    Mat coords;
    for (const Vec& b : b_rows) {
        auto c = solve_in_row_lattice(z, b);
        if (!c)
            throw std::logic_error("coboundary is not a cocycle");
        coords.push_back(*c);
    }
    Vec inv = coords.empty() ? Vec{} : smith_invariants(coords);
    r.free_rank = z.size() - inv.size();
    for (Int x : inv)
        if (x > 1)
            r.torsion.push_back(x);
    return r;
}

} // namespace

H1Result h1_cyclic(const Mat& g, std::size_t m)
{
    const std::size_t n = g.size();
    Mat norm = zeros(n, n), p = identity(n);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c)
                norm[r][c] = add_checked(norm[r][c], p[r][c]);
        p = multiply(p, g);
    }
    if (p != identity(n))
        throw EquivariantError("matrix does not have the stated order");
    const Mat kernel = kernel_basis(norm, n);
    return quotient(kernel, transpose(subtract(g, identity(n))));
}

H1Result h1_picard(const GroupAction& a, std::size_t cap)
{
    if (a.order() > cap)
        throw EquivariantError("group of order " + std::to_string(a.order()) + " exceeds the H^1 cap of " + std::to_string(cap));
    const std::size_t n = a.surface().picard_rank();
    const auto& gens = a.generators();
    const std::size_t k = gens.size(), m = k * n;
    H1Result result;
    if (k == 0)
        return result;
    std::vector<std::size_t> gi;
    for (const Mat& g : gens)
        gi.push_back(a.index_of(g));

    // f(g) = A_g v where v stacks the values on the generators; f(g s) = f(g) + g f(s).
    std::vector<std::optional<Mat>> coeff(a.order());
    coeff[0] = zeros(n, m);
    std::deque<std::size_t> queue = {0};
    std::set<Vec> constraints;
    auto step = [&](std::size_t g, std::size_t i) {
        Mat next = *coeff[g];
        const Mat& gm = a.elements()[g];
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c)
                next[r][i * n + c] = add_checked(next[r][i * n + c], gm[r][c]);
        return next;
    };
    while (!queue.empty()) {
        const std::size_t g = queue.front();
        queue.pop_front();
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t t = a.multiply_index(g, gi[i]);
            Mat next = step(g, i);
            if (!coeff[t]) {
                coeff[t] = std::move(next);
                queue.push_back(t);
                continue;
            }
            for (std::size_t r = 0; r < n; ++r) {
                Vec row(m);
                bool nonzero = false;
                for (std::size_t c = 0; c < m; ++c) {
                    row[c] = sub_checked((*coeff[t])[r][c], next[r][c]);
                    nonzero = nonzero || row[c] != 0;
                }
                if (nonzero)
                    constraints.insert(std::move(row));
            }
        }
    }
    const Mat cmat(constraints.begin(), constraints.end());
    const Mat z = cmat.empty() ? identity(m) : kernel_basis(cmat, m);
    Mat b;
    for (std::size_t j = 0; j < n; ++j) {
        Vec row(m);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t r = 0; r < n; ++r)
                row[i * n + r] = gens[i][r][j] - (r == j ? 1 : 0);
        b.push_back(std::move(row));
    }
    result = quotient(z, b);

    if (auto c = a.cyclic_generator()) {
        const H1Result check = h1_cyclic(a.elements()[*c], a.order());
        if (check.torsion != result.torsion || check.free_rank != result.free_rank)
            throw std::logic_error("H^1 disagrees with the cyclic formula");
    }
    return result;
}

PermutationCertificate permutation_basis_certificate(const Collection& c, const GroupAction& a)
{
    PermutationCertificate cert;
    cert.basis = c.classes();
    const std::size_t n = cert.basis.size();
    if (n != a.surface().picard_rank() + 2) {
        cert.detail = "collection has " + std::to_string(n) + " objects, K0 has rank " + std::to_string(a.surface().picard_rank() + 2);
        return cert;
    }
    Mat rows;
    for (const auto& k : cert.basis)
        rows.push_back(k.coords());
    const Int det = determinant(rows);
    if (det != 1 && det != -1) {
        cert.detail = "classes are not a Z-basis of K0 (determinant " + std::to_string(det) + ")";
        return cert;
    }
    std::map<KClass, std::size_t> where;
    for (std::size_t i = 0; i < n; ++i)
        where[cert.basis[i]] = i;
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (std::size_t gno = 0; gno < a.generators().size(); ++gno) {
        const std::size_t g = a.index_of(a.generators()[gno]);
        std::vector<std::size_t> perm(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto it = where.find(a.apply(g, cert.basis[i]));
            if (it == where.end()) {
                cert.detail = "generator " + std::to_string(gno + 1) + " sends basis element " + std::to_string(i + 1)
                    + " outside the basis";
                return cert;
            }
            perm[i] = it->second;
            parent[find(i)] = find(it->second);
        }
        cert.permutations.push_back(std::move(perm));
    }
    std::map<std::size_t, std::size_t> sizes;
    for (std::size_t i = 0; i < n; ++i)
        ++sizes[find(i)];
    std::set<std::size_t> done;
    for (std::size_t i = 0; i < n; ++i)
        if (done.insert(find(i)).second)
            cert.block_orbit_sizes.push_back(sizes[find(i)]);
    cert.ok = true;
    cert.detail = "basis of " + std::to_string(n) + " classes permuted by every generator";
    return cert;
}

MinimalityProxy minimality_proxy(const GroupAction& a)
{
    const SurfaceModel& s = a.surface();
    std::vector<DivisorClass> lines;
    try {
        lines = enumerate_r_classes(s, -1);
    } catch (const LatticeError& e) {
        throw EquivariantError(std::string("minimality proxy unavailable: ") + e.what());
    }
    MinimalityProxy r;
    for (const auto& o : orbits(a, lines)) {
        bool disjoint = true;
        for (std::size_t i = 0; i < o.size() && disjoint; ++i)
            for (std::size_t j = i + 1; j < o.size() && disjoint; ++j)
                disjoint = intersect(s, o[i], o[j]) == 0;
        if (disjoint)
            r.contractible_orbits.push_back(o);
    }
    r.minimal = r.contractible_orbits.empty();
    return r;
}

Mat parse_matrix(const std::string& text)
{
    try {
        const auto j = nlohmann::json::parse(text);
        Mat m = j.get<Mat>();
        if (m.empty() || std::any_of(m.begin(), m.end(), [&](const Vec& r) { return r.size() != m.size(); }))
            throw ParseError("matrix must be square and nonempty: " + text);
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("bad matrix '" + text + "': " + e.what());
    }
}

GroupAction parse_group_action(const std::string& text)
{
    for (const auto& st : parse_stanzas(text)) {
        if (st.section != "group")
            continue;
        auto s = std::make_shared<const SurfaceModel>(parse_surface_spec(st.require("surface")));
        std::vector<Mat> gens;
        for (const auto& g : st.get_all("gen"))
            gens.push_back(parse_matrix(g));
        for (const auto& p : st.get_all("permute")) {
            std::vector<std::size_t> perm;
            std::istringstream is(p);
            for (long v; is >> v;)
                perm.push_back(static_cast<std::size_t>(v));
            gens.push_back(exceptional_permutation(*s, perm));
        }
        std::size_t cap = GroupAction::kDefaultCap;
        if (auto c = st.get("cap"))
            cap = static_cast<std::size_t>(std::stoul(*c));
        return GroupAction(s, gens, cap);
    }
    throw ParseError("no [group] stanza found");
}

namespace {

std::vector<DivisorClass> parse_class_list(const std::string& text, const DivisorNames& names)
{
    std::vector<DivisorClass> out;
    for (const auto& part : split_top_level(text, ',')) {
        try {
            out.push_back(names.parse(part));
        } catch (const LatticeError& e) {
            throw ParseError(e.what());
        }
    }
    return out;
}

} // namespace

Contraction parse_contraction(const std::string& text, const SurfaceModel& s)
{
    DivisorNames names(s);
    for (const auto& st : parse_stanzas(text)) {
        if (st.section != "contraction")
            continue;
        Contraction c;
        for (const auto& b : st.get_all("blowup"))
            c.blown_orbits.push_back(parse_class_list(b, names));
        const std::string minimal = trim_copy(st.get("minimal").value_or("point"));
        if (minimal == "point") {
            c.minimal = Contraction::Minimal::Point;
        } else if (minimal == "curve") {
            c.minimal = Contraction::Minimal::Curve;
        } else if (minimal.rfind("conic", 0) == 0) {
            c.minimal = Contraction::Minimal::ConicBundle;
            try {
                c.fibre = names.parse(minimal.substr(5));
            } catch (const LatticeError& e) {
                throw ParseError(e.what());
            }
        } else {
            throw ParseError("minimal must be point, curve or conic <fibre>");
        }
        for (const auto& [key, value] : st.entries)
            if (key.rfind("twist ", 0) == 0) {
                try {
                    c.twists[std::stoul(key.substr(6))] = trim_copy(value);
                } catch (const std::logic_error&) {
                    throw ParseError("twist key needs an atom index: '" + key + "'");
                }
            }
        return c;
    }
    throw ParseError("no [contraction] stanza found");
}

std::vector<BirationalStep> parse_birational_steps(const std::string& text, std::shared_ptr<const GroupAction> g)
{
    for (const auto& st : parse_stanzas(text)) {
        if (st.section != "steps")
            continue;
        std::vector<BirationalStep> out;
        for (const auto& [key, value] : st.entries) {
            if (key != "up" && key != "down")
                continue;
            BirationalStep step;
            step.kind = key == "up" ? BirationalStep::Kind::BlowUp : BirationalStep::Kind::BlowDown;
            if (g) {
                DivisorNames names(g->surface());
                step.orbit = TransitiveGSet::of_orbit(g, parse_class_list(value, names));
            } else {
                const auto colon = value.rfind(':');
                if (colon == std::string::npos)
                    throw ParseError("abstract orbit must be written label:size, got '" + value + "'");
                std::size_t size = 0;
                try {
                    size = std::stoul(value.substr(colon + 1));
                } catch (const std::logic_error&) {
                    throw ParseError("bad orbit size in '" + value + "'");
                }
                step.orbit = TransitiveGSet::abstract(trim_copy(value.substr(0, colon)), size);
            }
            out.push_back(std::move(step));
        }
        return out;
    }
    throw ParseError("no [steps] stanza found");
}

} // namespace sodatlas
