#include "doctest.h"
#include "sodatlas/equivariant.hpp"

#include <algorithm>
#include <functional>

using namespace sodatlas;

namespace {

using SurfacePtr = std::shared_ptr<const SurfaceModel>;

SurfacePtr p2(std::vector<Int> orbits = {})
{
    return std::make_shared<const SurfaceModel>(SurfaceModel::projective_plane(std::move(orbits)));
}

std::shared_ptr<const GroupAction> act(const SurfacePtr& s, std::vector<Mat> gens)
{
    return std::make_shared<const GroupAction>(s, std::move(gens));
}

std::shared_ptr<const GroupAction> hexagon()
{
    const auto s = p2({3});
    return act(s, {exceptional_permutation(*s, {2, 1, 3}), exceptional_permutation(*s, {2, 3, 1}),
                      quadratic_involution(*s, 1, 2, 3)});
}

// S5 on the degree 5 model: S4 on the exceptional classes plus the quadratic involution.
std::shared_ptr<const GroupAction> quintic_s5()
{
    const auto s = p2({4});
    return act(s, {exceptional_permutation(*s, {2, 1, 3, 4}), exceptional_permutation(*s, {2, 3, 4, 1}),
                      quadratic_involution(*s, 1, 2, 3)});
}

// H^1 through the full bar complex: Z^1 = ker(C^1 -> C^2), B^1 = im(C^0 -> C^1).
H1Result bar_complex_h1(const std::vector<Mat>& elems, const std::function<std::size_t(std::size_t, std::size_t)>& mul)
{
    const std::size_t g = elems.size(), n = elems[0].size(), m = g * n;
    Mat d1;
    for (std::size_t a = 0; a < g; ++a)
        for (std::size_t b = 0; b < g; ++b)
            for (std::size_t r = 0; r < n; ++r) {
                Vec row(m, 0);
                for (std::size_t c = 0; c < n; ++c)
                    row[b * n + c] += elems[a][r][c];
                row[mul(a, b) * n + r] -= 1;
                row[a * n + r] += 1;
                d1.push_back(row);
            }
    const Mat z = kernel_basis(d1, m);
    Mat coords;
    for (std::size_t j = 0; j < n; ++j) {
        Vec row(m);
        for (std::size_t a = 0; a < g; ++a)
            for (std::size_t r = 0; r < n; ++r)
                row[a * n + r] = elems[a][r][j] - (r == j ? 1 : 0);
        auto c = solve_in_row_lattice(z, row);
        REQUIRE(c.has_value());
        coords.push_back(*c);
    }
    H1Result out;
    const Vec inv = smith_invariants(coords);
    out.free_rank = z.size() - inv.size();
    for (Int x : inv)
        if (x > 1)
            out.torsion.push_back(x);
    return out;
}

H1Result bar_complex_h1(const GroupAction& a)
{
    return bar_complex_h1(a.elements(), [&](std::size_t x, std::size_t y) { return a.multiply_index(x, y); });
}

Collection parse(const SurfacePtr& s, const std::string& text)
{
    return parse_collection(text, s, DivisorNames(*s));
}

std::vector<DivisorClass> classes(const SurfaceModel& s, const std::vector<std::string>& exprs)
{
    DivisorNames names(s);
    std::vector<DivisorClass> out;
    for (const auto& e : exprs)
        out.push_back(names.parse(e));
    return out;
}

std::size_t count_kind(const std::vector<Atom>& atoms, std::size_t size)
{
    return static_cast<std::size_t>(std::count_if(atoms.begin(), atoms.end(), [size](const Atom& a) {
        return a.kind == Atom::Kind::PermutationType && a.gset.size == size && !a.twist;
    }));
}

} // namespace

TEST_CASE("group closure and validation")
{
    CHECK(hexagon()->order() == 12);
    CHECK(quintic_s5()->order() == 120);
    const auto s = p2({2});
    CHECK(GroupAction(s, {exceptional_permutation(*s, {2, 1})}).order() == 2);
    CHECK_THROWS_AS(GroupAction(s, {Mat{{2, 0, 0}, {0, 1, 0}, {0, 0, 1}}}), EquivariantError);
    CHECK_THROWS_AS(GroupAction(s, {Mat{{1, 0}, {0, 1}}}), EquivariantError);
    // Swapping H and E1 preserves nothing useful: not an isometry.
    CHECK_THROWS_AS(GroupAction(s, {Mat{{0, 1, 0}, {1, 0, 0}, {0, 0, 1}}}), EquivariantError);
    CHECK_THROWS_AS(GroupAction(quintic_s5()->surface_ptr(), quintic_s5()->generators(), 50), EquivariantError);
    const auto hx = hexagon();
    for (std::size_t e = 0; e < hx->order(); ++e)
        CHECK(hx->multiply_index(e, hx->inverse_index(e)) == 0);
    CHECK_FALSE(hx->cyclic_generator().has_value());
}

TEST_CASE("invariant rank")
{
    CHECK(invariant_rank(GroupAction::trivial(p2({3}))) == 4);
    // Fixed classes of the swap on the plane blown up twice: H and E1+E2.
    const auto s = p2({2});
    CHECK(invariant_rank(GroupAction(s, {exceptional_permutation(*s, {2, 1})})) == 2);
    const auto s3 = p2({3});
    CHECK(invariant_rank(GroupAction(s3, {exceptional_permutation(*s3, {2, 1, 3})})) == 3);
    CHECK(invariant_rank(*hexagon()) == 1);
    CHECK(invariant_rank(*quintic_s5()) == 1);

    // Adding generators never increases the invariant rank.
    const auto hx = hexagon();
    std::vector<Mat> gens;
    std::size_t prev = hx->surface().picard_rank();
    for (const Mat& g : hx->generators()) {
        gens.push_back(g);
        const std::size_t r = invariant_rank(GroupAction(hx->surface_ptr(), gens));
        CHECK(r <= prev);
        prev = r;
    }
}

TEST_CASE("orbits")
{
    const auto s = p2({2});
    const auto lines = classes(*s, {"E1", "E2", "H-E1-E2"});
    CHECK(orbits(GroupAction::trivial(s), lines).size() == 3);
    const auto sw = orbits(GroupAction(s, {exceptional_permutation(*s, {2, 1})}), lines);
    REQUIRE(sw.size() == 2);
    CHECK((sw[0].size() == 2 || sw[1].size() == 2));

    const auto q = quintic_s5();
    const auto all = orbits(*q, enumerate_r_classes(q->surface(), -1));
    REQUIRE(all.size() == 1);
    CHECK(all[0].size() == 10);
    CHECK(orbits(*q, enumerate_r_classes(q->surface(), 0)).size() == 1);

    CHECK_THROWS_AS(orbits(GroupAction(s, {exceptional_permutation(*s, {2, 1})}), classes(*s, {"E1"})), EquivariantError);
}

TEST_CASE("invariant collections")
{
    const auto hx = hexagon();
    const auto std6 = standard_sod(MoriFibreSpace{hx->surface(), BaseKind::Point, 0, std::nullopt});
    CHECK(is_invariant_collection(std6, *hx));
    const auto b = p2();
    CHECK(is_invariant_collection(parse(b, "< O(-2H) | O(-H) | O >"), GroupAction::trivial(b)));

    const auto f0 = std::make_shared<const SurfaceModel>(SurfaceModel::hirzebruch(0));
    const GroupAction swap(f0, {Mat{{0, 1}, {1, 0}}});
    CHECK(is_invariant_collection(parse(f0, "< O(-s-h) | O(-s), O(-h) | O >"), swap));
    CHECK_FALSE(is_invariant_collection(parse(f0, "< O(-s-h) | O(-s) | O(-h) | O >"), swap));
}

TEST_CASE("H1 of small modules")
{
    CHECK(h1_picard(GroupAction::trivial(p2())).is_zero());
    const H1Result minus = h1_cyclic(Mat{{-1}}, 2);
    CHECK(minus.describe() == "Z/2");
    CHECK(bar_complex_h1({Mat{{1}}, Mat{{-1}}}, [](std::size_t a, std::size_t b) { return a ^ b; }).describe() == "Z/2");
    CHECK(h1_cyclic(Mat{{0, 1}, {1, 0}}, 2).is_zero());
    CHECK(bar_complex_h1({identity(2), Mat{{0, 1}, {1, 0}}}, [](std::size_t a, std::size_t b) { return a ^ b; }).is_zero());
    // Z^2 with g = -1 gives Z/2 + Z/2.
    CHECK(h1_cyclic(Mat{{-1, 0}, {0, -1}}, 2).describe() == "Z/2 + Z/2");
    CHECK_THROWS_AS(h1_cyclic(Mat{{0, 1}, {1, 0}}, 3), EquivariantError);
}

TEST_CASE("H1 of Picard lattices matches the bar complex")
{
    const auto s2 = p2({2});
    const auto s3 = p2({3});
    const auto s7 = p2({7});
    const auto s8 = p2({8});
    std::vector<std::shared_ptr<const GroupAction>> cases = {
        act(s2, {exceptional_permutation(*s2, {2, 1})}),
        act(s3, {exceptional_permutation(*s3, {2, 3, 1})}),
        act(s3, {quadratic_involution(*s3, 1, 2, 3)}),
        hexagon(),
        act(s7, {geiser_bertini_involution(*s7)}),
        act(s8, {geiser_bertini_involution(*s8)}),
    };
    for (const auto& a : cases) {
        const H1Result fast = h1_picard(*a);
        const H1Result oracle = bar_complex_h1(*a);
        INFO(a->surface().describe() << " order " << a->order());
        CHECK(fast.torsion == oracle.torsion);
        CHECK(fast.free_rank == oracle.free_rank);
        CHECK(fast.free_rank == 0);
    }
    CHECK(h1_picard(*cases[0]).is_zero());
    CHECK(h1_picard(*cases[1]).is_zero());
    CHECK_THROWS_AS(h1_picard(*quintic_s5()), EquivariantError);
}

TEST_CASE("permutation basis certificates")
{
    const auto b = p2();
    const auto c1 = permutation_basis_certificate(parse(b, "< O(-2H) | O(-H) | O >"), GroupAction::trivial(b));
    CHECK(c1.ok);
    CHECK(c1.permutations.empty());

    const auto s = p2({2});
    const GroupAction swap(s, {exceptional_permutation(*s, {2, 1})});
    const auto c2 = permutation_basis_certificate(parse(s, "< O_E1(-1), O_E2(-1) | O(-2H) | O(-H) | O >"), swap);
    REQUIRE(c2.ok);
    CHECK(c2.basis.size() == 5);
    CHECK(c2.permutations == std::vector<std::vector<std::size_t>>{{1, 0, 2, 3, 4}});
    CHECK(h1_picard(swap).is_zero());

    const auto hx = hexagon();
    const auto std6 = standard_sod(MoriFibreSpace{hx->surface(), BaseKind::Point, 0, std::nullopt});
    const auto c3 = permutation_basis_certificate(std6, *hx);
    REQUIRE(c3.ok);
    CHECK(c3.basis.size() == 6);
    auto sizes = c3.block_orbit_sizes;
    std::sort(sizes.begin(), sizes.end());
    CHECK(sizes == std::vector<std::size_t>{1, 2, 3});
    CHECK(h1_picard(*hx).is_zero());

    // Not permuted: the quadratic involution moves O(-H).
    const auto s3 = p2({3});
    const GroupAction q(s3, {quadratic_involution(*s3, 1, 2, 3)});
    CHECK_FALSE(permutation_basis_certificate(parse(s3, "< O_E1(-1), O_E2(-1), O_E3(-1) | O(-2H) | O(-H) | O >"), q).ok);
    CHECK_FALSE(permutation_basis_certificate(parse(b, "< O(-H) | O >"), GroupAction::trivial(b)).ok);
}

TEST_CASE("Burnside invariant")
{
    const auto z = TransitiveGSet::abstract("Z", 3);
    const auto w = TransitiveGSet::abstract("W", 2);
    using K = BirationalStep::Kind;
    CHECK(burnside_invariant({}).is_zero());
    CHECK(burnside_invariant({{K::BlowUp, z}}).describe() == "-[Z:3]");
    CHECK(burnside_invariant({{K::BlowUp, z}, {K::BlowDown, z}}).is_zero());
    const std::vector<BirationalStep> pal = {{K::BlowUp, z}, {K::BlowUp, w}, {K::BlowDown, w}, {K::BlowDown, z}};
    CHECK(burnside_invariant(pal).is_zero());
    const std::vector<BirationalStep> a = {{K::BlowUp, z}, {K::BlowDown, w}};
    const std::vector<BirationalStep> b = {{K::BlowUp, w}};
    std::vector<BirationalStep> ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    CHECK(burnside_invariant(ab) == burnside_invariant(a) + burnside_invariant(b));
    CHECK(burnside_invariant(ab).describe() == "-[Z:3]");

    // Conjugate stabilizers give isomorphic G-sets: the two triangles of the hexagon.
    const auto hx = hexagon();
    const auto& s = hx->surface();
    const auto t1 = TransitiveGSet::of_orbit(hx, classes(s, {"E1", "E2", "E3", "H-E1-E2", "H-E1-E3", "H-E2-E3"}));
    CHECK(t1.size == 6);
    const auto s3 = act(hx->surface_ptr(), {hx->generators()[0], hx->generators()[1]});
    const auto e = TransitiveGSet::of_orbit(s3, classes(s, {"E1", "E2", "E3"}));
    const auto l = TransitiveGSet::of_orbit(s3, classes(s, {"H-E1-E2", "H-E1-E3", "H-E2-E3"}));
    CHECK(e.isomorphic(l));
    CHECK(burnside_invariant({{K::BlowUp, e}, {K::BlowDown, l}}).is_zero());
    CHECK_FALSE(e.isomorphic(TransitiveGSet::point(s3)));
}

TEST_CASE("atoms of blow-ups and minimal models")
{
    const auto s = p2({3});
    const auto c3 = act(s, {exceptional_permutation(*s, {2, 3, 1})});
    Contraction blow;
    blow.blown_orbits = {classes(*s, {"E1", "E2", "E3"})};
    const auto atoms = atom_multiset(c3, blow);
    CHECK(atoms.size() == 4);
    CHECK(count_kind(atoms, 1) == 3);
    CHECK(count_kind(atoms, 3) == 1);

    const auto s5 = p2({5});
    const auto dp4 = atom_multiset(act(s5, {}), Contraction{});
    REQUIRE(dp4.size() == 2);
    CHECK(dp4[0].kind == Atom::Kind::Opaque);
    CHECK(dp4[0].shape == "O-perp");
    CHECK(dp4[0].degree == 4);
    CHECK(count_kind(dp4, 1) == 1);

    const auto dp5 = atom_multiset(quintic_s5(), Contraction{});
    CHECK(dp5.size() == 3);
    CHECK(count_kind(dp5, 1) == 2);
    CHECK(count_kind(dp5, 5) == 1);

    const auto hx = atom_multiset(hexagon(), Contraction{});
    CHECK(hx.size() == 3);
    CHECK(count_kind(hx, 1) == 1);
    CHECK(count_kind(hx, 2) == 1);
    CHECK(count_kind(hx, 3) == 1);

    const auto f0 = std::make_shared<const SurfaceModel>(SurfaceModel::hirzebruch(0));
    Contraction cb;
    cb.minimal = Contraction::Minimal::ConicBundle;
    cb.fibre = DivisorClass({0, 1});
    CHECK(atom_multiset(act(f0, {}), cb).size() == 4);
    cb.fibre = DivisorClass({1, 1});
    CHECK_THROWS_AS(atom_multiset(act(f0, {}), cb), EquivariantError);

    Contraction twisted;
    twisted.twists[1] = "a3";
    const auto tw = atom_multiset(act(p2(), {}), twisted);
    CHECK(tw[1].twist == "a3");
    twisted.twists = {{7, "x"}};
    CHECK_THROWS_AS(atom_multiset(act(p2(), {}), twisted), EquivariantError);

    Contraction bad;
    bad.blown_orbits = {classes(*s, {"E1", "H-E1-E2"})};
    CHECK_THROWS_AS(atom_multiset(act(s, {}), bad), EquivariantError);
}

TEST_CASE("two contractions to the plane differ by non-twisted permutation atoms")
{
    const auto s = p2({3});
    const auto sym = act(s, {exceptional_permutation(*s, {2, 1, 3}), exceptional_permutation(*s, {2, 3, 1})});
    Contraction a, b;
    a.blown_orbits = {classes(*s, {"E1", "E2", "E3"})};
    b.blown_orbits = {classes(*s, {"H-E2-E3", "H-E1-E3", "H-E1-E2"})};
    const auto [x, y] = atom_difference(atom_multiset(sym, a), atom_multiset(sym, b));
    CHECK(x.empty());
    CHECK(y.empty());

    // Through the quadric instead: the leftovers are still untwisted permutation atoms.
    const auto s2 = p2({2});
    Contraction to_plane, to_quadric;
    to_plane.blown_orbits = {classes(*s2, {"E1"}), classes(*s2, {"E2"})};
    to_quadric.blown_orbits = {classes(*s2, {"H-E1-E2"})};
    const auto triv = act(s2, {});
    const auto [l, r] = atom_difference(atom_multiset(triv, to_plane), atom_multiset(triv, to_quadric));
    for (const auto& v : {l, r})
        for (const auto& atom : v) {
            CHECK(atom.kind == Atom::Kind::PermutationType);
            CHECK_FALSE(atom.twist.has_value());
        }
}

TEST_CASE("minimality proxy")
{
    CHECK(minimality_proxy(GroupAction::trivial(p2())).minimal);
    CHECK(minimality_proxy(*hexagon()).minimal);
    CHECK(minimality_proxy(*quintic_s5()).minimal);
    const auto s = p2({2});
    const auto sw = minimality_proxy(GroupAction(s, {exceptional_permutation(*s, {2, 1})}));
    CHECK_FALSE(sw.minimal);
    REQUIRE(sw.contractible_orbits.size() == 2);
}

TEST_CASE("group and contraction files")
{
    const auto g = parse_group_action("[group]\nsurface = P2 [2]\npermute = 2 1\n");
    CHECK(g.order() == 2);
    const auto g2 = parse_group_action("[group]\nsurface = F0\ngen = [[0,1],[1,0]]\n");
    CHECK(invariant_rank(g2) == 1);
    CHECK_THROWS_AS(parse_group_action("[group]\nsurface = F0\ngen = [[0,1],[1]]\n"), ParseError);
    CHECK_THROWS_AS(parse_group_action("[steps]\n"), ParseError);

    const auto s = p2({3});
    const auto c = parse_contraction("[contraction]\nblowup = E1, E2, E3\nminimal = point\ntwist 0 = b\n", *s);
    CHECK(c.blown_orbits.size() == 1);
    CHECK(c.twists.at(0) == "b");
    const auto cb = parse_contraction("[contraction]\nminimal = conic H-E1\n", *s);
    CHECK(cb.fibre == classes(*s, {"H-E1"})[0]);
    CHECK_THROWS_AS(parse_contraction("[contraction]\nminimal = plane\n", *s), ParseError);

    const auto steps = parse_birational_steps("[steps]\nup = Z:3\ndown = Z:3\n", nullptr);
    CHECK(burnside_invariant(steps).is_zero());
    const auto gs = std::make_shared<const GroupAction>(g);
    const auto gsteps = parse_birational_steps("[steps]\nup = E1, E2\n", gs);
    CHECK(burnside_invariant(gsteps).describe() == "-[G/H(2, |H|=1)]");
    CHECK_THROWS_AS(parse_birational_steps("[steps]\nup = Z\n", nullptr), ParseError);
}
