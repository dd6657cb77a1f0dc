#include "doctest.h"
#include "sodatlas/catalog.hpp"
#include "sodatlas/mutation.hpp"

#include <random>

using namespace sodatlas;

namespace {

Collection lines(const SurfaceModel& s, const std::vector<std::vector<std::string>>& blocks)
{
    auto sp = std::make_shared<const SurfaceModel>(s);
    DivisorNames names(s);
    Collection c{sp, {}};
    for (const auto& b : blocks) {
        Block blk;
        for (const auto& e : b)
            blk.objects.push_back({line_bundle_class(s, names.parse(e)), "O(" + e + ")"});
        c.blocks.push_back(blk);
    }
    return c;
}

Collection beilinson()
{
    return lines(SurfaceModel::projective_plane(), {{"-2H"}, {"-H"}, {"0"}});
}

Collection quadric()
{
    return lines(SurfaceModel::hirzebruch(0), {{"-h-s"}, {"-h", "-s"}, {"0"}});
}

Collection cubic_standard()
{
    // Degree 6 collection on the blow-up of P2 in three points.
    return lines(SurfaceModel::projective_plane({3}),
        {{"-2H+E1+E2+E3", "-H"}, {"-H+E1", "-H+E2", "-H+E3"}, {"0"}});
}

// Coordinates of x in the basis of the collection's classes.
Vec coordinates(const Collection& c, const KClass& x)
{
    Mat rows;
    for (const auto& k : c.classes())
        rows.push_back(k.coords());
    auto v = solve_in_row_lattice(rows, x.coords());
    REQUIRE(v.has_value());
    return *v;
}

} // namespace

TEST_CASE("Beilinson Gram matrix")
{
    const auto c = beilinson();
    const auto rep = check_collection(c);
    CHECK(rep.ok);
    CHECK(rep.full);
    CHECK(rep.gram == Mat{{1, 3, 6}, {0, 1, 3}, {0, 0, 1}});
}

TEST_CASE("move syntax round trip")
{
    for (const std::string t : {"L 2", "R 1", "helix -K", "helix +K", "swap 3", "merge 2", "split 1 1,3", "serre 1..4 ^3",
             "serre 2..3 ^-2"}) {
        const Move m = parse_move(t);
        CHECK(parse_move(format_move(m)) == m);
    }
    CHECK(parse_move("-K") == Move::helix_minus());
    CHECK(parse_move("+K") == Move::helix_plus());
    CHECK(parse_moves("L 2; R 1\n-K").size() == 3);
    CHECK_THROWS(parse_move("Q 1"));
    CHECK_THROWS(parse_move("L"));
    CHECK_THROWS(parse_move("L x"));
}

TEST_CASE("left and right block mutations are inverse")
{
    for (const auto& c : {beilinson(), quadric(), cubic_standard()}) {
        for (std::size_t i = 2; i <= c.blocks.size(); ++i) {
            const Collection l = apply_move(c, Move::left(i));
            CHECK(collections_equal(apply_move(l, Move::right(i - 1)), c, CompareMode::UpToSignAndBlockPerm));
            const Collection r = apply_move(c, Move::right(i - 1));
            CHECK(collections_equal(apply_move(r, Move::left(i)), c, CompareMode::UpToSignAndBlockPerm));
        }
        const Collection h = apply_move(c, Move::helix_minus());
        CHECK(collections_equal(apply_move(h, Move::helix_plus()), c, CompareMode::Strict));
    }
}

TEST_CASE("mutations preserve fullness and semi-orthogonality")
{
    std::mt19937 rng(7);
    const std::vector<Move> pool = {Move::left(2), Move::left(3), Move::right(1), Move::right(2), Move::helix_minus(),
        Move::helix_plus()};
    for (auto c : {beilinson(), quadric(), cubic_standard()}) {
        for (int step = 0; step < 10; ++step) {
            c = apply_move(c, pool[rng() % pool.size()]);
            const auto rep = check_collection(c);
            REQUIRE(rep.ok);
            REQUIRE(rep.full);
        }
    }
}

TEST_CASE("Beilinson mutations produce the expected line bundles")
{
    const auto c = beilinson();
    // L 2 moves O(-H) to the front: L_{O(-2H)} O(-H) has class O(-2H)^3 - O(-H).
    const Collection l = apply_move(c, Move::left(2));
    const auto s = c.model();
    const KClass expect = 3 * line_bundle_class(s, DivisorClass({-2})) - line_bundle_class(s, DivisorClass({-1}));
    CHECK(normalize_sign(l.blocks[0].objects[0].cls) == normalize_sign(expect));
    const Collection h = apply_move(c, Move::helix_minus());
    CHECK(collections_equal(h, lines(s, {{"-H"}, {"0"}, {"H"}}), CompareMode::Strict));
}

TEST_CASE("Serre matrix of a full collection is the twist by K")
{
    for (const auto& c : {beilinson(), quadric(), cubic_standard()}) {
        const auto& s = c.model();
        const Mat sm = subcategory_serre_matrix(c);
        const auto cls = c.classes();
        for (std::size_t j = 0; j < cls.size(); ++j) {
            const Vec col = coordinates(c, serre_class(s, cls[j]));
            for (std::size_t i = 0; i < cls.size(); ++i)
                CHECK(sm[i][j] == col[i]);
        }
    }
}

TEST_CASE("serre power move equals iterated left rotation")
{
    const auto c = cubic_standard();
    const Collection viaserre = apply_move(c, Move::serre(1, 3, 1));
    Collection viarot = c;
    for (const auto& m : rotation_moves(1, 3, 3))
        viarot = apply_move(viarot, m);
    CHECK(collections_equal(viaserre, viarot, CompareMode::UpToSignAndBlockPerm));
    CHECK(serre_power_match(c, viaserre, 4) == 1);
    CHECK(serre_power_match(c, c, 4) == 0);
}

TEST_CASE("rotations compose")
{
    const auto c = quadric();
    Collection x = c;
    for (const auto& m : rotation_moves(1, 3, 2))
        x = apply_move(x, m);
    for (const auto& m : rotation_moves(1, 3, -2))
        x = apply_move(x, m);
    CHECK(collections_equal(x, c, CompareMode::UpToSignAndBlockPerm));
    CHECK(rotation_moves(2, 4, 0).empty());
    CHECK(rotation_moves(2, 4, 1) == std::vector<Move>{Move::left(4), Move::left(3)});
    CHECK(rotation_moves(2, 4, -1) == std::vector<Move>{Move::right(2), Move::right(3)});
}

TEST_CASE("swap, merge and split")
{
    const auto c = quadric();
    const Collection sw = apply_move(apply_move(c, Move::split(2, {1})), Move::swap(2));
    CHECK(sw.blocks.size() == 4);
    CHECK(sw.blocks[1].objects[0].cls == line_bundle_class(c.model(), DivisorClass({-1, 0})));
    const Collection mg = apply_move(sw, Move::merge(2));
    CHECK(collections_equal(mg, c, CompareMode::UpToSignAndBlockPerm));
    CHECK_FALSE(collections_equal(mg, c, CompareMode::Strict));
    CHECK_THROWS_AS(apply_move(c, Move::swap(1)), MutationError);
    CHECK_THROWS_AS(apply_move(c, Move::left(1)), MutationError);
    CHECK_THROWS_AS(apply_move(c, Move::split(2, {1, 2})), MutationError);
}

TEST_CASE("violations are reported")
{
    const auto s = SurfaceModel::projective_plane();
    const auto bad = lines(s, {{"0"}, {"-H"}, {"-2H"}});
    const auto rep = check_collection(bad);
    CHECK_FALSE(rep.ok);
    CHECK(rep.full);
    const auto partial = lines(s, {{"-H"}, {"0"}});
    CHECK(check_collection(partial).ok);
    CHECK_FALSE(check_collection(partial).full);
    auto nonexc = lines(s, {{"-H", "0"}});
    CHECK_FALSE(check_collection(nonexc).ok);
}

TEST_CASE("opaque complement")
{
    const auto s = std::make_shared<const SurfaceModel>(SurfaceModel::projective_plane({5}));
    DivisorNames names(*s);
    Collection c{s, {Block{BlockKind::Opaque, {}, "perp"}, Block{BlockKind::Exceptional, {{line_bundle_class(*s, DivisorClass::zero(6)), "O"}}, ""}}};
    c.blocks[0] = complement_block(c, 0, "perp");
    CHECK(c.blocks[0].size() == 7);
    const auto rep = check_collection(c);
    CHECK(rep.ok);
    CHECK(rep.full);
    for (const auto& o : c.blocks[0].objects)
        CHECK(euler_pairing(*s, line_bundle_class(*s, DivisorClass::zero(6)), o.cls) == 0);
    // Same span from an explicit exceptional basis of O-perp.
    Block explicit_basis{BlockKind::Opaque, {}, "perp"};
    for (int i = 1; i <= 5; ++i)
        explicit_basis.objects.push_back({torsion_class(*s, names.parse("E" + std::to_string(i)), -1), ""});
    explicit_basis.objects.push_back({line_bundle_class(*s, names.parse("-2H")), ""});
    explicit_basis.objects.push_back({line_bundle_class(*s, names.parse("-H")), ""});
    CHECK(blocks_equal(c.blocks[0], explicit_basis, CompareMode::UpToSignAndBlockPerm));
}

TEST_CASE("empty opaque blocks are markers")
{
    const auto s = std::make_shared<const SurfaceModel>(SurfaceModel::hirzebruch(0));
    Collection c{s, {Block{BlockKind::Opaque, {}, "a"}, Block{BlockKind::Opaque, {}, "b"}}};
    CHECK(check_collection(c).ok);
    Collection e{s, {Block{}}};
    CHECK_FALSE(check_collection(e).ok);
}

TEST_CASE("path search recovers a short script")
{
    const auto c = beilinson();
    Collection target = c;
    const std::vector<Move> script = {Move::left(2), Move::helix_minus(), Move::right(1)};
    for (const auto& m : script)
        target = apply_move(target, m);
    SearchOptions opt;
    opt.max_depth = 4;
    const auto path = search_path(c, target, opt);
    REQUIRE(path.has_value());
    CHECK(path->size() <= script.size());
    Collection replay = c;
    for (const auto& m : *path)
        replay = apply_move(replay, m);
    CHECK(collections_equal(replay, target, CompareMode::UpToSignAndBlockPerm));
    CHECK(search_path(c, c, opt)->empty());
}

TEST_CASE("canonical key ignores order inside blocks and signs")
{
    const auto a = quadric();
    auto b = a;
    std::swap(b.blocks[1].objects[0], b.blocks[1].objects[1]);
    b.blocks[0].objects[0].cls = -b.blocks[0].objects[0].cls;
    CHECK(canonical_key(a) == canonical_key(b));
    CHECK(canonical_key(a) != canonical_key(apply_move(a, Move::left(2))));
}
