#include "doctest.h"
#include "json.hpp"
#include "sodatlas/catalog.hpp"

#include <sstream>

using namespace sodatlas;

namespace {

MoriFibreSpace over_point(SurfaceModel s)
{
    return MoriFibreSpace{std::move(s), BaseKind::Point, 0, std::nullopt};
}

MoriFibreSpace conic_bundle(SurfaceModel s, const std::string& fibre)
{
    DivisorNames names(s);
    const DivisorClass f = names.parse(fibre);
    return MoriFibreSpace{std::move(s), BaseKind::RationalCurve, 0, f};
}

} // namespace

TEST_CASE("surface specs")
{
    const auto a = parse_surface_spec("P2 [1, 2]");
    CHECK(a.points() == 3);
    CHECK(a.blowup_orbits() == std::vector<Int>{1, 2});
    CHECK(parse_surface_spec("F3").hirzebruch_d() == 3);
    CHECK(parse_surface_spec("F0 [3]").degree() == 5);
    CHECK_THROWS_AS(parse_surface_spec("P3"), ParseError);
    CHECK_THROWS_AS(parse_surface_spec("P2 [0]"), ParseError);
    CHECK_THROWS_AS(parse_surface_spec("P2 [1"), ParseError);
}

TEST_CASE("collection syntax")
{
    auto s = std::make_shared<const SurfaceModel>(SurfaceModel::projective_plane({4}));
    DivisorNames names(*s);
    names.define("q", names.parse("2H-E1-E2-E3-E4"));
    const auto c = parse_collection("< ext(O(-H), O(-q)) | O(-H+E1), O_E2(-1), -O_[H-E1-E2](0) | O >", s, names);
    REQUIRE(c.blocks.size() == 3);
    CHECK(c.blocks[0].objects[0].cls.rank == 2);
    CHECK(c.blocks[1].objects[1].cls == torsion_class(*s, names.parse("E2"), -1));
    CHECK(c.blocks[1].objects[2].cls == -torsion_class(*s, names.parse("H-E1-E2"), 0));
    CHECK_THROWS_AS(parse_collection("O | O", s, names), ParseError);
    CHECK_THROWS_AS(parse_collection("< O(-Z) >", s, names), ParseError);
    CHECK_THROWS_AS(parse_collection("< O_H(-1) >", s, names), ParseError);
    CHECK_THROWS_AS(parse_collection("< sigma >", s, names), ParseError);
}

TEST_CASE("standard decompositions of rich Mori fibre spaces")
{
    const std::vector<MoriFibreSpace> cases = {
        over_point(SurfaceModel::projective_plane()),
        over_point(SurfaceModel::hirzebruch(0)),
        over_point(SurfaceModel::projective_plane({3})),
        over_point(SurfaceModel::projective_plane({4})),
        conic_bundle(SurfaceModel::hirzebruch(0), "h"),
        conic_bundle(SurfaceModel::hirzebruch(0), "s"),
        conic_bundle(SurfaceModel::hirzebruch(3), "h"),
        conic_bundle(SurfaceModel::projective_plane({3}), "H-E3"),
        conic_bundle(SurfaceModel::projective_plane({4}), "H-E2"),
    };
    const std::vector<std::vector<std::size_t>> sizes = {
        {1, 1, 1}, {1, 2, 1}, {2, 3, 1}, {1, 5, 1}, {1, 1, 1, 1}, {1, 1, 1, 1}, {1, 1, 1, 1}, {2, 2, 1, 1}, {1, 4, 1, 1}};
    for (std::size_t i = 0; i < cases.size(); ++i) {
        CHECK(birationally_rich(cases[i]));
        const auto c = standard_sod(cases[i]);
        const auto rep = check_collection(c);
        CHECK(rep.ok);
        CHECK(rep.full);
        CHECK(c.block_sizes() == sizes[i]);
    }
    const auto p2 = standard_sod(cases[0]);
    CHECK(check_collection(p2).gram == Mat{{1, 3, 6}, {0, 1, 3}, {0, 0, 1}});
}

TEST_CASE("standard decompositions of non-rich Mori fibre spaces")
{
    for (int n = 5; n <= 8; ++n) {
        const auto c = standard_sod(over_point(SurfaceModel::projective_plane({n})));
        CHECK_FALSE(birationally_rich(over_point(SurfaceModel::projective_plane({n}))));
        CHECK(c.blocks.size() == 2);
        CHECK(c.blocks[0].kind == BlockKind::Opaque);
        CHECK(c.blocks[0].size() == static_cast<std::size_t>(n + 2));
        CHECK(check_collection(c).full);
    }
    const auto cb = standard_sod(conic_bundle(SurfaceModel::projective_plane({5}), "H-E1"));
    CHECK(cb.block_sizes() == std::vector<std::size_t>{6, 1, 1});
    CHECK(check_collection(cb).full);
    MoriFibreSpace ruled{SurfaceModel::hirzebruch(1), BaseKind::Curve, 2, std::nullopt};
    CHECK(ruled.degree() == -8);
    const auto markers = standard_sod(ruled);
    CHECK(markers.blocks.size() == 2);
    CHECK(check_collection(markers).ok);
}

TEST_CASE("invalid Mori fibre spaces are rejected")
{
    CHECK_THROWS_AS(standard_sod(over_point(SurfaceModel::projective_plane({1}))), CatalogError);
    CHECK_THROWS_AS(standard_sod(over_point(SurfaceModel::hirzebruch(2))), CatalogError);
    CHECK_THROWS_AS(standard_sod(over_point(SurfaceModel::hirzebruch(1))), CatalogError);
    CHECK_THROWS_AS(standard_sod(conic_bundle(SurfaceModel::hirzebruch(1, {1}), "h")), CatalogError);
    CHECK_THROWS_AS(standard_sod(conic_bundle(SurfaceModel::projective_plane({3}), "H")), CatalogError);
    CHECK_THROWS_AS(standard_sod(MoriFibreSpace{SurfaceModel::hirzebruch(0), BaseKind::RationalCurve, 0, std::nullopt}),
        CatalogError);
    CHECK_THROWS_AS(standard_sod(MoriFibreSpace{SurfaceModel::hirzebruch(0), BaseKind::Curve, 0, std::nullopt}), CatalogError);
}

TEST_CASE("rank two class on the degree 5 model")
{
    for (const auto& s : {SurfaceModel::projective_plane({4}), SurfaceModel::hirzebruch(0, {3})}) {
        const KClass e = e_bundle_class(s);
        CHECK(e.rank == 2);
        CHECK(e.c1 == canonical_class(s));
        CHECK(euler_pairing(s, e, e) == 1);
        CHECK(degree5_pairs(s).size() == 5);
        for (std::size_t i = 0; i < 5; ++i)
            CHECK(e_bundle_class(s, i) == e);
    }
    CHECK_THROWS_AS(degree5_pairs(SurfaceModel::projective_plane({3})), CatalogError);
}

TEST_CASE("link descriptors")
{
    auto desc = [](LinkType t, Int a, std::optional<Int> z, Int b, BaseKind base = BaseKind::Point) {
        return LinkDescriptor{t, a, z, b, base};
    };
    CHECK(validate_link(desc(LinkType::I, 9, std::nullopt, 8)));
    CHECK(validate_link(desc(LinkType::I, 4, 3, 3)));
    CHECK_FALSE(validate_link(desc(LinkType::I, 9, std::nullopt, 6)));
    CHECK(validate_link(desc(LinkType::III, 5, std::nullopt, 9)));
    CHECK_FALSE(validate_link(desc(LinkType::III, 9, std::nullopt, 5)));
    CHECK(validate_link(desc(LinkType::II, 9, 7, 8)));
    CHECK(validate_link(desc(LinkType::II, 8, 7, 9)));
    CHECK(validate_link(desc(LinkType::II, 2, 1, 2)));
    CHECK_FALSE(validate_link(desc(LinkType::II, 2, 2, 2)));
    CHECK_FALSE(validate_link(desc(LinkType::II, 7, 1, 7)));
    CHECK(validate_link(desc(LinkType::II, 6, 3, 6)));
    CHECK_FALSE(validate_link(desc(LinkType::II, 6, 5, 6)));
    CHECK(validate_link(desc(LinkType::II, 5, std::nullopt, 5, BaseKind::RationalCurve)));
    CHECK_FALSE(validate_link(desc(LinkType::II, 5, std::nullopt, 6, BaseKind::RationalCurve)));
    CHECK(validate_link(desc(LinkType::IV, 4, std::nullopt, 4)));
    CHECK_FALSE(validate_link(desc(LinkType::IV, 3, std::nullopt, 3)));
    CHECK(format_descriptor(desc(LinkType::II, 9, 7, 8)) == "II (9,7,8) over point");
}

TEST_CASE("Geiser and Bertini involutions")
{
    for (int n : {7, 8}) {
        const auto s = SurfaceModel::projective_plane({n});
        const Mat g = geiser_bertini_involution(s);
        CHECK(multiply(g, g) == identity(s.picard_rank()));
        CHECK(multiply(transpose(g), multiply(s.gram(), g)) == s.gram());
        CHECK(multiply(g, s.canonical()) == s.canonical());
        for (const auto& e : enumerate_r_classes(s, -1)) {
            const DivisorClass img(multiply(g, e.c));
            CHECK(r_class_value(s, img) == -1);
            CHECK(img != e);
        }
    }
    CHECK_THROWS_AS(geiser_bertini_involution(SurfaceModel::projective_plane({6})), CatalogError);
}

TEST_CASE("every catalog link verifies")
{
    const auto ids = catalog_ids();
    CHECK(ids.size() == 50);
    for (const auto& l : builtin_link_scripts()) {
        const auto cert = verify_link(l);
        INFO(l.id << ": " << cert.failure);
        CHECK(cert.pass);
        if (l.descriptor)
            CHECK(validate_link(*l.descriptor));
    }
}

TEST_CASE("over-curve rotations and Serre powers")
{
    // Degree 6 middle blocks have sizes (2,2): the rotation is -n, a Serre power needs n even.
    // Degree 5 middle blocks have sizes (1,4): the rotation is -2n and the Serre power -n.
    for (long n = 1; n <= 3; ++n) {
        const auto c6 = verify_link("IIC-6-" + std::to_string(n));
        CHECK(c6.rotation == -n);
        CHECK(c6.serre_claim_checked);
        if (n % 2 == 0)
            CHECK(c6.serre_power == -n / 2);
        else
            CHECK_FALSE(c6.serre_power.has_value());
        const auto c5 = verify_link("IIC-5-" + std::to_string(n));
        CHECK(c5.rotation == -2 * n);
        CHECK(c5.serre_power == -n);
    }
}

TEST_CASE("inverse links replay backwards")
{
    const auto& fwd = link_script("I-9-8");
    const auto& inv = link_script("III-8-9");
    CHECK(inv.inverse_of == "I-9-8");
    CHECK(collections_equal(inv.side1, fwd.side2, CompareMode::Strict));
    CHECK(inv.steps.size() == 4);
    CHECK(inv.steps.front().move == Move::right(3));
    CHECK(inv.steps.back().move == Move::helix_plus());
}

TEST_CASE("a corrupted script fails with a reason")
{
    LinkScript ls = link_script("I-9-5");
    ls.steps.pop_back();
    auto cert = verify_link(ls);
    CHECK_FALSE(cert.pass);
    CHECK(cert.failure.find("final") != std::string::npos);

    LinkScript bad = link_script("I-9-8");
    bad.steps.front().move = Move::swap(1);
    cert = verify_link(bad);
    CHECK_FALSE(cert.pass);
    CHECK(cert.steps.back().ok == false);

    const std::string text = "[link \"x\"]\nkind = II\ndegrees = 9 1 9\nroof = P2 [8]\n"
                             "involution = bertini\nside1 = < O_E1(-1), O_E2(-1), O_E3(-1), O_E4(-1), O_E5(-1), O_E6(-1), "
                             "O_E7(-1), O_E8(-1) | O(-2H) | O(-H) | O >\nside2 = sigma\nmoves = serre 1..3 ^2\n";
    const auto loaded = load_link_scripts(text);
    REQUIRE(loaded.size() == 1);
    CHECK_FALSE(verify_link(loaded[0]).pass);
}

TEST_CASE("script loading errors carry the link name")
{
    CHECK_THROWS_AS(load_link_scripts("[link \"a\"]\nkind = I\n"), ParseError);
    try {
        load_link_scripts("[link \"broken\"]\nkind = I\ndegrees = 9 8\nroof = P2 [1]\nside1 = < O(-Q) >\nside2 = < O >\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("broken") != std::string::npos);
    }
    CHECK_THROWS_AS(load_link_scripts("[link \"c\"]\nkind = III\ndegrees = 8 9\ninverse = nothing\n"), ParseError);
    CHECK_THROWS_AS(link_script("nothing"), CatalogError);
}

TEST_CASE("certificate records are JSON lines")
{
    const auto cert = verify_link("II-9-7-8");
    std::istringstream is(cert.to_jsonl());
    std::vector<nlohmann::json> recs;
    for (std::string line; std::getline(is, line);)
        recs.push_back(nlohmann::json::parse(line));
    REQUIRE(recs.size() >= 3);
    CHECK(recs.front()["record"] == "header");
    CHECK(recs.back()["record"] == "verdict");
    CHECK(recs.back()["verdict"] == "pass");
    std::size_t steps = 0;
    for (const auto& r : recs)
        if (r["record"] == "step") {
            ++steps;
            CHECK(r["case"] == "II-9-7-8");
            CHECK(r["gram"].size() == 5);
        }
    CHECK(steps == 4);
}
