#include "sodatlas/catalog.hpp"

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace sodatlas {

extern const char* const kBuiltinLinkData;

namespace {

bool is_zero_class(const SurfaceModel& s, const DivisorClass& d)
{
    return r_class_value(s, d) == 0;
}

ExcObject line_object(const SurfaceModel& s, const DivisorClass& d)
{
    const KClass k = line_bundle_class(s, d);
    return {k, describe_kclass(s, k)};
}

Block single(const SurfaceModel& s, const DivisorClass& d)
{
    return Block{BlockKind::Exceptional, {line_object(s, d)}, ""};
}

Block of_lines(const SurfaceModel& s, const std::vector<DivisorClass>& ds)
{
    Block b;
    for (const auto& d : ds)
        b.objects.push_back(line_object(s, d));
    return b;
}

std::vector<DivisorClass> negated(std::vector<DivisorClass> v)
{
    for (auto& d : v)
        d = -d;
    return v;
}

} // namespace

Int MoriFibreSpace::degree() const
{
    return base == BaseKind::Curve ? surface.degree() - 8 * genus : surface.degree();
}

void validate_mori_fibre_space(const MoriFibreSpace& m)
{
    const SurfaceModel& s = m.surface;
    const Int d = m.degree();
    switch (m.base) {
    case BaseKind::Point:
        if (d < 1 || d > 9 || d == 7)
            throw CatalogError("no minimal del Pezzo surface of degree " + std::to_string(d) + " over a point");
        if (s.base() == BaseSurface::Hirzebruch && s.hirzebruch_d() != 0)
            throw CatalogError("a Hirzebruch surface F_d with d > 0 is not a del Pezzo Mori fibre space over a point");
        if (d == 8 && s.base() != BaseSurface::Hirzebruch)
            throw CatalogError("degree 8 over a point is the quadric F0");
        return;
    case BaseKind::RationalCurve:
        if (!m.fibration)
            throw CatalogError("a conic bundle needs its fibration class");
        if (!is_zero_class(s, *m.fibration))
            throw CatalogError("fibration class must be a 0-class");
        if (d == 7 || d > 8)
            throw CatalogError("no Mori conic bundle of degree " + std::to_string(d));
        return;
    case BaseKind::Curve:
        if (m.genus < 1)
            throw CatalogError("genus must be at least 1 for a curve base");
        if (s.base() != BaseSurface::Hirzebruch)
            throw CatalogError("a conic bundle over a curve is modeled on a Hirzebruch lattice");
        if (d > 8 * (1 - m.genus))
            throw CatalogError("degree exceeds 8(1-g)");
        return;
    }
}

bool birationally_rich(const MoriFibreSpace& m)
{
    const Int d = m.degree();
    if (m.base == BaseKind::Point)
        return d == 9 || d == 8 || d == 6 || d == 5;
    if (m.base == BaseKind::RationalCurve)
        return d == 8 || d == 6 || d == 5;
    return false;
}

std::vector<std::pair<DivisorClass, DivisorClass>> degree5_pairs(const SurfaceModel& s)
{
    if (s.degree() != 5)
        throw CatalogError("degree-5 model expected");
    std::vector<std::pair<DivisorClass, DivisorClass>> out;
    const DivisorClass minus_k = -canonical_class(s);
    for (const auto& h : enumerate_r_classes(s, 0))
        out.emplace_back(h, minus_k - h);
    return out;
}

KClass e_bundle_class(const SurfaceModel& s, std::size_t pair_index)
{
    const auto pairs = degree5_pairs(s);
    const auto& [h, big_h] = pairs.at(pair_index);
    return line_bundle_class(s, -big_h) + line_bundle_class(s, -h);
}

KClass e_bundle_class(const SurfaceModel& s)
{
    const auto pairs = degree5_pairs(s);
    const KClass first = e_bundle_class(s, 0);
    for (std::size_t i = 1; i < pairs.size(); ++i)
        if (e_bundle_class(s, i) != first)
            throw CatalogError("rank-two class depends on the chosen pair");
    return first;
}

Collection standard_sod(const MoriFibreSpace& m)
{
    validate_mori_fibre_space(m);
    auto s = std::make_shared<const SurfaceModel>(m.surface);
    Collection c{s, {}};
    const Int d = m.degree();
    const DivisorClass zero = DivisorClass::zero(s->picard_rank());
    DivisorNames names(*s);

    if (m.base == BaseKind::Curve) {
        c.blocks.push_back(Block{BlockKind::Opaque, {}, "ker pi_*"});
        c.blocks.push_back(Block{BlockKind::Opaque, {}, "pi^* Db(B)"});
        return c;
    }
    if (!birationally_rich(m)) {
        if (m.base == BaseKind::Point) {
            c.blocks.push_back(Block{BlockKind::Opaque, {}, "O-perp"});
            c.blocks.push_back(single(*s, zero));
            c.blocks[0] = complement_block(c, 0, "O-perp");
        } else {
            c.blocks.push_back(Block{BlockKind::Opaque, {}, "ker pi_*"});
            c.blocks.push_back(single(*s, -*m.fibration));
            c.blocks.push_back(single(*s, zero));
            c.blocks[0] = complement_block(c, 0, "ker pi_*");
        }
        return c;
    }

    if (m.base == BaseKind::Point) {
        if (d == 9) {
            c.blocks = {single(*s, names.parse("-2H")), single(*s, names.parse("-H")), single(*s, zero)};
        } else if (d == 8) {
            const auto h = enumerate_r_classes(*s, 0);
            c.blocks = {single(*s, -(h[0] + h[1])), of_lines(*s, negated(h)), single(*s, zero)};
        } else if (d == 6) {
            c.blocks = {of_lines(*s, negated(enumerate_r_classes(*s, 1))), of_lines(*s, negated(enumerate_r_classes(*s, 0))),
                single(*s, zero)};
        } else {
            const KClass e = e_bundle_class(*s);
            c.blocks = {Block{BlockKind::Exceptional, {{e, "E"}}, ""}, of_lines(*s, negated(enumerate_r_classes(*s, 0))),
                single(*s, zero)};
        }
        return c;
    }

    const DivisorClass f = *m.fibration;
    std::vector<DivisorClass> others;
    for (const auto& h : enumerate_r_classes(*s, 0))
        if (h != f)
            others.push_back(h);
    if (d == 8) {
        if (s->base() != BaseSurface::Hirzebruch || s->points() != 0)
            throw CatalogError("degree-8 conic bundle is modeled as F_n");
        const DivisorClass sb = DivisorClass::basis(2, 0), hb = DivisorClass::basis(2, 1);
        DivisorClass section;
        if (f == hb)
            section = sb;
        else if (s->hirzebruch_d() == 0 && f == sb)
            section = hb;
        else
            throw CatalogError("fibration of F_n must be the ruling h");
        c.blocks = {single(*s, -(section + f)), single(*s, -section), single(*s, -f), single(*s, zero)};
    } else if (d == 6) {
        c.blocks = {of_lines(*s, negated(enumerate_r_classes(*s, 1))), of_lines(*s, negated(others)), single(*s, -f),
            single(*s, zero)};
    } else {
        const KClass e = e_bundle_class(*s);
        c.blocks = {Block{BlockKind::Exceptional, {{e, "E"}}, ""}, of_lines(*s, negated(others)), single(*s, -f),
            single(*s, zero)};
    }
    return c;
}

bool validate_link(const LinkDescriptor& d)
{
    using P = std::pair<Int, Int>;
    static const std::set<P> type_one = {{9, 8}, {9, 5}, {8, 6}, {4, 3}};
    switch (d.type) {
    case LinkType::I:
        return d.base == BaseKind::Point && type_one.count({d.d1, d.d2}) && (!d.dz || *d.dz == d.d2);
    case LinkType::III:
        return d.base == BaseKind::Point && type_one.count({d.d2, d.d1}) && (!d.dz || *d.dz == d.d1);
    case LinkType::IV:
        return d.base == BaseKind::Point && d.d1 == d.d2 && (d.d1 == 1 || d.d1 == 2 || d.d1 == 4 || d.d1 == 8)
            && (!d.dz || *d.dz == d.d1);
    case LinkType::II:
        break;
    }
    if (d.base != BaseKind::Point)
        return d.d1 == d.d2 && d.d1 <= 8 && (!d.dz || *d.dz < d.d1);
    if (!d.dz)
        return false;
    const Int a = d.d1, z = *d.dz, b = d.d2;
    if (a == b) {
        static const std::set<Int> bertini = {9, 8, 6, 5, 4, 3, 2};
        static const std::set<Int> geiser = {9, 8, 6, 5, 4, 3};
        static const std::set<P> special = {{9, 6}, {9, 3}, {8, 4}, {6, 4}, {6, 3}};
        return (z == 1 && bertini.count(a)) || (z == 2 && geiser.count(a)) || special.count({a, z});
    }
    static const std::set<std::tuple<Int, Int, Int>> asym = {{9, 7, 8}, {9, 4, 5}, {8, 5, 6}, {8, 3, 5}};
    return asym.count({a, z, b}) || asym.count({b, z, a});
}

std::string format_descriptor(const LinkDescriptor& d)
{
    static const char* names[] = {"I", "II", "III", "IV"};
    std::ostringstream os;
    os << names[static_cast<int>(d.type)] << " (" << d.d1;
    if (d.dz)
        os << "," << *d.dz;
    os << "," << d.d2 << ") over "
       << (d.base == BaseKind::Point ? "point" : d.base == BaseKind::RationalCurve ? "P1" : "curve");
    return os.str();
}

Mat geiser_bertini_involution(const SurfaceModel& s)
{
    const Int d = s.degree();
    if (d != 1 && d != 2)
        throw CatalogError("Geiser/Bertini involution needs degree 1 or 2");
    const std::size_t n = s.picard_rank();
    const DivisorClass k = canonical_class(s);
    Mat m = zeros(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const DivisorClass e = DivisorClass::basis(n, j);
        const DivisorClass img = (2 * intersect(s, e, k) / d) * k - e;
        for (std::size_t i = 0; i < n; ++i)
            m[i][j] = img.c[i];
    }
    return m;
}

KClass apply_involution(const Mat& sigma, const KClass& a)
{
    return KClass(a.rank, DivisorClass(multiply(sigma, a.c1.c)), a.chi);
}

Collection apply_involution(const Mat& sigma, const Collection& c)
{
    Collection out = c;
    for (auto& b : out.blocks)
        for (auto& o : b.objects) {
            o.cls = apply_involution(sigma, o.cls);
            if (b.kind == BlockKind::Exceptional)
                o.label = describe_kclass(c.model(), o.cls);
        }
    return out;
}

SurfaceModel parse_surface_spec(const std::string& text)
{
    std::string t = trim_copy(text);
    std::vector<Int> orbits;
    const auto lb = t.find('[');
    if (lb != std::string::npos) {
        const auto rb = t.find(']', lb);
        if (rb == std::string::npos)
            throw ParseError("unterminated blow-up list in '" + text + "'");
        for (const auto& tok : split_top_level(t.substr(lb + 1, rb - lb - 1), ',')) {
            if (tok.empty())
                continue;
            std::size_t pos = 0;
            long v = 0;
            try {
                v = std::stol(tok, &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (pos != tok.size() || v <= 0)
                throw ParseError("bad orbit size '" + tok + "' in '" + text + "'");
            orbits.push_back(v);
        }
        t = trim_copy(t.substr(0, lb));
    }
    if (t == "P2")
        return SurfaceModel::projective_plane(orbits);
    if (t.size() >= 2 && t[0] == 'F' && std::all_of(t.begin() + 1, t.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
        return SurfaceModel::hirzebruch(std::stol(t.substr(1)), orbits);
    throw ParseError("unknown base surface '" + t + "' (expected P2 or F<d>)");
}

namespace {

std::string unquote(const std::string& s, std::size_t& pos)
{
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
        ++pos;
    if (pos >= s.size() || s[pos] != '"')
        return "";
    const auto end = s.find('"', pos + 1);
    if (end == std::string::npos)
        throw ParseError("unterminated label in '" + s + "'");
    std::string out = s.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    return out;
}

// Divisor expression, optionally wrapped as sigma(...).
DivisorClass eval_divisor(const std::string& text, const DivisorNames& names, const std::optional<Mat>& sigma)
{
    const std::string t = trim_copy(text);
    if (t.rfind("sigma(", 0) == 0 && t.back() == ')') {
        if (!sigma)
            throw ParseError("sigma(...) used without an involution: '" + text + "'");
        return DivisorClass(multiply(*sigma, eval_divisor(t.substr(6, t.size() - 7), names, sigma).c));
    }
    try {
        return names.parse(t);
    } catch (const LatticeError& e) {
        throw ParseError(e.what());
    }
}

KClass parse_object(const std::string& text, const SurfaceModel& s, const DivisorNames& names)
{
    std::string t = trim_copy(text);
    if (t.empty())
        throw ParseError("empty object in collection");
    if (t[0] == '-')
        return -parse_object(t.substr(1), s, names);
    if (t == "O")
        return line_bundle_class(s, DivisorClass::zero(s.picard_rank()));
    if (t.rfind("ext(", 0) == 0 && t.back() == ')') {
        KClass sum = KClass::zero(s.picard_rank());
        for (const auto& part : split_top_level(t.substr(4, t.size() - 5), ','))
            sum = sum + parse_object(part, s, names);
        return sum;
    }
    if (t.rfind("O(", 0) == 0 && t.back() == ')')
        return line_bundle_class(s, names.parse(t.substr(2, t.size() - 3)));
    if (t.rfind("O_", 0) == 0) {
        std::size_t pos = 2;
        std::string expr;
        if (pos < t.size() && t[pos] == '[') {
            const auto close = t.find(']', pos);
            if (close == std::string::npos)
                throw ParseError("unterminated '[' in '" + t + "'");
            expr = t.substr(pos + 1, close - pos - 1);
            pos = close + 1;
        } else {
            const std::size_t start = pos;
            while (pos < t.size() && (std::isalnum(static_cast<unsigned char>(t[pos])) || t[pos] == '\'' || t[pos] == '_'))
                ++pos;
            expr = t.substr(start, pos - start);
        }
        if (pos >= t.size() || t[pos] != '(' || t.back() != ')')
            throw ParseError("expected O_E(k) in '" + t + "'");
        const std::string kt = trim_copy(t.substr(pos + 1, t.size() - pos - 2));
        std::size_t used = 0;
        long k = 0;
        try {
            k = std::stol(kt, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != kt.size() || kt.empty())
            throw ParseError("bad twist degree in '" + t + "'");
        try {
            return torsion_class(s, names.parse(expr), k);
        } catch (const LatticeError& e) {
            throw ParseError(std::string(e.what()) + " in '" + t + "'");
        }
    }
    throw ParseError("cannot parse object '" + t + "'");
}

} // namespace

Collection parse_collection(const std::string& text, std::shared_ptr<const SurfaceModel> s, const DivisorNames& names,
    const std::optional<Mat>& sigma, const Collection* sigma_source)
{
    const std::string t = trim_copy(text);
    if (t == "sigma") {
        if (!sigma || !sigma_source)
            throw ParseError("'sigma' collection needs an involution and a source collection");
        return apply_involution(*sigma, *sigma_source);
    }
    if (t.size() < 2 || t.front() != '<' || t.back() != '>')
        throw ParseError("collection must be written as < ... >: '" + text + "'");
    Collection c{s, {}};
    std::vector<std::size_t> complements;
    try {
        for (const auto& btext : split_top_level(t.substr(1, t.size() - 2), '|')) {
            if (btext.rfind("opaque", 0) == 0) {
                std::size_t pos = 6;
                Block b{BlockKind::Opaque, {}, unquote(btext, pos)};
                const auto lb = btext.find('{', pos);
                const auto rb = btext.rfind('}');
                if (lb == std::string::npos || rb == std::string::npos || rb < lb)
                    throw ParseError("opaque block needs { ... }: '" + btext + "'");
                std::size_t k = 0;
                for (const auto& o : split_top_level(btext.substr(lb + 1, rb - lb - 1), ','))
                    b.objects.push_back({parse_object(o, *s, names), b.label + "#" + std::to_string(++k)});
                c.blocks.push_back(std::move(b));
            } else if (btext.rfind("complement", 0) == 0) {
                std::size_t pos = 10;
                complements.push_back(c.blocks.size());
                c.blocks.push_back(Block{BlockKind::Opaque, {}, unquote(btext, pos)});
            } else {
                Block b;
                for (const auto& o : split_top_level(btext, ',')) {
                    const KClass k = parse_object(o, *s, names);
                    b.objects.push_back({k, trim_copy(o)});
                }
                c.blocks.push_back(std::move(b));
            }
        }
    } catch (const LatticeError& e) {
        throw ParseError(e.what());
    }
    for (std::size_t idx : complements)
        c.blocks[idx] = complement_block(c, idx, c.blocks[idx].label);
    return c;
}

bool serre_identity_holds(const Collection& c, const SerreIdentity& id, const Mat& sigma, std::string* detail)
{
    const Mat p = power(subcategory_serre_matrix(c, id.first, id.last), id.power);
    Mat basis;
    for (std::size_t b = id.first - 1; b < id.last; ++b)
        for (const auto& o : c.blocks[b].objects)
            basis.push_back(o.cls.coords());
    Mat sig = zeros(basis.size(), basis.size());
    for (std::size_t j = 0; j < basis.size(); ++j) {
        const auto img = apply_involution(sigma, KClass::from_coords(basis[j])).coords();
        const auto coeff = solve_in_row_lattice(basis, img);
        if (!coeff) {
            if (detail)
                *detail = "sigma does not preserve the span of the range";
            return false;
        }
        for (std::size_t i = 0; i < basis.size(); ++i)
            sig[i][j] = (*coeff)[i];
    }
    const bool ok = p == negate(sig);
    if (detail)
        *detail = "S^" + std::to_string(id.power) + " = " + format_mat(p) + (ok ? " equals" : " differs from") + " -sigma* = "
            + format_mat(negate(sig));
    return ok;
}

namespace {

std::pair<std::size_t, std::size_t> parse_range(const std::string& text)
{
    const auto dots = text.find("..");
    if (dots == std::string::npos)
        throw ParseError("expected a block range a..b, got '" + text + "'");
    try {
        const long a = std::stol(text.substr(0, dots));
        const long b = std::stol(text.substr(dots + 2));
        if (a < 1 || b < a)
            throw ParseError("bad block range '" + text + "'");
        return {static_cast<std::size_t>(a), static_cast<std::size_t>(b)};
    } catch (const std::logic_error&) {
        throw ParseError("bad block range '" + text + "'");
    }
}

std::vector<std::string> words(const std::string& s)
{
    std::istringstream is(s);
    std::vector<std::string> out;
    for (std::string w; is >> w;)
        out.push_back(w);
    return out;
}

long parse_long(const std::string& s, const std::string& where)
{
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size() || s.empty())
        throw ParseError("expected an integer in '" + where + "'");
    return v;
}

LinkDescriptor parse_descriptor(const Stanza& st, const std::string& kind)
{
    LinkDescriptor d;
    if (kind == "I")
        d.type = LinkType::I;
    else if (kind == "II")
        d.type = LinkType::II;
    else if (kind == "III")
        d.type = LinkType::III;
    else if (kind == "IV")
        d.type = LinkType::IV;
    else
        throw ParseError("unknown link kind '" + kind + "'");
    const auto deg = words(st.require("degrees"));
    if (deg.size() == 2) {
        d.d1 = parse_long(deg[0], "degrees");
        d.d2 = parse_long(deg[1], "degrees");
    } else if (deg.size() == 3) {
        d.d1 = parse_long(deg[0], "degrees");
        d.dz = parse_long(deg[1], "degrees");
        d.d2 = parse_long(deg[2], "degrees");
    } else {
        throw ParseError("degrees needs two or three integers");
    }
    const std::string base = st.get("base").value_or("point");
    if (base == "point")
        d.base = BaseKind::Point;
    else if (base == "P1")
        d.base = BaseKind::RationalCurve;
    else if (base == "curve")
        d.base = BaseKind::Curve;
    else
        throw ParseError("unknown base '" + base + "'");
    return d;
}

std::vector<ScriptStep> parse_steps(const std::string& text, const LinkScript& ls, const DivisorNames& names)
{
    std::vector<ScriptStep> out;
    std::string flat = text;
    std::replace(flat.begin(), flat.end(), '\n', ';');
    for (const auto& item : split_top_level(flat, ';')) {
        if (item.empty())
            continue;
        ScriptStep st;
        st.text = item;
        if (item.rfind("expect", 0) == 0) {
            st.kind = ScriptStep::Kind::Expect;
            st.expect = parse_collection(item.substr(6), ls.roof, names, ls.involution, &ls.side1);
        } else if (item.rfind("rotate-match", 0) == 0) {
            st.kind = ScriptStep::Kind::RotateMatch;
            const auto w = words(item.substr(12));
            if (w.size() != 2)
                throw ParseError("rotate-match expects 'a..b bound'");
            std::tie(st.first, st.last) = parse_range(w[0]);
            st.bound = parse_long(w[1], item);
        } else {
            st.kind = ScriptStep::Kind::Apply;
            try {
                st.move = parse_move(item);
            } catch (const std::invalid_argument& e) {
                throw ParseError(e.what());
            }
        }
        out.push_back(std::move(st));
    }
    return out;
}

Move inverse_move(const Move& m)
{
    switch (m.kind) {
    case MoveKind::LeftBlock:
        return Move::right(m.index - 1);
    case MoveKind::RightBlock:
        return Move::left(m.index + 1);
    case MoveKind::HelixMinusK:
        return Move::helix_plus();
    case MoveKind::HelixPlusK:
        return Move::helix_minus();
    case MoveKind::OrthoSwap:
        return m;
    case MoveKind::SerrePower:
        return Move::serre(m.first, m.last, -m.power);
    default:
        throw ParseError("move '" + format_move(m) + "' cannot be inverted automatically");
    }
}

LinkScript invert_script(const LinkScript& src, const Stanza& st)
{
    LinkScript ls = src;
    ls.id = st.name;
    ls.inverse_of = src.id;
    ls.kind = st.get("kind").value_or(src.kind);
    ls.descriptor = parse_descriptor(st, ls.kind);
    std::swap(ls.side1, ls.side2);
    ls.steps.clear();
    ls.serre_identities.clear();
    ls.serre_claim.reset();
    for (auto it = src.steps.rbegin(); it != src.steps.rend(); ++it) {
        if (it->kind == ScriptStep::Kind::Expect)
            continue;
        if (it->kind == ScriptStep::Kind::RotateMatch)
            throw ParseError("script with rotate-match cannot be inverted");
        ScriptStep s;
        s.move = inverse_move(it->move);
        s.text = format_move(s.move);
        ls.steps.push_back(s);
    }
    return ls;
}

LinkScript parse_link(const Stanza& st)
{
    LinkScript ls;
    ls.id = st.name;
    ls.kind = st.require("kind");
    if (ls.kind != "refinement")
        ls.descriptor = parse_descriptor(st, ls.kind);
    ls.roof_text = st.require("roof");
    ls.roof = std::make_shared<const SurfaceModel>(parse_surface_spec(ls.roof_text));
    DivisorNames names(*ls.roof);

    if (auto inv = st.get("involution")) {
        const Int want = *inv == "bertini" ? 1 : *inv == "geiser" ? 2 : 0;
        if (want == 0)
            throw ParseError("involution must be bertini or geiser");
        if (ls.roof->degree() != want)
            throw ParseError(*inv + " involution on a roof of degree " + std::to_string(ls.roof->degree()));
        ls.involution = geiser_bertini_involution(*ls.roof);
    }

    for (const auto& [key, value] : st.entries) {
        if (key.rfind("dict ", 0) != 0)
            continue;
        const std::string name = trim_copy(key.substr(5));
        std::string expr = value;
        const auto colon = value.rfind(':');
        if (colon != std::string::npos) {
            expr = value.substr(0, colon);
            ls.r_assertions.push_back({name, parse_long(trim_copy(value.substr(colon + 1)), key)});
        }
        const DivisorClass d = eval_divisor(expr, names, ls.involution);
        names.define(name, d);
        ls.dictionary[name] = d;
    }
    for (const auto& a : st.get_all("assert")) {
        const auto eq = a.find('=');
        if (eq == std::string::npos)
            throw ParseError("assert needs 'lhs = rhs'");
        ls.equalities.push_back({trim_copy(a.substr(0, eq)), trim_copy(a.substr(eq + 1))});
    }

    ls.side1 = parse_collection(st.require("side1"), ls.roof, names, ls.involution, nullptr);
    ls.side2 = parse_collection(st.require("side2"), ls.roof, names, ls.involution, &ls.side1);
    ls.steps = parse_steps(st.get("moves").value_or(""), ls, names);
    for (const auto& sc : st.get_all("serre-check")) {
        const auto w = words(sc);
        if (w.size() != 2 || w[1].size() < 2 || w[1][0] != '^')
            throw ParseError("serre-check expects 'a..b ^N'");
        SerreIdentity id;
        std::tie(id.first, id.last) = parse_range(w[0]);
        id.power = parse_long(w[1].substr(1), sc);
        ls.serre_identities.push_back(id);
    }
    if (auto claim = st.get("serre-claim")) {
        const auto w = words(*claim);
        if (w.size() != 2)
            throw ParseError("serre-claim expects 'a..b bound'");
        SerreClaim c;
        std::tie(c.first, c.last) = parse_range(w[0]);
        c.bound = parse_long(w[1], *claim);
        ls.serre_claim = c;
    }
    return ls;
}

// Names usable in assert lines: recompute from the stored dictionary.
DivisorClass eval_in_script(const LinkScript& ls, const std::string& text)
{
    DivisorNames names(*ls.roof);
    for (const auto& [k, v] : ls.dictionary)
        names.define(k, v);
    return eval_divisor(text, names, ls.involution);
}

} // namespace

std::vector<LinkScript> load_link_scripts(const std::string& text)
{
    std::vector<LinkScript> out;
    for (const auto& st : parse_stanzas(text)) {
        if (st.section != "link")
            continue;
        try {
            if (auto inv = st.get("inverse")) {
                auto it = std::find_if(out.begin(), out.end(), [&](const LinkScript& l) { return l.id == *inv; });
                if (it == out.end())
                    throw ParseError("inverse of unknown link '" + *inv + "'");
                out.push_back(invert_script(*it, st));
            } else {
                out.push_back(parse_link(st));
            }
        } catch (const std::exception& e) {
            throw ParseError("link \"" + st.name + "\" (line " + std::to_string(st.line) + "): " + e.what());
        }
    }
    return out;
}

const std::vector<LinkScript>& builtin_link_scripts()
{
    static const std::vector<LinkScript> scripts = load_link_scripts(kBuiltinLinkData);
    return scripts;
}

const LinkScript& link_script(const std::string& id)
{
    for (const auto& l : builtin_link_scripts())
        if (l.id == id)
            return l;
    throw CatalogError("no catalog link with id '" + id + "'");
}

std::vector<std::string> catalog_ids()
{
    std::vector<std::string> ids;
    for (const auto& l : builtin_link_scripts())
        ids.push_back(l.id);
    return ids;
}

namespace {

CertificateStep record(std::size_t index, const std::string& move, const Collection& c)
{
    CertificateStep st;
    st.index = index;
    st.move = move;
    st.collection = format_collection(c);
    for (const auto& b : c.blocks) {
        std::vector<std::string> cls;
        for (const auto& o : b.objects)
            cls.push_back(format_kclass(normalize_sign(o.cls)));
        st.classes.push_back(std::move(cls));
    }
    const CheckReport rep = check_collection(c);
    st.gram = rep.gram;
    st.ok = rep.ok;
    if (!rep.ok)
        st.detail = rep.violations.front();
    return st;
}

} // namespace

Certificate verify_link(const LinkScript& ls)
{
    Certificate cert;
    cert.id = ls.id;
    const SurfaceModel& s = *ls.roof;
    auto claim = [&](const std::string& name, bool ok, const std::string& detail) {
        cert.claims.push_back({name, ok, detail});
    };

    if (ls.descriptor)
        claim("descriptor " + format_descriptor(*ls.descriptor), validate_link(*ls.descriptor), "numerical classification");
    const std::size_t rank = s.picard_rank() + 2;
    claim("rank law", ls.side1.object_count() == rank && ls.side2.object_count() == rank,
        "objects " + std::to_string(ls.side1.object_count()) + "/" + std::to_string(ls.side2.object_count()) + ", K0 rank "
            + std::to_string(rank));
    for (const auto& a : ls.r_assertions) {
        const auto r = r_class_value(s, ls.dictionary.at(a.name));
        claim("r(" + a.name + ") = " + std::to_string(a.r), r == a.r,
            format_divisor(s, ls.dictionary.at(a.name)) + (r ? " has r = " + std::to_string(*r) : " is not an r-class"));
    }
    for (const auto& e : ls.equalities) {
        bool ok = false;
        std::string detail;
        try {
            const auto l = eval_in_script(ls, e.lhs), r = eval_in_script(ls, e.rhs);
            ok = l == r;
            detail = format_divisor(s, l) + (ok ? " == " : " != ") + format_divisor(s, r);
        } catch (const std::exception& ex) {
            detail = ex.what();
        }
        claim(e.lhs + " = " + e.rhs, ok, detail);
    }
    if (ls.involution) {
        const Mat& g = *ls.involution;
        const bool isometry = multiply(transpose(g), multiply(s.gram(), g)) == s.gram();
        const bool fixes_k = multiply(g, s.canonical()) == s.canonical();
        const bool involutive = multiply(g, g) == identity(s.picard_rank());
        claim("involution", isometry && fixes_k && involutive, "isometry, fixes K, squares to identity");
    }
    for (const auto* side : {&ls.side1, &ls.side2}) {
        const CheckReport rep = check_collection(*side);
        claim(side == &ls.side1 ? "side1 semi-orthogonal" : "side2 semi-orthogonal", rep.ok && rep.full,
            rep.ok ? (rep.full ? "full" : "not full") : rep.violations.front());
    }
    for (const auto& id : ls.serre_identities) {
        std::string detail;
        bool ok = false;
        try {
            ok = ls.involution && serre_identity_holds(ls.side1, id, *ls.involution, &detail);
        } catch (const std::exception& e) {
            detail = e.what();
        }
        claim("serre " + std::to_string(id.first) + ".." + std::to_string(id.last) + " ^" + std::to_string(id.power) + " = -sigma*",
            ok, detail);
    }

    Collection cur = ls.side1;
    std::optional<Collection> before_rotation;
    std::size_t index = 0;
    cert.steps.push_back(record(index++, "start", cur));
    bool replay_ok = cert.steps.back().ok;
    for (const auto& step : ls.steps) {
        if (!replay_ok)
            break;
        if (step.kind == ScriptStep::Kind::Apply) {
            try {
                cur = apply_move(cur, step.move);
                cert.steps.push_back(record(index++, format_move(step.move), cur));
            } catch (const std::exception& e) {
                CertificateStep bad = record(index++, format_move(step.move), cur);
                bad.ok = false;
                bad.detail = e.what();
                cert.steps.push_back(bad);
                replay_ok = false;
            }
        } else if (step.kind == ScriptStep::Kind::Expect) {
            CertificateStep st = record(index++, "expect", cur);
            st.ok = collections_equal(cur, step.expect, CompareMode::UpToSignAndBlockPerm);
            if (!st.ok)
                st.detail = "expected " + format_collection(step.expect);
            cert.steps.push_back(st);
            replay_ok = st.ok;
        } else {
            before_rotation = cur;
            std::optional<long> found;
            for (long k = 0; k <= step.bound && !found; ++k)
                for (long sign : {-1L, 1L}) {
                    if (k == 0 && sign > 0)
                        continue;
                    const long kk = sign * k;
                    Collection trial = cur;
                    try {
                        for (const auto& m : rotation_moves(step.first, step.last, kk))
                            trial = apply_move(trial, m);
                    } catch (const MutationError&) {
                        continue;
                    }
                    if (collections_equal(trial, ls.side2, CompareMode::UpToSignAndBlockPerm)) {
                        found = kk;
                        break;
                    }
                }
            if (!found) {
                CertificateStep st = record(index++, step.text, cur);
                st.ok = false;
                st.detail = "no rotation within bound matches the target";
                cert.steps.push_back(st);
                replay_ok = false;
            } else {
                cert.rotation = *found;
                for (const auto& m : rotation_moves(step.first, step.last, *found)) {
                    cur = apply_move(cur, m);
                    cert.steps.push_back(record(index++, format_move(m), cur));
                }
            }
        }
    }
    if (replay_ok)
        claim("final collection matches side2", collections_equal(cur, ls.side2, CompareMode::UpToSignAndBlockPerm),
            format_collection(cur) + " vs " + format_collection(ls.side2));
    else
        claim("replay", false, cert.steps.back().detail);

    if (ls.serre_claim) {
        cert.serre_claim_checked = true;
        const Collection& at = before_rotation ? *before_rotation : cur;
        try {
            cert.serre_power = serre_power_match(sub_collection(at, ls.serre_claim->first, ls.serre_claim->last),
                sub_collection(ls.side2, ls.serre_claim->first, ls.serre_claim->last), ls.serre_claim->bound);
        } catch (const std::exception&) {
            cert.serre_power.reset();
        }
    }

    cert.pass = std::all_of(cert.claims.begin(), cert.claims.end(), [](const ClaimResult& c) { return c.ok; });
    for (const auto& c : cert.claims)
        if (!c.ok) {
            cert.failure = c.name + ": " + c.detail;
            break;
        }
    return cert;
}

Certificate verify_link(const std::string& id)
{
    return verify_link(link_script(id));
}

std::string Certificate::to_jsonl() const
{
    using nlohmann::json;
    std::ostringstream os;
    os << json{{"record", "header"}, {"case", id}, {"note", "verified at K-theory level"}}.dump() << '\n';
    for (const auto& st : steps) {
        json j{{"record", "step"}, {"case", id}, {"step", st.index}, {"move", st.move}, {"collection", st.collection},
            {"classes", st.classes}, {"gram", st.gram}, {"verdict", st.ok ? "ok" : "fail"}};
        if (!st.detail.empty())
            j["detail"] = st.detail;
        os << j.dump() << '\n';
    }
    for (const auto& c : claims)
        os << json{{"record", "claim"}, {"case", id}, {"claim", c.name}, {"verdict", c.ok ? "ok" : "fail"}, {"detail", c.detail}}.dump()
           << '\n';
    json v{{"record", "verdict"}, {"case", id}, {"verdict", pass ? "pass" : "fail"}};
    if (!failure.empty())
        v["failure"] = failure;
    if (rotation)
        v["rotation"] = *rotation;
    if (serre_claim_checked)
        v["serre_power"] = serre_power ? json(*serre_power) : json(nullptr);
    os << v.dump() << '\n';
    return os.str();
}

} // namespace sodatlas
