#include "sodatlas/arithmetic.hpp"

#include "sodatlas/textio.hpp"

#include <algorithm>
#include <sstream>

namespace sodatlas {

SmallAtom make_small_atom(long d1, long d2, std::string label)
{
    if (d1 < 1 || d2 < 1)
        throw ArithmeticError("atom degrees must be positive");
    if ((d2 == 1) != (label == "0"))
        throw ArithmeticError("Brauer index 1 goes with label \"0\" and only with it (got index " + std::to_string(d2)
            + ", label \"" + label + "\")");
    return SmallAtom{d1, d2, std::move(label)};
}

long dam_order(const AtomProfile& p)
{
    if (!p.opaque.empty())
        throw ArithmeticError("profile contains an opaque atom");
    long n = 1;
    for (const auto& a : p.atoms)
        n *= a.brauer_index;
    return n;
}

bool index_formula_check(const AtomProfile& p)
{
    if (!p.amitsur_order || !p.surface_index)
        throw ArithmeticError("index formula needs both am and ind");
    return *p.surface_index * *p.amitsur_order == dam_order(p);
}

bool is_rational_profile(const AtomProfile& p)
{
    return p.opaque.empty() && std::all_of(p.atoms.begin(), p.atoms.end(), [](const SmallAtom& a) { return a.trivial(); });
}

bool is_rich_profile(const AtomProfile& p)
{
    return p.opaque.empty();
}

namespace {

template <class T>
bool same_multiset(std::vector<T> a, std::vector<T> b)
{
    if (a.size() != b.size())
        return false;
    for (const auto& x : a) {
        auto it = std::find(b.begin(), b.end(), x);
        if (it == b.end())
            return false;
        b.erase(it);
    }
    return true;
}

} // namespace

bool same_nontrivial_atoms(const AtomProfile& p, const AtomProfile& q)
{
    auto nontrivial = [](const AtomProfile& x) {
        std::vector<SmallAtom> out;
        for (const auto& a : x.atoms)
            if (!a.trivial())
                out.push_back(a);
        return out;
    };
    return same_multiset(nontrivial(p), nontrivial(q)) && same_multiset(p.opaque, q.opaque);
}

std::vector<std::string> dp6_consistency(const AtomProfile& p)
{
    if (!p.opaque.empty() || p.atoms.size() != 3)
        throw ArithmeticError("degree-6 check needs exactly three small atoms");
    const SmallAtom* a2 = nullptr;
    const SmallAtom* a3 = nullptr;
    const SmallAtom* a1 = nullptr;
    for (const auto& a : p.atoms) {
        if (a.field_degree == 2 && !a2)
            a2 = &a;
        else if (a.field_degree == 3 && !a3)
            a3 = &a;
        else if (a.field_degree == 1 && !a1)
            a1 = &a;
    }
    if (!a1 || !a2 || !a3)
        throw ArithmeticError("degree-6 check needs atoms over fields of degree 1, 2 and 3");
    std::vector<std::string> warnings;
    if (a2->brauer_index > 3)
        warnings.push_back("atom over the quadratic field has index " + std::to_string(a2->brauer_index) + " > 3");
    if (a3->brauer_index > 2)
        warnings.push_back("atom over the cubic field has index " + std::to_string(a3->brauer_index) + " > 2");
    if (!a1->trivial())
        warnings.push_back("atom over the base field must be trivial");
    const long product = a2->brauer_index * a3->brauer_index;
    if (p.surface_index) {
        const long ind = *p.surface_index;
        if (ind != 1 && ind != 2 && ind != 3 && ind != 6)
            warnings.push_back("index " + std::to_string(ind) + " is not in {1,2,3,6}");
        if (ind != product)
            warnings.push_back("index " + std::to_string(ind) + " differs from the product of atom indices " + std::to_string(product));
    }
    return warnings;
}

AtomProfile concatenate(const AtomProfile& p, const AtomProfile& q)
{
    AtomProfile r = p;
    r.atoms.insert(r.atoms.end(), q.atoms.begin(), q.atoms.end());
    r.opaque.insert(r.opaque.end(), q.opaque.begin(), q.opaque.end());
    r.amitsur_order.reset();
    r.surface_index.reset();
    return r;
}

namespace {

long parse_positive(const std::string& s, const std::string& where)
{
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(trim_copy(s), &pos);
    } catch (const std::exception&) {
        throw ParseError("expected an integer in '" + where + "'");
    }
    if (pos != trim_copy(s).size() || v < 1)
        throw ParseError("expected a positive integer in '" + where + "'");
    return v;
}

std::string unquote(const std::string& s, const std::string& where)
{
    const std::string t = trim_copy(s);
    if (t.size() < 2 || t.front() != '"' || t.back() != '"')
        throw ParseError("expected a quoted label in '" + where + "'");
    return t.substr(1, t.size() - 2);
}

} // namespace

namespace {

AtomProfile profile_from(const Stanza& st)
{
    AtomProfile p;
    for (const auto& [key, value] : st.entries) {
        const std::string v = trim_copy(value);
        if (key == "a") {
            if (v.rfind("opaque(", 0) == 0 && v.back() == ')') {
                const auto parts = split_top_level(v.substr(7, v.size() - 8), ',');
                if (parts.size() != 2)
                    throw ParseError("opaque atom needs (\"shape\", degree): '" + v + "'");
                long deg = 0;
                try {
                    deg = std::stol(parts[1]);
                } catch (const std::exception&) {
                    throw ParseError("bad opaque degree in '" + v + "'");
                }
                p.opaque.push_back({unquote(parts[0], v), deg});
            } else if (v.size() >= 2 && v.front() == '(' && v.back() == ')') {
                const auto parts = split_top_level(v.substr(1, v.size() - 2), ',');
                if (parts.size() != 2 && parts.size() != 3)
                    throw ParseError("atom needs (d1, d2[, \"label\"]): '" + v + "'");
                const long d1 = parse_positive(parts[0], v), d2 = parse_positive(parts[1], v);
                const std::string label = parts.size() == 3 ? unquote(parts[2], v) : (d2 == 1 ? "0" : "");
                try {
                    p.atoms.push_back(make_small_atom(d1, d2, label));
                } catch (const ArithmeticError& e) {
                    throw ParseError(e.what());
                }
            } else {
                throw ParseError("cannot parse atom '" + v + "'");
            }
        } else if (key == "am") {
            p.amitsur_order = parse_positive(v, key);
        } else if (key == "ind") {
            p.surface_index = parse_positive(v, key);
        } else {
            throw ParseError("unknown profile key '" + key + "'");
        }
    }
    return p;
}

} // namespace

AtomProfile parse_profile(const std::string& text)
{
    for (const auto& st : parse_stanzas(text))
        if (st.section == "atoms")
            return profile_from(st);
    throw ParseError("no [atoms] stanza found");
}

std::vector<std::pair<std::string, AtomProfile>> parse_profiles(const std::string& text)
{
    std::vector<std::pair<std::string, AtomProfile>> out;
    for (const auto& st : parse_stanzas(text))
        if (st.section == "atoms") {
            try {
                out.emplace_back(st.name, profile_from(st));
            } catch (const ParseError& e) {
                throw ParseError("profile \"" + st.name + "\": " + e.what());
            }
        }
    return out;
}

extern const char* const kBuiltinProfileData;

const std::vector<std::pair<std::string, AtomProfile>>& builtin_profiles()
{
    static const auto profiles = parse_profiles(kBuiltinProfileData);
    return profiles;
}

std::string format_profile(const AtomProfile& p)
{
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (const auto& a : p.atoms) {
        os << (first ? "" : ", ") << "(" << a.field_degree << "," << a.brauer_index << ",\"" << a.brauer_label << "\")";
        first = false;
    }
    for (const auto& o : p.opaque) {
        os << (first ? "" : ", ") << "opaque(\"" << o.shape << "\"," << o.degree << ")";
        first = false;
    }
    os << "}";
    return os.str();
}

} // namespace sodatlas
