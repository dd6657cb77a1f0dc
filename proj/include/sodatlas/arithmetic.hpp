#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sodatlas {

struct ArithmeticError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An atom of type (d1, d2): defined over a field extension of degree d1, with a Brauer class of index d2.
struct SmallAtom {
    long field_degree = 1;
    long brauer_index = 1;
    std::string brauer_label = "0";

    bool trivial() const { return brauer_index == 1 && brauer_label == "0"; }
    bool operator==(const SmallAtom&) const = default;
};

struct OpaqueMarker {
    std::string shape;
    long degree = 0;
    bool operator==(const OpaqueMarker&) const = default;
};

struct AtomProfile {
    std::vector<SmallAtom> atoms;
    std::vector<OpaqueMarker> opaque;
    std::optional<long> amitsur_order;
    std::optional<long> surface_index;
};

// Throws ArithmeticError when index 1 and label "0" do not go together.
SmallAtom make_small_atom(long d1, long d2, std::string label);

long dam_order(const AtomProfile& p);
bool index_formula_check(const AtomProfile& p);
bool is_rational_profile(const AtomProfile& p);
bool is_rich_profile(const AtomProfile& p);
bool same_nontrivial_atoms(const AtomProfile& p, const AtomProfile& q);
std::vector<std::string> dp6_consistency(const AtomProfile& p);

AtomProfile concatenate(const AtomProfile& p, const AtomProfile& q);

// "[atoms]" stanza: a = (d1, d2, "label") or a = opaque("shape", degree), plus am = n, ind = n.
AtomProfile parse_profile(const std::string& text);
// Every [atoms "name"] stanza, in file order.
std::vector<std::pair<std::string, AtomProfile>> parse_profiles(const std::string& text);
const std::vector<std::pair<std::string, AtomProfile>>& builtin_profiles();
std::string format_profile(const AtomProfile& p);

} // namespace sodatlas
