#pragma once

#include "sodatlas/mutation.hpp"
#include "sodatlas/textio.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sodatlas {

enum class BaseKind { Point, RationalCurve, Curve };

struct MoriFibreSpace {
    SurfaceModel surface;
    BaseKind base = BaseKind::Point;
    Int genus = 0; // only for BaseKind::Curve
    std::optional<DivisorClass> fibration;

    // For a curve of genus g the model stands in for a ruled surface over P^1, shifted by 8g.
    Int degree() const;
};

struct CatalogError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Throws CatalogError on a degree/base combination that is not a Mori fibre space.
void validate_mori_fibre_space(const MoriFibreSpace& m);
bool birationally_rich(const MoriFibreSpace& m);
Collection standard_sod(const MoriFibreSpace& m);

// The five pairs (h_i, H_i = -K - h_i) of a degree-5 model, h_i the 0-classes in sorted order.
std::vector<std::pair<DivisorClass, DivisorClass>> degree5_pairs(const SurfaceModel& s);
KClass e_bundle_class(const SurfaceModel& s, std::size_t pair_index);
// Computed through every pair; throws CatalogError if they disagree.
KClass e_bundle_class(const SurfaceModel& s);

enum class LinkType { I, II, III, IV };

struct LinkDescriptor {
    LinkType type = LinkType::I;
    Int d1 = 0;
    std::optional<Int> dz;
    Int d2 = 0;
    BaseKind base = BaseKind::Point;
};

bool validate_link(const LinkDescriptor& d);
std::string format_descriptor(const LinkDescriptor& d);

// sigma*(D) = (2 D.K / d) K - D on a degree 1 or 2 model, as a matrix acting on columns.
Mat geiser_bertini_involution(const SurfaceModel& s);
KClass apply_involution(const Mat& sigma, const KClass& a);
Collection apply_involution(const Mat& sigma, const Collection& c);

struct ScriptStep {
    enum class Kind { Apply, Expect, RotateMatch };
    Kind kind = Kind::Apply;
    Move move;
    Collection expect;
    std::size_t first = 0, last = 0;
    long bound = 0;
    std::string text;
};

struct SerreIdentity {
    std::size_t first = 0, last = 0;
    long power = 1;
};

struct SerreClaim {
    std::size_t first = 0, last = 0;
    long bound = 12;
};

struct DictAssertion {
    std::string name;
    Int r = 0;
};

struct EqualityAssertion {
    std::string lhs, rhs;
};

struct LinkScript {
    std::string id;
    std::string kind; // "I", "II", "III", "IV" or "refinement"
    std::optional<LinkDescriptor> descriptor;
    std::string roof_text;
    std::shared_ptr<const SurfaceModel> roof;
    std::map<std::string, DivisorClass> dictionary;
    std::vector<DictAssertion> r_assertions;
    std::vector<EqualityAssertion> equalities;
    std::optional<Mat> involution;
    Collection side1;
    Collection side2;
    std::vector<ScriptStep> steps;
    std::vector<SerreIdentity> serre_identities;
    std::optional<SerreClaim> serre_claim;
    std::string inverse_of;
};

// Parses every [link "..."] stanza; links with "inverse = ID" are derived from ID.
std::vector<LinkScript> load_link_scripts(const std::string& text);
const std::vector<LinkScript>& builtin_link_scripts();
const LinkScript& link_script(const std::string& id);
std::vector<std::string> catalog_ids();

// Parsing helpers shared with the CLI.
SurfaceModel parse_surface_spec(const std::string& text); // "P2 [1, 2]" or "F0 [3]"
Collection parse_collection(const std::string& text, std::shared_ptr<const SurfaceModel> s, const DivisorNames& names,
    const std::optional<Mat>& sigma = std::nullopt, const Collection* sigma_source = nullptr);
// Serre matrix power compared with -sigma expressed in the basis of the range.
bool serre_identity_holds(const Collection& c, const SerreIdentity& id, const Mat& sigma, std::string* detail = nullptr);

struct CertificateStep {
    std::size_t index = 0;
    std::string move;
    std::string collection;
    std::vector<std::vector<std::string>> classes;
    Mat gram;
    bool ok = true;
    std::string detail;
};

struct ClaimResult {
    std::string name;
    bool ok = false;
    std::string detail;
};

struct Certificate {
    std::string id;
    bool pass = false;
    std::vector<CertificateStep> steps;
    std::vector<ClaimResult> claims;
    std::optional<long> rotation;
    std::optional<long> serre_power; // serre_power_match result for scripts carrying a claim
    bool serre_claim_checked = false;
    std::string failure;

    // One JSON object per line: a header, then one record per step, then the verdict.
    std::string to_jsonl() const;
};

Certificate verify_link(const LinkScript& script);
Certificate verify_link(const std::string& id);

} // namespace sodatlas
