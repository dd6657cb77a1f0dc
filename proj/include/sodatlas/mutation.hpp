#pragma once

#include "sodatlas/ktheory.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sodatlas {

struct ExcObject {
    KClass cls;
    std::string label;
};

enum class BlockKind {
    Exceptional, // mutually orthogonal exceptional objects
    Opaque       // a component known only through a basis of its K-span
};

struct Block {
    BlockKind kind = BlockKind::Exceptional;
    std::vector<ExcObject> objects;
    std::string label;

    std::size_t size() const { return objects.size(); }
    std::vector<KClass> classes() const;
};

struct Collection {
    std::shared_ptr<const SurfaceModel> surface;
    std::vector<Block> blocks;

    const SurfaceModel& model() const { return *surface; }
    std::size_t object_count() const;
    std::vector<KClass> classes() const;
    std::vector<std::size_t> block_sizes() const;
};

struct MutationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class MoveKind { LeftBlock, RightBlock, HelixMinusK, HelixPlusK, OrthoSwap, Merge, Split, SerrePower };

// Block indices are 1-based, as in the script language.
struct Move {
    MoveKind kind = MoveKind::LeftBlock;
    std::size_t index = 0;
    std::vector<std::size_t> part; // Split: 1-based positions forming the first new block
    std::size_t first = 0;         // SerrePower range, inclusive
    std::size_t last = 0;
    long power = 1;

    static Move at(MoveKind k, std::size_t i = 0)
    {
        Move m;
        m.kind = k;
        m.index = i;
        return m;
    }
    static Move left(std::size_t i) { return at(MoveKind::LeftBlock, i); }
    static Move right(std::size_t i) { return at(MoveKind::RightBlock, i); }
    static Move helix_minus() { return at(MoveKind::HelixMinusK); }
    static Move helix_plus() { return at(MoveKind::HelixPlusK); }
    static Move swap(std::size_t i) { return at(MoveKind::OrthoSwap, i); }
    static Move merge(std::size_t i) { return at(MoveKind::Merge, i); }
    static Move split(std::size_t i, std::vector<std::size_t> p)
    {
        Move m = at(MoveKind::Split, i);
        m.part = std::move(p);
        return m;
    }
    static Move serre(std::size_t a, std::size_t b, long n) { return {MoveKind::SerrePower, 0, {}, a, b, n}; }

    bool operator==(const Move&) const = default;
};

// "L 2", "R 1", "helix -K", "helix +K" (also "-K", "+K"), "swap 3", "merge 2",
// "split 1 1,3", "serre 1..4 ^3".
Move parse_move(const std::string& text);
std::vector<Move> parse_moves(const std::string& text);
std::string format_move(const Move& m);

struct CheckReport {
    bool ok = true;
    bool full = false;
    Mat gram;
    std::vector<std::string> violations;
};

CheckReport check_collection(const Collection& c);

// Throws MutationError on a failed precondition or when the result is not semi-orthogonal.
Collection apply_move(const Collection& c, const Move& m);

// Gram matrix of the flattened range [first, last] (1-based blocks) and S = M^-1 M^T.
Mat range_gram(const Collection& c, std::size_t first, std::size_t last);
Mat subcategory_serre_matrix(const Collection& c, std::size_t first, std::size_t last);
Mat subcategory_serre_matrix(const Collection& c);

enum class CompareMode { Strict, UpToSignAndBlockPerm };

bool collections_equal(const Collection& a, const Collection& b, CompareMode mode);
bool blocks_equal(const Block& a, const Block& b, CompareMode mode);

// Z-span of the block's classes in K0 coordinates, in Hermite form.
Mat block_span(const Block& b);

// Saturated sublattice {x : chi(x, earlier) = 0, chi(later, x) = 0} for the block at position
// idx (0-based), computed from the other blocks of c; the current content of block idx is ignored.
Block complement_block(const Collection& c, std::size_t idx, const std::string& label);

// Canonical key for deduplication: per block, sign-normalized sorted classes (or span for opaque).
std::string canonical_key(const Collection& c);

struct SearchOptions {
    std::size_t max_depth = 8;
    std::vector<MoveKind> allowed = {MoveKind::LeftBlock, MoveKind::RightBlock, MoveKind::HelixMinusK,
        MoveKind::HelixPlusK, MoveKind::OrthoSwap};
    std::size_t max_nodes = 200000;
};

std::optional<std::vector<Move>> search_path(const Collection& a, const Collection& b, const SearchOptions& opt);

// Smallest |N| <= n_max (N tried as 0, 1, -1, 2, -2, ...) with S^N taking a's classes onto b's
// block by block up to sign and permutation; S is the Serre matrix of a. Both are whole collections.
std::optional<long> serre_power_match(const Collection& a, const Collection& b, long n_max);

// Moves rotating blocks [first, last] by k steps: k > 0 moves the last block to the front by
// left mutations, k < 0 moves the first block to the end by right mutations.
std::vector<Move> rotation_moves(std::size_t first, std::size_t last, long k);

// Restriction of c to blocks [first, last] (1-based), as a collection on the same surface.
Collection sub_collection(const Collection& c, std::size_t first, std::size_t last);

std::string format_collection(const Collection& c);

} // namespace sodatlas
