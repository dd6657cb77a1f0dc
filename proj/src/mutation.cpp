#include "sodatlas/mutation.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>
#include <unordered_set>

namespace sodatlas {

std::vector<KClass> Block::classes() const
{
    std::vector<KClass> out;
    out.reserve(objects.size());
    for (const auto& o : objects)
        out.push_back(o.cls);
    return out;
}

std::size_t Collection::object_count() const
{
    std::size_t n = 0;
    for (const auto& b : blocks)
        n += b.size();
    return n;
}

std::vector<KClass> Collection::classes() const
{
    std::vector<KClass> out;
    for (const auto& b : blocks)
        for (const auto& o : b.objects)
            out.push_back(o.cls);
    return out;
}

std::vector<std::size_t> Collection::block_sizes() const
{
    std::vector<std::size_t> out;
    for (const auto& b : blocks)
        out.push_back(b.size());
    return out;
}

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::size_t parse_index(const std::string& tok, const std::string& whole)
{
    std::size_t pos = 0;
    long v = -1;
    try {
        v = std::stol(tok, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != tok.size() || v <= 0)
        throw std::invalid_argument("bad block index in move '" + whole + "'");
    return static_cast<std::size_t>(v);
}

Mat gram_of(const SurfaceModel& s, const std::vector<KClass>& cls)
{
    Mat g = zeros(cls.size(), cls.size());
    for (std::size_t i = 0; i < cls.size(); ++i)
        for (std::size_t j = 0; j < cls.size(); ++j)
            g[i][j] = euler_pairing(s, cls[i], cls[j]);
    return g;
}

Mat coords_rows(const std::vector<KClass>& cls)
{
    Mat m;
    for (const auto& c : cls)
        m.push_back(c.coords());
    return m;
}

// Mutation of t through the span of a; ginv is the inverse Gram matrix of a.
KClass mutate_through(const SurfaceModel& s, const std::vector<KClass>& a, const Mat& ginv, const KClass& t, Side side)
{
    Vec v(a.size());
    for (std::size_t j = 0; j < a.size(); ++j)
        v[j] = side == Side::Left ? euler_pairing(s, a[j], t) : euler_pairing(s, t, a[j]);
    const Vec c = side == Side::Left ? multiply(ginv, v) : multiply(transpose(ginv), v);
    KClass out = t;
    for (std::size_t j = 0; j < a.size(); ++j)
        out = out - c[j] * a[j];
    return out;
}

Block mutated_block(const SurfaceModel& s, const Block& through, const Block& moving, Side side)
{
    const auto a = through.classes();
    Mat ginv;
    try {
        ginv = inverse_unimodular(gram_of(s, a));
    } catch (const std::domain_error&) {
        throw MutationError("block used for mutation has a non-unimodular Gram matrix");
    }
    Block out = moving;
    for (auto& o : out.objects) {
        o.cls = mutate_through(s, a, ginv, o.cls, side);
        if (moving.kind == BlockKind::Exceptional)
            o.label = describe_kclass(s, o.cls);
    }
    return out;
}

Block twisted_block(const SurfaceModel& s, const Block& b, const DivisorClass& l)
{
    Block out = b;
    for (auto& o : out.objects) {
        o.cls = twist(s, o.cls, l);
        if (b.kind == BlockKind::Exceptional)
            o.label = describe_kclass(s, o.cls);
    }
    return out;
}

void require_orthogonal(const SurfaceModel& s, const Block& a, const Block& b, const std::string& what)
{
    for (const auto& x : a.objects)
        for (const auto& y : b.objects)
            if (euler_pairing(s, x.cls, y.cls) != 0 || euler_pairing(s, y.cls, x.cls) != 0)
                throw MutationError(what + ": blocks are not completely orthogonal");
}

void require_index(bool ok, const Move& m)
{
    if (!ok)
        throw MutationError("move '" + format_move(m) + "' is out of range");
}

std::vector<Vec> sorted_normalized(const Block& b)
{
    std::vector<Vec> v;
    for (const auto& o : b.objects)
        v.push_back(normalize_sign(o.cls).coords());
    std::sort(v.begin(), v.end());
    return v;
}

} // namespace

Move parse_move(const std::string& text)
{
    std::istringstream is(trim(text));
    std::vector<std::string> tok;
    for (std::string t; is >> t;)
        tok.push_back(t);
    if (tok.empty())
        throw std::invalid_argument("empty move");
    const std::string& op = tok[0];
    auto need = [&](std::size_t n) {
        if (tok.size() != n)
            throw std::invalid_argument("wrong number of arguments in move '" + text + "'");
    };
    if (op == "L" || op == "R") {
        need(2);
        const std::size_t i = parse_index(tok[1], text);
        return op == "L" ? Move::left(i) : Move::right(i);
    }
    if (op == "-K" || op == "+K") {
        need(1);
        return op == "-K" ? Move::helix_minus() : Move::helix_plus();
    }
    if (op == "helix") {
        need(2);
        if (tok[1] == "-K")
            return Move::helix_minus();
        if (tok[1] == "+K")
            return Move::helix_plus();
        throw std::invalid_argument("helix expects -K or +K in '" + text + "'");
    }
    if (op == "swap" || op == "merge") {
        need(2);
        const std::size_t i = parse_index(tok[1], text);
        return op == "swap" ? Move::swap(i) : Move::merge(i);
    }
    if (op == "split") {
        need(3);
        std::vector<std::size_t> part;
        std::stringstream ps(tok[2]);
        for (std::string p; std::getline(ps, p, ',');)
            part.push_back(parse_index(p, text));
        return Move::split(parse_index(tok[1], text), part);
    }
    if (op == "serre") {
        need(3);
        const auto dots = tok[1].find("..");
        if (dots == std::string::npos || tok[2].size() < 2 || tok[2][0] != '^')
            throw std::invalid_argument("serre expects 'serre a..b ^N' in '" + text + "'");
        long n = 0;
        std::size_t pos = 0;
        try {
            n = std::stol(tok[2].substr(1), &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos + 1 != tok[2].size())
            throw std::invalid_argument("bad power in '" + text + "'");
        return Move::serre(parse_index(tok[1].substr(0, dots), text), parse_index(tok[1].substr(dots + 2), text), n);
    }
    throw std::invalid_argument("unknown move '" + text + "'");
}

std::vector<Move> parse_moves(const std::string& text)
{
    std::vector<Move> out;
    std::string cur;
    for (char ch : text + ";") {
        if (ch == ';' || ch == '\n') {
            if (!trim(cur).empty())
                out.push_back(parse_move(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    return out;
}

std::string format_move(const Move& m)
{
    switch (m.kind) {
    case MoveKind::LeftBlock:
        return "L " + std::to_string(m.index);
    case MoveKind::RightBlock:
        return "R " + std::to_string(m.index);
    case MoveKind::HelixMinusK:
        return "helix -K";
    case MoveKind::HelixPlusK:
        return "helix +K";
    case MoveKind::OrthoSwap:
        return "swap " + std::to_string(m.index);
    case MoveKind::Merge:
        return "merge " + std::to_string(m.index);
    case MoveKind::Split: {
        std::string s = "split " + std::to_string(m.index) + " ";
        for (std::size_t i = 0; i < m.part.size(); ++i)
            s += (i ? "," : "") + std::to_string(m.part[i]);
        return s;
    }
    case MoveKind::SerrePower:
        return "serre " + std::to_string(m.first) + ".." + std::to_string(m.last) + " ^" + std::to_string(m.power);
    }
    return "?";
}

CheckReport check_collection(const Collection& c)
{
    const SurfaceModel& s = c.model();
    CheckReport rep;
    const auto cls = c.classes();
    rep.gram = gram_of(s, cls);

    std::size_t start = 0;
    for (std::size_t b = 0; b < c.blocks.size(); ++b) {
        const Block& blk = c.blocks[b];
        const std::size_t n = blk.size();
        if (n == 0) {
            // Empty opaque blocks mark components with no numerical content.
            if (blk.kind != BlockKind::Opaque)
                rep.violations.push_back("block " + std::to_string(b + 1) + " is empty");
            continue;
        }
        Mat diag = zeros(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                diag[i][j] = rep.gram[start + i][start + j];
        if (blk.kind == BlockKind::Exceptional) {
            if (diag != identity(n))
                rep.violations.push_back("block " + std::to_string(b + 1) + " Gram is not the identity: " + format_mat(diag));
        } else {
            const Int det = determinant(diag);
            if (det != 1 && det != -1)
                rep.violations.push_back("opaque block " + std::to_string(b + 1) + " has Gram determinant " + std::to_string(det));
        }
        for (std::size_t i = start; i < start + n; ++i)
            for (std::size_t j = 0; j < start; ++j)
                if (rep.gram[i][j] != 0)
                    rep.violations.push_back("chi(object " + std::to_string(i + 1) + ", object " + std::to_string(j + 1)
                        + ") = " + std::to_string(rep.gram[i][j]) + " for a later block against an earlier one");
        start += n;
    }
    rep.ok = rep.violations.empty();
    if (cls.size() == s.picard_rank() + 2) {
        const Int det = determinant(coords_rows(cls));
        rep.full = det == 1 || det == -1;
    }
    return rep;
}

Collection apply_move(const Collection& c, const Move& m)
{
    const SurfaceModel& s = c.model();
    const std::size_t nb = c.blocks.size();
    Collection out = c;
    auto& bl = out.blocks;
    switch (m.kind) {
    case MoveKind::LeftBlock: {
        require_index(m.index >= 2 && m.index <= nb, m);
        const std::size_t i = m.index - 1;
        Block moved = mutated_block(s, c.blocks[i - 1], c.blocks[i], Side::Left);
        bl[i - 1] = std::move(moved);
        bl[i] = c.blocks[i - 1];
        break;
    }
    case MoveKind::RightBlock: {
        require_index(m.index >= 1 && m.index < nb, m);
        const std::size_t i = m.index - 1;
        Block moved = mutated_block(s, c.blocks[i + 1], c.blocks[i], Side::Right);
        bl[i] = c.blocks[i + 1];
        bl[i + 1] = std::move(moved);
        break;
    }
    case MoveKind::HelixMinusK: {
        require_index(nb >= 1, m);
        const DivisorClass minus_k = -canonical_class(s);
        Block first = twisted_block(s, c.blocks.front(), minus_k);
        bl.erase(bl.begin());
        bl.push_back(std::move(first));
        break;
    }
    case MoveKind::HelixPlusK: {
        require_index(nb >= 1, m);
        Block last = twisted_block(s, c.blocks.back(), canonical_class(s));
        bl.pop_back();
        bl.insert(bl.begin(), std::move(last));
        break;
    }
    case MoveKind::OrthoSwap: {
        require_index(m.index >= 1 && m.index < nb, m);
        const std::size_t i = m.index - 1;
        require_orthogonal(s, c.blocks[i], c.blocks[i + 1], format_move(m));
        std::swap(bl[i], bl[i + 1]);
        break;
    }
    case MoveKind::Merge: {
        require_index(m.index >= 1 && m.index < nb, m);
        const std::size_t i = m.index - 1;
        require_orthogonal(s, c.blocks[i], c.blocks[i + 1], format_move(m));
        Block merged = c.blocks[i];
        merged.objects.insert(merged.objects.end(), c.blocks[i + 1].objects.begin(), c.blocks[i + 1].objects.end());
        if (c.blocks[i + 1].kind == BlockKind::Opaque)
            merged.kind = BlockKind::Opaque;
        bl[i] = std::move(merged);
        bl.erase(bl.begin() + static_cast<long>(i) + 1);
        break;
    }
    case MoveKind::Split: {
        require_index(m.index >= 1 && m.index <= nb, m);
        const Block& src = c.blocks[m.index - 1];
        std::set<std::size_t> part(m.part.begin(), m.part.end());
        if (part.empty() || part.size() >= src.size() || *part.rbegin() > src.size() || part.size() != m.part.size())
            throw MutationError("split '" + format_move(m) + "' must name a proper nonempty subset of the block");
        Block a{src.kind, {}, src.label}, b{src.kind, {}, src.label};
        for (std::size_t j = 0; j < src.size(); ++j)
            (part.count(j + 1) ? a : b).objects.push_back(src.objects[j]);
        bl[m.index - 1] = std::move(a);
        bl.insert(bl.begin() + static_cast<long>(m.index), std::move(b));
        break;
    }
    case MoveKind::SerrePower: {
        require_index(m.first >= 1 && m.first <= m.last && m.last <= nb, m);
        std::vector<KClass> cls;
        for (std::size_t b = m.first - 1; b < m.last; ++b)
            for (const auto& o : c.blocks[b].objects)
                cls.push_back(o.cls);
        const Mat p = power(subcategory_serre_matrix(c, m.first, m.last), m.power);
        std::size_t col = 0;
        for (std::size_t b = m.first - 1; b < m.last; ++b)
            for (auto& o : bl[b].objects) {
                KClass img = KClass::zero(s.picard_rank());
                for (std::size_t r = 0; r < cls.size(); ++r)
                    img = img + p[r][col] * cls[r];
                o.cls = img;
                if (bl[b].kind == BlockKind::Exceptional)
                    o.label = describe_kclass(s, img);
                ++col;
            }
        break;
    }
    }
    const CheckReport rep = check_collection(out);
    if (!rep.ok)
        throw MutationError("after '" + format_move(m) + "': " + rep.violations.front());
    return out;
}

Mat range_gram(const Collection& c, std::size_t first, std::size_t last)
{
    if (first < 1 || first > last || last > c.blocks.size())
        throw MutationError("block range out of bounds");
    std::vector<KClass> cls;
    for (std::size_t b = first - 1; b < last; ++b)
        for (const auto& o : c.blocks[b].objects)
            cls.push_back(o.cls);
    return gram_of(c.model(), cls);
}

Mat subcategory_serre_matrix(const Collection& c, std::size_t first, std::size_t last)
{
    const Mat m = range_gram(c, first, last);
    try {
        return multiply(inverse_unimodular(m), transpose(m));
    } catch (const std::domain_error&) {
        throw MutationError("Gram matrix of the range is not invertible over the integers");
    }
}

Mat subcategory_serre_matrix(const Collection& c)
{
    return subcategory_serre_matrix(c, 1, c.blocks.size());
}

Mat block_span(const Block& b)
{
    if (b.objects.empty())
        return {};
    const Mat rows = coords_rows(b.classes());
    return hermite_rows(rows, rows.front().size());
}

bool blocks_equal(const Block& a, const Block& b, CompareMode mode)
{
    if (a.size() != b.size())
        return false;
    if (mode == CompareMode::Strict)
        return a.classes() == b.classes();
    if (a.kind == BlockKind::Opaque || b.kind == BlockKind::Opaque) {
        if (a.objects.empty())
            return true;
        return same_row_lattice(coords_rows(a.classes()), coords_rows(b.classes()), a.objects.front().cls.coords().size());
    }
    return sorted_normalized(a) == sorted_normalized(b);
}

bool collections_equal(const Collection& a, const Collection& b, CompareMode mode)
{
    if (!(a.model() == b.model()) || a.blocks.size() != b.blocks.size())
        return false;
    for (std::size_t i = 0; i < a.blocks.size(); ++i)
        if (!blocks_equal(a.blocks[i], b.blocks[i], mode))
            return false;
    return true;
}

Block complement_block(const Collection& c, std::size_t idx, const std::string& label)
{
    const SurfaceModel& s = c.model();
    const Mat p = euler_form_matrix(s);
    const std::size_t n = s.picard_rank() + 2;
    Mat rows;
    for (std::size_t b = 0; b < c.blocks.size(); ++b) {
        if (b == idx)
            continue;
        for (const auto& o : c.blocks[b].objects) {
            const Vec v = o.cls.coords();
            // earlier: chi(x, v) = x^T P v; later: chi(v, x) = v^T P x
            rows.push_back(b < idx ? multiply(p, v) : multiply(transpose(p), v));
        }
    }
    Mat ker = rows.empty() ? identity(n) : kernel_basis(rows, n);
    Block out{BlockKind::Opaque, {}, label};
    for (std::size_t k = 0; k < ker.size(); ++k)
        out.objects.push_back({KClass::from_coords(ker[k]), label + "#" + std::to_string(k + 1)});
    return out;
}

std::string canonical_key(const Collection& c)
{
    std::ostringstream os;
    for (const auto& b : c.blocks) {
        os << (b.kind == BlockKind::Opaque ? 'o' : 'e') << '[';
        const Mat rows = b.kind == BlockKind::Opaque ? block_span(b) : sorted_normalized(b);
        for (const auto& r : rows)
            os << format_vec(r);
        os << ']';
    }
    return os.str();
}

namespace {

std::vector<Move> candidate_moves(const Collection& c, const std::vector<MoveKind>& allowed)
{
    const std::size_t nb = c.blocks.size();
    std::vector<Move> out;
    for (MoveKind k : allowed) {
        switch (k) {
        case MoveKind::LeftBlock:
            for (std::size_t i = 2; i <= nb; ++i)
                out.push_back(Move::left(i));
            break;
        case MoveKind::RightBlock:
            for (std::size_t i = 1; i < nb; ++i)
                out.push_back(Move::right(i));
            break;
        case MoveKind::HelixMinusK:
            out.push_back(Move::helix_minus());
            break;
        case MoveKind::HelixPlusK:
            out.push_back(Move::helix_plus());
            break;
        case MoveKind::OrthoSwap:
            for (std::size_t i = 1; i < nb; ++i)
                out.push_back(Move::swap(i));
            break;
        case MoveKind::Merge:
            for (std::size_t i = 1; i < nb; ++i)
                out.push_back(Move::merge(i));
            break;
        case MoveKind::Split:
            for (std::size_t i = 1; i <= nb; ++i)
                if (c.blocks[i - 1].size() > 1)
                    for (std::size_t j = 1; j <= c.blocks[i - 1].size(); ++j)
                        out.push_back(Move::split(i, {j}));
            break;
        case MoveKind::SerrePower:
            for (std::size_t a = 1; a <= nb; ++a)
                for (std::size_t b = a + 1; b <= nb; ++b) {
                    out.push_back(Move::serre(a, b, 1));
                    out.push_back(Move::serre(a, b, -1));
                }
            break;
        }
    }
    return out;
}

} // namespace

std::optional<std::vector<Move>> search_path(const Collection& a, const Collection& b, const SearchOptions& opt)
{
    if (!(a.model() == b.model()) || a.object_count() != b.object_count())
        return std::nullopt;
    if (collections_equal(a, b, CompareMode::UpToSignAndBlockPerm))
        return std::vector<Move>{};

    struct Node {
        Collection c;
        std::size_t parent;
        Move move;
        std::size_t depth;
    };
    std::vector<Node> nodes;
    nodes.push_back({a, 0, {}, 0});
    std::unordered_set<std::string> seen{canonical_key(a)};
    std::deque<std::size_t> queue{0};
    while (!queue.empty()) {
        const std::size_t cur = queue.front();
        queue.pop_front();
        if (nodes[cur].depth >= opt.max_depth)
            continue;
        for (const Move& m : candidate_moves(nodes[cur].c, opt.allowed)) {
            Collection next;
            try {
                next = apply_move(nodes[cur].c, m);
            } catch (const MutationError&) {
                continue;
            }
            if (!seen.insert(canonical_key(next)).second)
                continue;
            nodes.push_back({std::move(next), cur, m, nodes[cur].depth + 1});
            const std::size_t id = nodes.size() - 1;
            if (collections_equal(nodes[id].c, b, CompareMode::UpToSignAndBlockPerm)) {
                std::vector<Move> path;
                for (std::size_t x = id; x != 0; x = nodes[x].parent)
                    path.push_back(nodes[x].move);
                std::reverse(path.begin(), path.end());
                return path;
            }
            if (nodes.size() >= opt.max_nodes)
                return std::nullopt;
            queue.push_back(id);
        }
    }
    return std::nullopt;
}

std::optional<long> serre_power_match(const Collection& a, const Collection& b, long n_max)
{
    if (!(a.model() == b.model()) || a.block_sizes() != b.block_sizes() || a.blocks.empty())
        return std::nullopt;
    const Mat s = subcategory_serre_matrix(a);
    const Mat s_inv = inverse_unimodular(s);
    const auto cls = a.classes();
    const std::size_t n = cls.size();

    auto matches = [&](const Mat& p) {
        Collection img = a;
        std::size_t col = 0;
        for (auto& blk : img.blocks)
            for (auto& o : blk.objects) {
                KClass v = KClass::zero(a.model().picard_rank());
                for (std::size_t r = 0; r < n; ++r)
                    v = v + p[r][col] * cls[r];
                o.cls = v;
                ++col;
            }
        return collections_equal(img, b, CompareMode::UpToSignAndBlockPerm);
    };

    if (matches(identity(n)))
        return 0L;
    Mat pos = identity(n), neg = identity(n);
    for (long k = 1; k <= n_max; ++k) {
        pos = multiply(s, pos);
        if (matches(pos))
            return k;
        neg = multiply(s_inv, neg);
        if (matches(neg))
            return -k;
    }
    return std::nullopt;
}

std::vector<Move> rotation_moves(std::size_t first, std::size_t last, long k)
{
    std::vector<Move> out;
    if (first >= last)
        return out;
    for (long step = 0; step < (k < 0 ? -k : k); ++step) {
        if (k > 0)
            for (std::size_t i = last; i > first; --i)
                out.push_back(Move::left(i));
        else
            for (std::size_t i = first; i < last; ++i)
                out.push_back(Move::right(i));
    }
    return out;
}

Collection sub_collection(const Collection& c, std::size_t first, std::size_t last)
{
    if (first < 1 || first > last || last > c.blocks.size())
        throw MutationError("block range out of bounds");
    Collection out{c.surface, {}};
    out.blocks.assign(c.blocks.begin() + static_cast<long>(first) - 1, c.blocks.begin() + static_cast<long>(last));
    return out;
}

std::string format_collection(const Collection& c)
{
    std::ostringstream os;
    os << "< ";
    for (std::size_t b = 0; b < c.blocks.size(); ++b) {
        const Block& blk = c.blocks[b];
        if (b)
            os << " | ";
        if (blk.kind == BlockKind::Opaque) {
            os << "opaque " << (blk.label.empty() ? "?" : blk.label) << "[" << blk.size() << "]";
            continue;
        }
        for (std::size_t i = 0; i < blk.size(); ++i)
            os << (i ? ", " : "")
               << (blk.objects[i].label.empty() ? describe_kclass(c.model(), blk.objects[i].cls) : blk.objects[i].label);
    }
    os << " >";
    return os.str();
}

} // namespace sodatlas
