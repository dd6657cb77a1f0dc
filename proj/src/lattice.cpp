#include "sodatlas/lattice.hpp"

#include <cctype>
#include <functional>
#include <numeric>
#include <sstream>

namespace sodatlas {

SurfaceModel::SurfaceModel(BaseSurface base, Int d, std::vector<Int> orbits)
    : base_(base), d_(d), orbits_(std::move(orbits))
{
    for (Int o : orbits_)
        if (o <= 0)
            throw LatticeError("orbit sizes must be positive");
    if (base_ == BaseSurface::Hirzebruch && d_ < 0)
        throw LatticeError("Hirzebruch parameter must be nonnegative");

    const std::size_t n = points();
    const std::size_t b = base_rank();
    const std::size_t rho = b + n;
    gram_ = zeros(rho, rho);
    canonical_.assign(rho, 0);
    if (base_ == BaseSurface::ProjectivePlane) {
        labels_.push_back("H");
        gram_[0][0] = 1;
        canonical_[0] = -3;
    } else {
        labels_.push_back("s");
        labels_.push_back("h");
        gram_[0][0] = -d_;
        gram_[0][1] = gram_[1][0] = 1;
        canonical_[0] = -2;
        canonical_[1] = -(2 + d_);
    }
    for (std::size_t i = 0; i < n; ++i) {
        labels_.push_back("E" + std::to_string(i + 1));
        gram_[b + i][b + i] = -1;
        canonical_[b + i] = 1;
    }
    canonical_dual_ = multiply(gram_, canonical_);
    degree_ = dot(canonical_, canonical_dual_);
}

SurfaceModel SurfaceModel::projective_plane(std::vector<Int> blowup_orbits)
{
    return SurfaceModel(BaseSurface::ProjectivePlane, 0, std::move(blowup_orbits));
}

SurfaceModel SurfaceModel::hirzebruch(Int d, std::vector<Int> blowup_orbits)
{
    return SurfaceModel(BaseSurface::Hirzebruch, d, std::move(blowup_orbits));
}

std::size_t SurfaceModel::points() const
{
    return static_cast<std::size_t>(std::accumulate(orbits_.begin(), orbits_.end(), Int{0}));
}

std::string SurfaceModel::describe() const
{
    std::ostringstream os;
    os << (base_ == BaseSurface::ProjectivePlane ? std::string("P2") : "F" + std::to_string(d_));
    os << " [";
    for (std::size_t i = 0; i < orbits_.size(); ++i)
        os << (i ? ", " : "") << orbits_[i];
    os << "] degree " << degree_;
    return os.str();
}

DivisorClass DivisorClass::basis(std::size_t n, std::size_t i)
{
    DivisorClass d = zero(n);
    d.c.at(i) = 1;
    return d;
}

bool DivisorClass::is_zero() const
{
    return std::all_of(c.begin(), c.end(), [](Int x) { return x == 0; });
}

DivisorClass DivisorClass::operator+(const DivisorClass& o) const
{
    DivisorClass r = *this;
    r += o;
    return r;
}

DivisorClass DivisorClass::operator-(const DivisorClass& o) const
{
    return *this + (-o);
}

DivisorClass DivisorClass::operator-() const
{
    return (-1) * *this;
}

DivisorClass& DivisorClass::operator+=(const DivisorClass& o)
{
    if (o.size() != size())
        throw LatticeError("divisor length mismatch");
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] = add_checked(c[i], o.c[i]);
    return *this;
}

DivisorClass operator*(Int k, const DivisorClass& d)
{
    DivisorClass r = d;
    for (auto& x : r.c)
        x = mul_checked(k, x);
    return r;
}

Int intersect(const SurfaceModel& s, const DivisorClass& a, const DivisorClass& b)
{
    if (a.size() != s.picard_rank() || b.size() != s.picard_rank())
        throw LatticeError("divisor does not belong to this lattice");
    return dot(a.c, multiply(s.gram(), b.c));
}

DivisorClass canonical_class(const SurfaceModel& s)
{
    return DivisorClass(s.canonical());
}

std::optional<Int> r_class_value(const SurfaceModel& s, const DivisorClass& d)
{
    const Int dd = intersect(s, d, d);
    const Int dk = dot(d.c, s.canonical_dual());
    if (dd + dk != -2)
        return std::nullopt;
    return dd;
}

std::vector<Vec> lattice_points_of_norm(const Mat& q, Int target)
{
    const std::size_t n = q.size();
    std::vector<Vec> out;
    if (target < 0)
        return out;
    if (n == 0) {
        if (target == 0)
            out.emplace_back();
        return out;
    }

    // Q(x) = sum_i a[i][i] * (x_i + sum_{j>i} a[i][j] x_j)^2
    std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a[i][j] = Rational(q[i][j]);
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i][i] <= Rational(0))
            throw LatticeError("form is not positive definite");
        for (std::size_t j = i + 1; j < n; ++j) {
            a[j][i] = a[i][j];
            a[i][j] = a[i][j] / a[i][i];
        }
        for (std::size_t k = i + 1; k < n; ++k)
            for (std::size_t l = k; l < n; ++l)
                a[k][l] = a[k][l] - a[k][i] * a[i][l];
    }

    Vec x(n, 0);
    std::function<void(std::size_t, Rational)> descend = [&](std::size_t level, Rational budget) {
        const std::size_t i = level - 1;
        Rational center(0);
        for (std::size_t j = i + 1; j < n; ++j)
            center = center + a[i][j] * Rational(x[j]);
        const Rational room = budget / a[i][i];
        const Int radius = isqrt_floor(room.ceil()) + 1;
        const Int lo = (-center).floor() - radius;
        const Int hi = (-center).ceil() + radius;
        for (Int v = lo; v <= hi; ++v) {
            const Rational t = Rational(v) + center;
            const Rational used = a[i][i] * t * t;
            if (budget < used)
                continue;
            x[i] = v;
            if (i == 0) {
                if (dot(x, multiply(q, x)) == target)
                    out.push_back(x);
            } else {
                descend(i, budget - used);
            }
        }
        x[i] = 0;
    };
    descend(n, Rational(target));
    return out;
}

std::vector<DivisorClass> enumerate_r_classes(const SurfaceModel& s, Int r)
{
    if (r < -2 || r > 1)
        throw LatticeError("r must lie in {-2,-1,0,1}");
    const Int d = s.degree();
    if (d <= 0)
        throw LatticeError("enumeration needs K^2 > 0");
    if (d < 3 && r >= 0)
        throw LatticeError("unsupported range: degree < 3 with r >= 0");

    // On K^perp the form is negative definite, so 2(x.K)^2 - d x^2 is positive definite.
    // An r-class has x.K = -(2+r) and x^2 = r.
    const Vec& k = s.canonical_dual();
    const std::size_t rho = s.picard_rank();
    Mat q = zeros(rho, rho);
    for (std::size_t i = 0; i < rho; ++i)
        for (std::size_t j = 0; j < rho; ++j)
            q[i][j] = 2 * k[i] * k[j] - d * s.gram()[i][j];
    const Int target = 2 * (2 + r) * (2 + r) - d * r;

    std::vector<DivisorClass> out;
    for (Vec& v : lattice_points_of_norm(q, target)) {
        if (dot(v, k) != -(2 + r))
            continue;
        DivisorClass cls(std::move(v));
        if (r_class_value(s, cls) == r)
            out.push_back(std::move(cls));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<DivisorClass> enumerate_contracted_r_classes(const SurfaceModel& s, Int r, const std::vector<DivisorClass>& contracted)
{
    if (r < -2 || r > 1)
        throw LatticeError("r must lie in {-2,-1,0,1}");
    if (contracted.empty())
        return enumerate_r_classes(s, r);
    const std::size_t rho = s.picard_rank();
    DivisorClass kmin = canonical_class(s);
    for (std::size_t i = 0; i < contracted.size(); ++i) {
        if (r_class_value(s, contracted[i]) != -1)
            throw LatticeError("contracted class " + format_divisor(s, contracted[i]) + " is not a (-1)-class");
        for (std::size_t j = 0; j < i; ++j)
            if (intersect(s, contracted[i], contracted[j]) != 0)
                throw LatticeError("contracted classes must be pairwise orthogonal");
        kmin = kmin - contracted[i];
    }
    const Int d = intersect(s, kmin, kmin);
    if (d <= 0)
        throw LatticeError("enumeration needs K^2 > 0 on the contracted model");
    if (d < 3 && r >= 0)
        throw LatticeError("unsupported range: degree < 3 with r >= 0");

    Mat rows;
    for (const auto& e : contracted)
        rows.push_back(multiply(s.gram(), e.c));
    const Mat ker = kernel_basis(rows, rho);
    if (ker.empty())
        return {};
    const Mat basis = transpose(ker); // columns span the orthogonal complement
    const Vec k = multiply(s.gram(), kmin.c);
    Mat full = zeros(rho, rho);
    for (std::size_t i = 0; i < rho; ++i)
        for (std::size_t j = 0; j < rho; ++j)
            full[i][j] = 2 * k[i] * k[j] - d * s.gram()[i][j];
    const Mat q = multiply(transpose(basis), multiply(full, basis));
    const Int target = 2 * (2 + r) * (2 + r) - d * r;

    std::vector<DivisorClass> out;
    for (const Vec& y : lattice_points_of_norm(q, target)) {
        DivisorClass cls(multiply(basis, y));
        if (dot(cls.c, k) == -(2 + r) && intersect(s, cls, cls) == r)
            out.push_back(std::move(cls));
    }
    std::sort(out.begin(), out.end());
    return out;
}

DivisorClass dual_class(const SurfaceModel& s, const DivisorClass& d, DualMode mode)
{
    const DivisorClass k = canonical_class(s);
    const Int m = mode == DualMode::AntiCanonical ? -1 : -2;
    return m * k - d;
}

SurfaceModel blow_up(const SurfaceModel& s, Int orbit_size)
{
    std::vector<Int> orbits = s.blowup_orbits();
    orbits.push_back(orbit_size);
    return s.base() == BaseSurface::ProjectivePlane
        ? SurfaceModel::projective_plane(std::move(orbits))
        : SurfaceModel::hirzebruch(s.hirzebruch_d(), std::move(orbits));
}

std::string format_divisor(const SurfaceModel& s, const DivisorClass& d)
{
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const Int c = d.c[i];
        if (c == 0)
            continue;
        if (c < 0)
            os << '-';
        else if (!first)
            os << '+';
        if (c != 1 && c != -1)
            os << (c < 0 ? -c : c);
        os << s.labels().at(i);
        first = false;
    }
    return first ? "0" : os.str();
}

DivisorNames::DivisorNames(const SurfaceModel& s) : rank_(s.picard_rank())
{
    for (std::size_t i = 0; i < rank_; ++i)
        names_[s.labels()[i]] = DivisorClass::basis(rank_, i);
    names_["K"] = canonical_class(s);
}

void DivisorNames::define(const std::string& name, const DivisorClass& d)
{
    if (d.size() != rank_)
        throw LatticeError("divisor length mismatch for " + name);
    names_[name] = d;
}

const DivisorClass& DivisorNames::at(const std::string& name) const
{
    auto it = names_.find(name);
    if (it == names_.end())
        throw LatticeError("unknown divisor name '" + name + "'");
    return it->second;
}

namespace {

bool name_char(char ch)
{
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '\'';
}

class ExprParser {
public:
    ExprParser(const DivisorNames& names, std::size_t rank, const std::string& text)
        : names_(names), rank_(rank), text_(text)
    {
    }

    DivisorClass run()
    {
        DivisorClass v = sum();
        skip();
        if (pos_ != text_.size())
            fail("unexpected character");
        return v;
    }

private:
    void skip()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    [[noreturn]] void fail(const std::string& why) const
    {
        throw LatticeError(why + " in divisor expression '" + text_ + "' at " + std::to_string(pos_));
    }

    DivisorClass sum()
    {
        DivisorClass acc = DivisorClass::zero(rank_);
        skip();
        Int sign = 1;
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
            sign = text_[pos_] == '-' ? -1 : 1;
            ++pos_;
        }
        acc += sign * term();
        for (;;) {
            skip();
            if (pos_ >= text_.size() || (text_[pos_] != '+' && text_[pos_] != '-'))
                return acc;
            sign = text_[pos_] == '-' ? -1 : 1;
            ++pos_;
            acc += sign * term();
        }
    }

    DivisorClass term()
    {
        skip();
        Int coeff = 1;
        bool has_coeff = false;
        if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            coeff = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                coeff = add_checked(mul_checked(coeff, 10), text_[pos_++] - '0');
            has_coeff = true;
            skip();
            if (pos_ < text_.size() && text_[pos_] == '*') {
                ++pos_;
                skip();
            }
        }
        if (pos_ < text_.size() && text_[pos_] == '(') {
            ++pos_;
            DivisorClass inner = sum();
            skip();
            if (pos_ >= text_.size() || text_[pos_] != ')')
                fail("missing ')'");
            ++pos_;
            return coeff * inner;
        }
        if (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
            const std::size_t start = pos_;
            while (pos_ < text_.size() && name_char(text_[pos_]))
                ++pos_;
            return coeff * names_.at(text_.substr(start, pos_ - start));
        }
        if (has_coeff && coeff == 0)
            return DivisorClass::zero(rank_);
        fail("expected a term");
    }

    const DivisorNames& names_;
    std::size_t rank_;
    const std::string& text_;
    std::size_t pos_ = 0;
};

} // namespace

DivisorClass DivisorNames::parse(const std::string& expr) const
{
    return ExprParser(*this, rank_, expr).run();
}

} // namespace sodatlas
