#include "sodatlas/ktheory.hpp"

#include <sstream>

namespace sodatlas {

KClass KClass::operator+(const KClass& o) const
{
    return KClass(add_checked(rank, o.rank), c1 + o.c1, add_checked(chi, o.chi));
}

KClass KClass::operator-(const KClass& o) const
{
    return *this + (-o);
}

KClass KClass::operator-() const
{
    return (-1) * *this;
}

KClass operator*(Int k, const KClass& a)
{
    return KClass(mul_checked(k, a.rank), k * a.c1, mul_checked(k, a.chi));
}

Vec KClass::coords() const
{
    Vec v;
    v.reserve(c1.size() + 2);
    v.push_back(rank);
    v.insert(v.end(), c1.c.begin(), c1.c.end());
    v.push_back(chi);
    return v;
}

KClass KClass::from_coords(const Vec& v)
{
    if (v.size() < 2)
        throw std::invalid_argument("K0 coordinate vector too short");
    return KClass(v.front(), DivisorClass(Vec(v.begin() + 1, v.end() - 1)), v.back());
}

Int chi_line_bundle(const SurfaceModel& s, const DivisorClass& d)
{
    const Int dd = intersect(s, d, d);
    const Int dk = dot(d.c, s.canonical_dual());
    return 1 + (dd - dk) / 2;
}

KClass line_bundle_class(const SurfaceModel& s, const DivisorClass& d)
{
    return KClass(1, d, chi_line_bundle(s, d));
}

KClass torsion_class(const SurfaceModel& s, const DivisorClass& e, Int k)
{
    if (r_class_value(s, e) != -1)
        throw LatticeError("torsion class needs a (-1)-class, got " + format_divisor(s, e));
    return KClass(0, e, k + 1);
}

Int euler_pairing(const SurfaceModel& s, const KClass& a, const KClass& b)
{
    if (a.c1.size() != s.picard_rank() || b.c1.size() != s.picard_rank())
        throw LatticeError("K-class does not belong to this surface");
    Int v = mul_checked(a.rank, b.chi);
    v = add_checked(v, mul_checked(b.rank, a.chi));
    v = sub_checked(v, mul_checked(a.rank, b.rank));
    v = add_checked(v, mul_checked(b.rank, dot(a.c1.c, s.canonical_dual())));
    v = sub_checked(v, intersect(s, a.c1, b.c1));
    return v;
}

KClass twist(const SurfaceModel& s, const KClass& a, const DivisorClass& l)
{
    const Int ll = intersect(s, l, l);
    const Int lk = dot(l.c, s.canonical_dual());
    Int chi = add_checked(a.chi, intersect(s, a.c1, l));
    chi = add_checked(chi, mul_checked(a.rank, (ll - lk) / 2));
    return KClass(a.rank, a.c1 + a.rank * l, chi);
}

KClass serre_class(const SurfaceModel& s, const KClass& a)
{
    return twist(s, a, canonical_class(s));
}

KClass mutate_class(const SurfaceModel& s, const KClass& e, const KClass& t, Side side)
{
    const Int c = side == Side::Left ? euler_pairing(s, e, t) : euler_pairing(s, t, e);
    return t - c * e;
}

KClass normalize_sign(const KClass& a)
{
    for (Int x : a.coords())
        if (x != 0)
            return x > 0 ? a : -a;
    return a;
}

std::string format_kclass(const KClass& a)
{
    std::ostringstream os;
    os << '(' << a.rank << ';';
    for (std::size_t i = 0; i < a.c1.size(); ++i)
        os << (i ? "," : "") << a.c1.c[i];
    os << ';' << a.chi << ')';
    return os.str();
}

std::string describe_kclass(const SurfaceModel& s, const KClass& a)
{
    for (Int sign : {1, -1}) {
        const KClass b = sign * a;
        const std::string pre = sign < 0 ? "-" : "";
        if (b.rank == 1 && b.chi == chi_line_bundle(s, b.c1))
            return pre + "O(" + format_divisor(s, b.c1) + ")";
        if (b.rank == 0 && r_class_value(s, b.c1) == -1)
            return pre + "O_{" + format_divisor(s, b.c1) + "}(" + std::to_string(b.chi - 1) + ")";
    }
    return format_kclass(a);
}

Mat twist_matrix(const SurfaceModel& s, const DivisorClass& l)
{
    const std::size_t n = s.picard_rank() + 2;
    Mat m = zeros(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        Vec e(n, 0);
        e[j] = 1;
        const Vec img = twist(s, KClass::from_coords(e), l).coords();
        for (std::size_t i = 0; i < n; ++i)
            m[i][j] = img[i];
    }
    return m;
}

Mat euler_form_matrix(const SurfaceModel& s)
{
    const std::size_t n = s.picard_rank() + 2;
    Mat m = zeros(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        Vec ei(n, 0);
        ei[i] = 1;
        for (std::size_t j = 0; j < n; ++j) {
            Vec ej(n, 0);
            ej[j] = 1;
            m[i][j] = euler_pairing(s, KClass::from_coords(ei), KClass::from_coords(ej));
        }
    }
    return m;
}

} // namespace sodatlas
