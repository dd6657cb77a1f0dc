#include "sodatlas/intmath.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>
#include <utility>

namespace sodatlas {

namespace {

using Wide = __int128;

Int narrow(Wide w)
{
    if (w > std::numeric_limits<Int>::max() || w < std::numeric_limits<Int>::min())
        throw OverflowError("integer overflow in exact arithmetic");
    return static_cast<Int>(w);
}

Int floor_div(Int a, Int b)
{
    Int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
    return q;
}

void row_axpy(Vec& target, const Vec& src, Int q)
{
    // target -= q * src
    if (q == 0)
        return;
    for (std::size_t j = 0; j < target.size(); ++j)
        if (src[j] != 0)
            target[j] = sub_checked(target[j], mul_checked(q, src[j]));
}

// Unimodular row operations putting columns [0, ncols) into Hermite form.
// Returns the number of pivot rows.
std::size_t hermite_in_place(Mat& m, std::size_t ncols)
{
    std::size_t r = 0;
    for (std::size_t c = 0; c < ncols && r < m.size(); ++c) {
        for (;;) {
            std::size_t best = m.size();
            for (std::size_t i = r; i < m.size(); ++i) {
                if (m[i][c] == 0)
                    continue;
                if (best == m.size() || std::abs(m[i][c]) < std::abs(m[best][c]))
                    best = i;
            }
            if (best == m.size())
                break;
            std::swap(m[r], m[best]);
            bool clean = true;
            for (std::size_t i = r + 1; i < m.size(); ++i) {
                if (m[i][c] == 0)
                    continue;
                row_axpy(m[i], m[r], m[i][c] / m[r][c]);
                if (m[i][c] != 0)
                    clean = false;
            }
            if (clean)
                break;
        }
        if (m[r][c] == 0)
            continue;
        if (m[r][c] < 0)
            for (auto& x : m[r])
                x = -x;
        for (std::size_t i = 0; i < r; ++i)
            row_axpy(m[i], m[r], floor_div(m[i][c], m[r][c]));
        ++r;
    }
    return r;
}

} // namespace

Int add_checked(Int a, Int b)
{
    Int out;
    if (__builtin_add_overflow(a, b, &out))
        throw OverflowError("integer overflow in exact arithmetic");
    return out;
}

Int sub_checked(Int a, Int b)
{
    Int out;
    if (__builtin_sub_overflow(a, b, &out))
        throw OverflowError("integer overflow in exact arithmetic");
    return out;
}

Int mul_checked(Int a, Int b)
{
    Int out;
    if (__builtin_mul_overflow(a, b, &out))
        throw OverflowError("integer overflow in exact arithmetic");
    return out;
}

Int gcd(Int a, Int b)
{
    return std::gcd(a, b);
}

Int isqrt_floor(Int n)
{
    if (n < 0)
        throw std::domain_error("isqrt of negative number");
    if (n < 2)
        return n;
    Int x = n;
    Int y = (x + 1) / 2;
    while (y < x) {
        x = y;
        y = (x + n / x) / 2;
    }
    return x;
}

Mat identity(std::size_t n)
{
    Mat m = zeros(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m[i][i] = 1;
    return m;
}

Mat zeros(std::size_t rows, std::size_t cols)
{
    return Mat(rows, Vec(cols, 0));
}

Mat transpose(const Mat& a)
{
    if (a.empty())
        return {};
    Mat t = zeros(a[0].size(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j)
            t[j][i] = a[i][j];
    return t;
}

Mat multiply(const Mat& a, const Mat& b)
{
    if (a.empty())
        return {};
    const std::size_t inner = b.size();
    const std::size_t cols = b.empty() ? 0 : b[0].size();
    if (a[0].size() != inner)
        throw std::invalid_argument("matrix dimension mismatch");
    Mat c = zeros(a.size(), cols);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < inner; ++k) {
            if (a[i][k] == 0)
                continue;
            for (std::size_t j = 0; j < cols; ++j)
                if (b[k][j] != 0)
                    c[i][j] = add_checked(c[i][j], mul_checked(a[i][k], b[k][j]));
        }
    return c;
}

Vec multiply(const Mat& a, const Vec& v)
{
    Vec out(a.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != v.size())
            throw std::invalid_argument("matrix/vector dimension mismatch");
        out[i] = dot(a[i], v);
    }
    return out;
}

Mat subtract(const Mat& a, const Mat& b)
{
    Mat c = a;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j)
            c[i][j] = sub_checked(a[i][j], b[i][j]);
    return c;
}

Mat negate(const Mat& a)
{
    Mat c = a;
    for (auto& row : c)
        for (auto& x : row)
            x = -x;
    return c;
}

Int dot(const Vec& a, const Vec& b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("vector dimension mismatch");
    Int s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0 && b[i] != 0)
            s = add_checked(s, mul_checked(a[i], b[i]));
    return s;
}

Int determinant(const Mat& a)
{
    const std::size_t n = a.size();
    if (n == 0)
        return 1;
    std::vector<std::vector<Wide>> m(n, std::vector<Wide>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i].size() != n)
            throw std::invalid_argument("determinant of non-square matrix");
        for (std::size_t j = 0; j < n; ++j)
            m[i][j] = a[i][j];
    }
    int sign = 1;
    Wide prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            std::size_t p = k + 1;
            while (p < n && m[p][k] == 0)
                ++p;
            if (p == n)
                return 0;
            std::swap(m[k], m[p]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                Wide v = m[i][j] * m[k][k] - m[i][k] * m[k][j];
                m[i][j] = v / prev;
                narrow(m[i][j]);
            }
        prev = m[k][k];
    }
    return narrow(sign * m[n - 1][n - 1]);
}

std::size_t rank(const Mat& a)
{
    if (a.empty())
        return 0;
    Mat m = a;
    return hermite_in_place(m, m[0].size());
}

Mat inverse_unimodular(const Mat& a)
{
    const std::size_t n = a.size();
    Mat m(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i].size() != n)
            throw std::invalid_argument("inverse of non-square matrix");
        m[i] = a[i];
        m[i].resize(2 * n, 0);
        m[i][n + i] = 1;
    }
    if (hermite_in_place(m, n) != n)
        throw std::domain_error("matrix is singular");
    Mat inv(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (m[i][i] != 1)
            throw std::domain_error("matrix is not unimodular");
        inv[i].assign(m[i].begin() + static_cast<long>(n), m[i].end());
    }
    return inv;
}

Mat power(const Mat& a, long n)
{
    Mat base = n < 0 ? inverse_unimodular(a) : a;
    unsigned long e = n < 0 ? static_cast<unsigned long>(-n) : static_cast<unsigned long>(n);
    Mat result = identity(a.size());
    while (e > 0) {
        if (e & 1UL)
            result = multiply(result, base);
        e >>= 1;
        if (e > 0)
            base = multiply(base, base);
    }
    return result;
}

Mat kernel_basis(const Mat& a, std::size_t ncols)
{
    const std::size_t m = a.size();
    Mat aug(ncols);
    for (std::size_t j = 0; j < ncols; ++j) {
        aug[j].assign(m + ncols, 0);
        for (std::size_t i = 0; i < m; ++i)
            aug[j][i] = a[i][j];
        aug[j][m + j] = 1;
    }
    std::size_t r = hermite_in_place(aug, m);
    Mat ker;
    for (std::size_t i = r; i < ncols; ++i)
        ker.emplace_back(aug[i].begin() + static_cast<long>(m), aug[i].end());
    return hermite_rows(ker, ncols);
}

Mat hermite_rows(const Mat& rows, std::size_t ncols)
{
    Mat m = rows;
    std::size_t r = hermite_in_place(m, ncols);
    m.resize(r);
    return m;
}

bool same_row_lattice(const Mat& a, const Mat& b, std::size_t ncols)
{
    return hermite_rows(a, ncols) == hermite_rows(b, ncols);
}

std::optional<Vec> solve_in_row_lattice(const Mat& basis, const Vec& v)
{
    const std::size_t k = basis.size();
    const std::size_t n = v.size();
    Mat m(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (basis[i].size() != n)
            throw std::invalid_argument("lattice basis dimension mismatch");
        m[i] = basis[i];
        m[i].resize(n + k, 0);
        m[i][n + i] = 1;
    }
    std::size_t r = hermite_in_place(m, n);
    Vec rest = v;
    Vec coeff(k, 0);
    for (std::size_t i = 0; i < r; ++i) {
        std::size_t p = 0;
        while (m[i][p] == 0)
            ++p;
        if (rest[p] % m[i][p] != 0)
            return std::nullopt;
        Int q = rest[p] / m[i][p];
        for (std::size_t j = 0; j < n; ++j)
            rest[j] = sub_checked(rest[j], mul_checked(q, m[i][j]));
        for (std::size_t j = 0; j < k; ++j)
            coeff[j] = add_checked(coeff[j], mul_checked(q, m[i][n + j]));
    }
    for (Int x : rest)
        if (x != 0)
            return std::nullopt;
    return coeff;
}

Vec smith_invariants(const Mat& input)
{
    Mat a = input;
    const std::size_t rows = a.size();
    const std::size_t cols = rows ? a[0].size() : 0;
    Vec out;
    for (std::size_t t = 0; t < std::min(rows, cols); ++t) {
        for (;;) {
            std::size_t bi = rows, bj = cols;
            for (std::size_t i = t; i < rows; ++i)
                for (std::size_t j = t; j < cols; ++j)
                    if (a[i][j] != 0 && (bi == rows || std::abs(a[i][j]) < std::abs(a[bi][bj]))) {
                        bi = i;
                        bj = j;
                    }
            if (bi == rows)
                return out;
            std::swap(a[t], a[bi]);
            for (auto& row : a)
                std::swap(row[t], row[bj]);
            bool clean = true;
            for (std::size_t i = t + 1; i < rows; ++i) {
                if (a[i][t] == 0)
                    continue;
                row_axpy(a[i], a[t], a[i][t] / a[t][t]);
                if (a[i][t] != 0)
                    clean = false;
            }
            for (std::size_t j = t + 1; j < cols; ++j) {
                if (a[t][j] == 0)
                    continue;
                Int q = a[t][j] / a[t][t];
                for (std::size_t i = 0; i < rows; ++i)
                    a[i][j] = sub_checked(a[i][j], mul_checked(q, a[i][t]));
                if (a[t][j] != 0)
                    clean = false;
            }
            if (!clean)
                continue;
            bool divides = true;
            for (std::size_t i = t + 1; i < rows && divides; ++i)
                for (std::size_t j = t + 1; j < cols; ++j)
                    if (a[i][j] % a[t][t] != 0) {
                        for (std::size_t k = 0; k < cols; ++k)
                            a[t][k] = add_checked(a[t][k], a[i][k]);
                        divides = false;
                        break;
                    }
            if (divides)
                break;
        }
        out.push_back(std::abs(a[t][t]));
    }
    return out;
}

std::string format_vec(const Vec& v)
{
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < v.size(); ++i)
        os << (i ? ", " : "") << v[i];
    os << ']';
    return os.str();
}

std::string format_mat(const Mat& m)
{
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < m.size(); ++i)
        os << (i ? ", " : "") << format_vec(m[i]);
    os << ']';
    return os.str();
}

Rational::Rational(Int n, Int d)
{
    if (d == 0)
        throw std::domain_error("zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    Int g = std::gcd(n, d);
    n_ = g ? n / g : n;
    d_ = g ? d / g : d;
}

Rational Rational::operator+(const Rational& o) const
{
    Wide n = Wide(n_) * o.d_ + Wide(o.n_) * d_;
    Wide d = Wide(d_) * o.d_;
    Wide a = n < 0 ? -n : n;
    Wide b = d;
    while (b != 0) {
        Wide t = a % b;
        a = b;
        b = t;
    }
    if (a == 0)
        a = 1;
    return Rational(narrow(n / a), narrow(d / a));
}

Rational Rational::operator-(const Rational& o) const
{
    return *this + (-o);
}

Rational Rational::operator*(const Rational& o) const
{
    Int g1 = std::gcd(n_, o.d_);
    Int g2 = std::gcd(o.n_, d_);
    if (g1 == 0)
        g1 = 1;
    if (g2 == 0)
        g2 = 1;
    return Rational(mul_checked(n_ / g1, o.n_ / g2), mul_checked(d_ / g2, o.d_ / g1));
}

Rational Rational::operator/(const Rational& o) const
{
    if (o.n_ == 0)
        throw std::domain_error("division by zero");
    return *this * Rational(o.d_, o.n_);
}

bool Rational::operator<(const Rational& o) const
{
    return Wide(n_) * o.d_ < Wide(o.n_) * d_;
}

Int Rational::floor() const
{
    return floor_div(n_, d_);
}

Int Rational::ceil() const
{
    return -floor_div(-n_, d_);
}

} // namespace sodatlas
