#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sodatlas {

using Int = std::int64_t;
using Vec = std::vector<Int>;
using Mat = std::vector<Vec>; // row-major

struct OverflowError : std::overflow_error {
    using std::overflow_error::overflow_error;
};

Int add_checked(Int a, Int b);
Int sub_checked(Int a, Int b);
Int mul_checked(Int a, Int b);
Int gcd(Int a, Int b);
Int isqrt_floor(Int n);

Mat identity(std::size_t n);
Mat zeros(std::size_t rows, std::size_t cols);
Mat transpose(const Mat& a);
Mat multiply(const Mat& a, const Mat& b);
Vec multiply(const Mat& a, const Vec& v);
Mat subtract(const Mat& a, const Mat& b);
Mat negate(const Mat& a);
Int dot(const Vec& a, const Vec& b);

// Bareiss fraction-free determinant.
Int determinant(const Mat& a);
std::size_t rank(const Mat& a);

// Inverse of a matrix with determinant +-1. Throws std::domain_error otherwise.
Mat inverse_unimodular(const Mat& a);
// a^n for square a; negative n needs a unimodular.
Mat power(const Mat& a, long n);

// Rows spanning {x : a x = 0} over the integers (a saturated basis), in Hermite form.
Mat kernel_basis(const Mat& a, std::size_t ncols);
// Canonical Hermite normal form of the row lattice, zero rows removed.
Mat hermite_rows(const Mat& rows, std::size_t ncols);
bool same_row_lattice(const Mat& a, const Mat& b, std::size_t ncols);
// Integer coefficients c with sum_i c_i * basis_i == v, if they exist.
std::optional<Vec> solve_in_row_lattice(const Mat& basis, const Vec& v);

// Diagonal of the Smith normal form (nonzero entries only, positive, dividing chain).
Vec smith_invariants(const Mat& a);

std::string format_vec(const Vec& v);
std::string format_mat(const Mat& m);

// Exact rationals for the enumeration bounds.
class Rational {
public:
    Rational(Int n = 0, Int d = 1);
    Int num() const { return n_; }
    Int den() const { return d_; }
    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    Rational operator/(const Rational& o) const;
    Rational operator-() const { return Rational(-n_, d_); }
    bool operator<(const Rational& o) const;
    bool operator<=(const Rational& o) const { return !(o < *this); }
    bool operator==(const Rational& o) const { return n_ == o.n_ && d_ == o.d_; }
    bool is_zero() const { return n_ == 0; }
    Int floor() const;
    Int ceil() const;

private:
    Int n_;
    Int d_;
};

} // namespace sodatlas
