#pragma once

// Pointwise exterior algebra on a 3-dimensional oriented Euclidean
// orthonormal frame.
//
// Component ordering (frozen; every other module relies on it):
//   degree 0: (scalar)
//   degree 1: (1), (2), (3)
//   degree 2: (12), (13), (23)
//   degree 3: (123)
// Orientation: eps_123 = +1, so *1 = e^123, *e^1 = e^23, *e^2 = -e^13,
// *e^3 = e^12. Indices are raised and lowered with delta_ab, i.e. freely.
//
// The algebra is templated on the coefficient ring so the same code serves
// doubles (numerics), integers (exact basis tests) and symbolic expressions.

#include <array>
#include <cstddef>
#include <cmath>
#include <cstdlib>
#include <initializer_list>
#include <span>
#include <string>

#include "defectgeo/errors.hpp"

namespace defectgeo {

/// Orthonormal frame index a in {1, 2, 3}.
class FrameIndex {
public:
    constexpr explicit FrameIndex(int value) : value_(value)
    {
        if (value < 1 || value > 3) {
            throw InvalidArgument("frame index out of range: " + std::to_string(value));
        }
    }
    constexpr int value() const noexcept { return value_; }
    constexpr std::size_t offset() const noexcept { return static_cast<std::size_t>(value_ - 1); }

    friend constexpr bool operator==(FrameIndex, FrameIndex) = default;

private:
    int value_;
};

namespace detail {

// Basis multi-indices encoded as bit masks: bit k set <=> e^(k+1) present.
inline constexpr std::array<std::array<unsigned, 3>, 4> kBasisMask{{
    {0b000u, 0u, 0u},
    {0b001u, 0b010u, 0b100u},
    {0b011u, 0b101u, 0b110u},
    {0b111u, 0u, 0u},
}};

inline constexpr std::array<std::size_t, 4> kComponentCount{1, 3, 3, 1};

constexpr int popcount3(unsigned m) noexcept
{
    return static_cast<int>((m & 1u) + ((m >> 1) & 1u) + ((m >> 2) & 1u));
}

constexpr std::size_t mask_index(unsigned mask) noexcept
{
    const auto& row = kBasisMask[static_cast<std::size_t>(popcount3(mask))];
    for (std::size_t i = 0; i < 3; ++i) {
        if (row[i] == mask) return i;
    }
    return 0;
}

/// Sign of e^A ^ e^B relative to e^(A|B); 0 when A and B overlap.
constexpr int wedge_sign(unsigned a, unsigned b) noexcept
{
    if (a & b) return 0;
    int inversions = 0;
    for (int i = 0; i < 3; ++i) {
        if (!((a >> i) & 1u)) continue;
        for (int j = 0; j < i; ++j) {
            if ((b >> j) & 1u) ++inversions;
        }
    }
    return (inversions % 2) ? -1 : 1;
}

/// Sign s with *e^A = s e^(~A), fixed by e^A ^ *e^A = *1.
constexpr int hodge_sign(unsigned a) noexcept { return wedge_sign(a, (~a) & 0b111u); }

/// Sign s with iota_k e^A = s e^(A without k); 0 when k is not in A.
constexpr int interior_sign(unsigned k_bit, unsigned a) noexcept
{
    if (!(a & k_bit)) return 0;
    int before = popcount3(a & (k_bit - 1u));
    return (before % 2) ? -1 : 1;
}

template <class T>
T signed_term(int sign, const T& value)
{
    return sign > 0 ? value : -value;
}

}  // namespace detail

constexpr std::size_t component_count(int degree)
{
    if (degree < 0 || degree > 3) {
        throw DegreeOverflow("form degree out of range: " + std::to_string(degree));
    }
    return detail::kComponentCount[static_cast<std::size_t>(degree)];
}

/// A degree-p antisymmetric form at a point, components in the orthonormal
/// basis ordered as documented at the top of this header.
template <class T>
class BasicKForm {
public:
    BasicKForm() : BasicKForm(0) {}

    explicit BasicKForm(int degree) : degree_(degree)
    {
        (void)component_count(degree);
        c_.fill(T(0.0));
    }

    BasicKForm(int degree, std::initializer_list<T> values) : BasicKForm(degree)
    {
        if (values.size() != size()) {
            throw InvalidArgument("expected " + std::to_string(size()) + " components for a " +
                                  std::to_string(degree) + "-form");
        }
        std::size_t i = 0;
        for (const T& v : values) c_[i++] = v;
    }

    static BasicKForm basis(int degree, std::size_t index, T coefficient = T(1.0))
    {
        BasicKForm f(degree);
        f.c_.at(index) = coefficient;
        return f;
    }

    int degree() const noexcept { return degree_; }
    std::size_t size() const noexcept { return detail::kComponentCount[static_cast<std::size_t>(degree_)]; }

    T& operator[](std::size_t i) { return c_[i]; }
    const T& operator[](std::size_t i) const { return c_[i]; }

    std::span<const T> components() const noexcept { return {c_.data(), size()}; }

    BasicKForm& operator+=(const BasicKForm& o)
    {
        require_same_degree(o);
        for (std::size_t i = 0; i < size(); ++i) c_[i] = c_[i] + o.c_[i];
        return *this;
    }

    BasicKForm& operator-=(const BasicKForm& o)
    {
        require_same_degree(o);
        for (std::size_t i = 0; i < size(); ++i) c_[i] = c_[i] - o.c_[i];
        return *this;
    }

    BasicKForm& operator*=(const T& s)
    {
        for (std::size_t i = 0; i < size(); ++i) c_[i] = c_[i] * s;
        return *this;
    }

    friend BasicKForm operator+(BasicKForm a, const BasicKForm& b) { return a += b; }
    friend BasicKForm operator-(BasicKForm a, const BasicKForm& b) { return a -= b; }
    friend BasicKForm operator*(const T& s, BasicKForm a) { return a *= s; }
    friend BasicKForm operator*(BasicKForm a, const T& s) { return a *= s; }
    friend BasicKForm operator-(BasicKForm a)
    {
        for (std::size_t i = 0; i < a.size(); ++i) a.c_[i] = -a.c_[i];
        return a;
    }

private:
    void require_same_degree(const BasicKForm& o) const
    {
        if (o.degree_ != degree_) {
            throw DegreeMismatch("cannot add a " + std::to_string(o.degree_) + "-form to a " +
                                 std::to_string(degree_) + "-form");
        }
    }

    int degree_;
    std::array<T, 3> c_;
};

using KForm = BasicKForm<double>;

/// Exterior product. Throws DegreeOverflow when deg(a) + deg(b) > 3.
template <class T>
BasicKForm<T> wedge(const BasicKForm<T>& a, const BasicKForm<T>& b)
{
    const int p = a.degree();
    const int q = b.degree();
    if (p + q > 3) {
        throw DegreeOverflow("wedge of a " + std::to_string(p) + "-form and a " + std::to_string(q) +
                             "-form exceeds degree 3");
    }
    BasicKForm<T> out(p + q);
    const auto& ma = detail::kBasisMask[static_cast<std::size_t>(p)];
    const auto& mb = detail::kBasisMask[static_cast<std::size_t>(q)];
    // Accumulate per output slot so each symbolic component is one sum.
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            const int s = detail::wedge_sign(ma[i], mb[j]);
            if (s == 0) continue;
            const std::size_t k = detail::mask_index(ma[i] | mb[j]);
            out[k] = out[k] + detail::signed_term(s, a[i] * b[j]);
        }
    }
    return out;
}

/// Euclidean Hodge dual, p -> 3 - p. ** is the identity in this signature.
template <class T>
BasicKForm<T> hodge(const BasicKForm<T>& a)
{
    const int p = a.degree();
    BasicKForm<T> out(3 - p);
    const auto& ma = detail::kBasisMask[static_cast<std::size_t>(p)];
    for (std::size_t i = 0; i < a.size(); ++i) {
        const unsigned comp = (~ma[i]) & 0b111u;
        out[detail::mask_index(comp)] = detail::signed_term(detail::hodge_sign(ma[i]), a[i]);
    }
    return out;
}

/// Contraction with the a-th orthonormal frame vector. A 0-form maps to the
/// zero 0-form.
template <class T>
BasicKForm<T> interior(FrameIndex index, const BasicKForm<T>& a)
{
    const int p = a.degree();
    if (p == 0) return BasicKForm<T>(0);
    BasicKForm<T> out(p - 1);
    const unsigned k = 1u << index.offset();
    const auto& ma = detail::kBasisMask[static_cast<std::size_t>(p)];
    for (std::size_t i = 0; i < a.size(); ++i) {
        const int s = detail::interior_sign(k, ma[i]);
        if (s == 0) continue;
        const std::size_t j = detail::mask_index(ma[i] & ~k);
        out[j] = out[j] + detail::signed_term(s, a[i]);
    }
    return out;
}

/// The orthonormal basis 1-form e^a.
template <class T = double>
BasicKForm<T> basis_one_form(FrameIndex index)
{
    return BasicKForm<T>::basis(1, index.offset());
}

/// Volume form *1 = e^123.
template <class T = double>
BasicKForm<T> volume_form()
{
    return BasicKForm<T>::basis(3, 0);
}

inline double max_abs(const KForm& f)
{
    double m = 0.0;
    for (double v : f.components()) m = std::abs(v) > m ? std::abs(v) : m;
    return m;
}

}  // namespace defectgeo
