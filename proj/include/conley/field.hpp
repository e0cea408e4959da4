// Prime field arithmetic GF(p) for chain coefficients.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace conley {

/// Raised for every contract violation inside the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Coefficient = std::uint32_t;

inline constexpr std::uint32_t max_modulus = 1u << 16;

inline bool is_prime(std::uint32_t n) {
    if (n < 2) return false;
    for (std::uint32_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

/// The field Z/pZ with a runtime modulus. All chain arithmetic goes through
/// one of these; operands are assumed already reduced into [0, p).
class PrimeField {
public:
    explicit PrimeField(std::uint32_t p = 2) : p_(p) {
        if (p > max_modulus || !is_prime(p))
            throw Error("field modulus must be a prime <= 65536, got " + std::to_string(p));
    }

    std::uint32_t modulus() const { return p_; }

    Coefficient reduce(std::int64_t v) const {
        std::int64_t r = v % static_cast<std::int64_t>(p_);
        return static_cast<Coefficient>(r < 0 ? r + p_ : r);
    }
    Coefficient add(Coefficient a, Coefficient b) const {
        Coefficient s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    Coefficient sub(Coefficient a, Coefficient b) const { return a >= b ? a - b : a + p_ - b; }
    Coefficient neg(Coefficient a) const { return a == 0 ? 0 : p_ - a; }
    Coefficient mul(Coefficient a, Coefficient b) const {
        return static_cast<Coefficient>((static_cast<std::uint64_t>(a) * b) % p_);
    }
    Coefficient inv(Coefficient a) const {
        if (a % p_ == 0) throw Error("zero has no multiplicative inverse");
        // extended Euclid on (a, p)
        std::int64_t t = 0, new_t = 1, r = p_, new_r = a;
        while (new_r != 0) {
            std::int64_t q = r / new_r;
            std::int64_t tmp = t - q * new_t;
            t = new_t;
            new_t = tmp;
            tmp = r - q * new_r;
            r = new_r;
            new_r = tmp;
        }
        return reduce(t);
    }
    Coefficient div(Coefficient a, Coefficient b) const { return mul(a, inv(b)); }

    friend bool operator==(const PrimeField&, const PrimeField&) = default;

private:
    std::uint32_t p_;
};

/// A residue together with its modulus; the checked value type for callers
/// that mix fields. Hot loops use PrimeField on raw Coefficients instead.
class FieldElement {
public:
    FieldElement(std::int64_t value, std::uint32_t modulus)
        : field_(modulus), value_(field_.reduce(value)) {}
    FieldElement(std::int64_t value, PrimeField field) : field_(field), value_(field_.reduce(value)) {}

    Coefficient value() const { return value_; }
    std::uint32_t modulus() const { return field_.modulus(); }
    const PrimeField& field() const { return field_; }
    bool is_zero() const { return value_ == 0; }

    FieldElement inverse() const { return {field_.inv(value_), field_}; }

    friend FieldElement operator+(const FieldElement& a, const FieldElement& b) {
        check_same(a, b);
        return {a.field_.add(a.value_, b.value_), a.field_};
    }
    friend FieldElement operator-(const FieldElement& a, const FieldElement& b) {
        check_same(a, b);
        return {a.field_.sub(a.value_, b.value_), a.field_};
    }
    friend FieldElement operator*(const FieldElement& a, const FieldElement& b) {
        check_same(a, b);
        return {a.field_.mul(a.value_, b.value_), a.field_};
    }
    friend FieldElement operator/(const FieldElement& a, const FieldElement& b) {
        check_same(a, b);
        return {a.field_.div(a.value_, b.value_), a.field_};
    }
    FieldElement operator-() const { return {field_.neg(value_), field_}; }

    friend bool operator==(const FieldElement& a, const FieldElement& b) {
        return a.modulus() == b.modulus() && a.value_ == b.value_;
    }

private:
    static void check_same(const FieldElement& a, const FieldElement& b) {
        if (a.modulus() != b.modulus())
            throw Error("field modulus mismatch: " + std::to_string(a.modulus()) + " vs " +
                        std::to_string(b.modulus()));
    }

    PrimeField field_;
    Coefficient value_;
};

inline FieldElement add(const FieldElement& a, const FieldElement& b) { return a + b; }
inline FieldElement inverse(const FieldElement& a) { return a.inverse(); }

}  // namespace conley
