#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace blowup {

/// A real number or an explicitly signed infinity. Used for limits such as
/// lim U(xi)/log(xi) and for "every p > 1" exponent outcomes, where a
/// sentinel float would hide a distinct regime.
class ExtendedReal {
public:
    enum class Kind { finite, plus_infinity, minus_infinity };

    constexpr ExtendedReal() = default;
    constexpr ExtendedReal(double v) : value_(v) {}  // NOLINT(google-explicit-constructor)

    static constexpr ExtendedReal plus_infinity() { return ExtendedReal(Kind::plus_infinity); }
    static constexpr ExtendedReal minus_infinity() { return ExtendedReal(Kind::minus_infinity); }

    constexpr Kind kind() const { return kind_; }
    constexpr bool is_finite() const { return kind_ == Kind::finite; }
    constexpr bool is_plus_infinity() const { return kind_ == Kind::plus_infinity; }
    constexpr bool is_minus_infinity() const { return kind_ == Kind::minus_infinity; }

    double value() const {
        if (!is_finite())
            throw std::logic_error("ExtendedReal::value() on an infinite quantity");
        return value_;
    }

    /// Finite value, or +-HUGE_VAL for infinities; for arithmetic that is
    /// explicitly allowed to saturate.
    double saturated() const {
        switch (kind_) {
        case Kind::plus_infinity: return HUGE_VAL;
        case Kind::minus_infinity: return -HUGE_VAL;
        default: return value_;
        }
    }

    std::string to_string() const {
        switch (kind_) {
        case Kind::plus_infinity: return "+inf";
        case Kind::minus_infinity: return "-inf";
        default: break;
        }
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", value_);
        return buf;
    }

    friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
        return a.kind_ == b.kind_ && (!a.is_finite() || a.value_ == b.value_);
    }

    friend std::ostream& operator<<(std::ostream& os, const ExtendedReal& x) { return os << x.to_string(); }

private:
    constexpr explicit ExtendedReal(Kind k) : kind_(k) {}

    Kind kind_ = Kind::finite;
    double value_ = 0.0;
};

}  // namespace blowup
