#include "idvoi/rational.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace idvoi {

namespace {
constexpr std::uint64_t kBase = 1ull << 32;
}

BigInt::BigInt(long long v) {
    if (v == 0) return;
    sign_ = v < 0 ? -1 : 1;
    unsigned long long u = v < 0 ? -static_cast<unsigned long long>(v) : static_cast<unsigned long long>(v);
    while (u != 0) {
        mag_.push_back(static_cast<std::uint32_t>(u & 0xffffffffu));
        u >>= 32;
    }
}

void BigInt::trim() {
    while (!mag_.empty() && mag_.back() == 0) mag_.pop_back();
    if (mag_.empty()) sign_ = 0;
}

int BigInt::cmp_mag(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (std::size_t i = a.size(); i-- > 0;) {
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    }
    return 0;
}

std::vector<std::uint32_t> BigInt::add_mag(const std::vector<std::uint32_t>& a,
                                           const std::vector<std::uint32_t>& b) {
    const auto& longer = a.size() >= b.size() ? a : b;
    const auto& shorter = a.size() >= b.size() ? b : a;
    std::vector<std::uint32_t> out;
    out.reserve(longer.size() + 1);
    std::uint64_t carry = 0;
    for (std::size_t i = 0; i < longer.size(); ++i) {
        std::uint64_t s = carry + longer[i] + (i < shorter.size() ? shorter[i] : 0);
        out.push_back(static_cast<std::uint32_t>(s & 0xffffffffu));
        carry = s >> 32;
    }
    if (carry) out.push_back(static_cast<std::uint32_t>(carry));
    return out;
}

// Requires a >= b.
std::vector<std::uint32_t> BigInt::sub_mag(const std::vector<std::uint32_t>& a,
                                           const std::vector<std::uint32_t>& b) {
    std::vector<std::uint32_t> out;
    out.reserve(a.size());
    std::int64_t borrow = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::int64_t d = static_cast<std::int64_t>(a[i]) - borrow - (i < b.size() ? b[i] : 0);
        if (d < 0) {
            d += static_cast<std::int64_t>(kBase);
            borrow = 1;
        } else {
            borrow = 0;
        }
        out.push_back(static_cast<std::uint32_t>(d));
    }
    while (!out.empty() && out.back() == 0) out.pop_back();
    return out;
}

std::vector<std::uint32_t> BigInt::mul_mag(const std::vector<std::uint32_t>& a,
                                           const std::vector<std::uint32_t>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<std::uint32_t> out(a.size() + b.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::uint64_t carry = 0;
        for (std::size_t j = 0; j < b.size(); ++j) {
            std::uint64_t cur = out[i + j] + static_cast<std::uint64_t>(a[i]) * b[j] + carry;
            out[i + j] = static_cast<std::uint32_t>(cur & 0xffffffffu);
            carry = cur >> 32;
        }
        std::size_t k = i + b.size();
        while (carry) {
            std::uint64_t cur = out[k] + carry;
            out[k] = static_cast<std::uint32_t>(cur & 0xffffffffu);
            carry = cur >> 32;
            ++k;
        }
    }
    while (!out.empty() && out.back() == 0) out.pop_back();
    return out;
}

// Knuth-style long division on magnitudes; quotient and remainder out-params.
void BigInt::divmod_mag(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b,
                        std::vector<std::uint32_t>& q, std::vector<std::uint32_t>& r) {
    if (b.empty()) throw std::domain_error("BigInt: division by zero");
    q.clear();
    r.clear();
    if (cmp_mag(a, b) < 0) {
        r = a;
        return;
    }
    if (b.size() == 1) {
        std::uint64_t d = b[0], rem = 0;
        q.assign(a.size(), 0);
        for (std::size_t i = a.size(); i-- > 0;) {
            std::uint64_t cur = (rem << 32) | a[i];
            q[i] = static_cast<std::uint32_t>(cur / d);
            rem = cur % d;
        }
        while (!q.empty() && q.back() == 0) q.pop_back();
        if (rem) r.push_back(static_cast<std::uint32_t>(rem));
        return;
    }
    // Normalize so the divisor's top limb has its high bit set.
    int shift = 0;
    for (std::uint32_t top = b.back(); !(top & 0x80000000u); top <<= 1) ++shift;
    auto shl = [&](const std::vector<std::uint32_t>& v) {
        std::vector<std::uint32_t> out(v.size() + 1, 0);
        for (std::size_t i = 0; i < v.size(); ++i) {
            out[i] |= static_cast<std::uint32_t>((static_cast<std::uint64_t>(v[i]) << shift) & 0xffffffffu);
            out[i + 1] = static_cast<std::uint32_t>((static_cast<std::uint64_t>(v[i]) << shift) >> 32);
        }
        while (!out.empty() && out.back() == 0) out.pop_back();
        return out;
    };
    std::vector<std::uint32_t> u = shift ? shl(a) : a;
    std::vector<std::uint32_t> v = shift ? shl(b) : b;
    const std::size_t n = v.size();
    const std::size_t m = u.size() - n;
    u.resize(u.size() + 1, 0);
    q.assign(m + 1, 0);
    const std::uint64_t vtop = v[n - 1];
    const std::uint64_t vnext = v[n - 2];
    for (std::size_t j = m + 1; j-- > 0;) {
        std::uint64_t num = (static_cast<std::uint64_t>(u[j + n]) << 32) | u[j + n - 1];
        std::uint64_t qhat = num / vtop;
        std::uint64_t rhat = num % vtop;
        if (qhat >= kBase) {
            qhat = kBase - 1;
            rhat = num - qhat * vtop;
        }
        while (rhat < kBase && qhat * vnext > ((rhat << 32) | u[j + n - 2])) {
            --qhat;
            rhat += vtop;
        }
        // u[j..j+n] -= qhat * v
        std::int64_t borrow = 0;
        std::uint64_t carry = 0;
        for (std::size_t i = 0; i < n; ++i) {
            std::uint64_t p = qhat * v[i] + carry;
            carry = p >> 32;
            std::int64_t d = static_cast<std::int64_t>(u[j + i]) - borrow - static_cast<std::int64_t>(p & 0xffffffffu);
            if (d < 0) {
                d += static_cast<std::int64_t>(kBase);
                borrow = 1;
            } else {
                borrow = 0;
            }
            u[j + i] = static_cast<std::uint32_t>(d);
        }
        std::int64_t d = static_cast<std::int64_t>(u[j + n]) - borrow - static_cast<std::int64_t>(carry);
        if (d < 0) {
            // qhat was one too large: add v back.
            d += static_cast<std::int64_t>(kBase);
            --qhat;
            std::uint64_t c2 = 0;
            for (std::size_t i = 0; i < n; ++i) {
                std::uint64_t s = c2 + u[j + i] + v[i];
                u[j + i] = static_cast<std::uint32_t>(s & 0xffffffffu);
                c2 = s >> 32;
            }
            d += static_cast<std::int64_t>(c2);
            d &= static_cast<std::int64_t>(0xffffffffu);
        }
        u[j + n] = static_cast<std::uint32_t>(d);
        q[j] = static_cast<std::uint32_t>(qhat);
    }
    while (!q.empty() && q.back() == 0) q.pop_back();
    u.resize(n);
    // Undo normalization of the remainder.
    if (shift) {
        std::uint32_t carry = 0;
        for (std::size_t i = u.size(); i-- > 0;) {
            std::uint32_t cur = u[i];
            u[i] = (cur >> shift) | carry;
            carry = static_cast<std::uint32_t>((static_cast<std::uint64_t>(cur) << (32 - shift)) & 0xffffffffu);
        }
    }
    while (!u.empty() && u.back() == 0) u.pop_back();
    r = u;
}

BigInt operator+(const BigInt& a, const BigInt& b) {
    if (a.sign_ == 0) return b;
    if (b.sign_ == 0) return a;
    BigInt out;
    if (a.sign_ == b.sign_) {
        out.sign_ = a.sign_;
        out.mag_ = BigInt::add_mag(a.mag_, b.mag_);
    } else {
        int c = BigInt::cmp_mag(a.mag_, b.mag_);
        if (c == 0) return BigInt();
        if (c > 0) {
            out.sign_ = a.sign_;
            out.mag_ = BigInt::sub_mag(a.mag_, b.mag_);
        } else {
            out.sign_ = b.sign_;
            out.mag_ = BigInt::sub_mag(b.mag_, a.mag_);
        }
    }
    return out;
}

BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

BigInt operator*(const BigInt& a, const BigInt& b) {
    BigInt out;
    if (a.sign_ == 0 || b.sign_ == 0) return out;
    out.sign_ = a.sign_ * b.sign_;
    out.mag_ = BigInt::mul_mag(a.mag_, b.mag_);
    return out;
}

void BigInt::divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
    std::vector<std::uint32_t> qm, rm;
    divmod_mag(a.mag_, b.mag_, qm, rm);
    q = BigInt();
    r = BigInt();
    q.mag_ = std::move(qm);
    r.mag_ = std::move(rm);
    q.sign_ = q.mag_.empty() ? 0 : a.sign_ * b.sign_;
    r.sign_ = r.mag_.empty() ? 0 : a.sign_;
}

BigInt operator/(const BigInt& a, const BigInt& b) {
    BigInt q, r;
    BigInt::divmod(a, b, q, r);
    return q;
}

BigInt operator%(const BigInt& a, const BigInt& b) {
    BigInt q, r;
    BigInt::divmod(a, b, q, r);
    return r;
}

bool operator==(const BigInt& a, const BigInt& b) { return a.sign_ == b.sign_ && a.mag_ == b.mag_; }

bool operator<(const BigInt& a, const BigInt& b) {
    if (a.sign_ != b.sign_) return a.sign_ < b.sign_;
    int c = BigInt::cmp_mag(a.mag_, b.mag_);
    return a.sign_ >= 0 ? c < 0 : c > 0;
}

BigInt BigInt::operator-() const {
    BigInt out = *this;
    out.sign_ = -out.sign_;
    return out;
}

BigInt BigInt::abs() const {
    BigInt out = *this;
    if (out.sign_ < 0) out.sign_ = 1;
    return out;
}

BigInt BigInt::gcd(BigInt a, BigInt b) {
    a = a.abs();
    b = b.abs();
    while (!b.is_zero()) {
        BigInt q, r;
        divmod(a, b, q, r);
        a = b;
        b = r.abs();
    }
    return a.is_zero() ? BigInt(0) : a;
}

bool BigInt::fits_int64() const {
    if (mag_.size() > 2) return false;
    if (mag_.size() < 2) return true;
    std::uint64_t v = (static_cast<std::uint64_t>(mag_[1]) << 32) | mag_[0];
    if (sign_ > 0) return v <= static_cast<std::uint64_t>(INT64_MAX);
    return v <= static_cast<std::uint64_t>(INT64_MAX) + 1;
}

std::int64_t BigInt::to_int64() const {
    if (!fits_int64()) throw std::overflow_error("BigInt: value does not fit in int64");
    std::uint64_t v = 0;
    if (mag_.size() >= 1) v |= mag_[0];
    if (mag_.size() >= 2) v |= static_cast<std::uint64_t>(mag_[1]) << 32;
    return sign_ < 0 ? -static_cast<std::int64_t>(v) : static_cast<std::int64_t>(v);
}

double BigInt::to_double() const {
    double out = 0;
    for (std::size_t i = mag_.size(); i-- > 0;) out = out * 4294967296.0 + mag_[i];
    return sign_ < 0 ? -out : out;
}

BigInt BigInt::from_string(std::string_view s) {
    BigInt out;
    bool neg = false;
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        neg = s[i] == '-';
        ++i;
    }
    if (i == s.size()) throw std::invalid_argument("BigInt: empty numeral");
    BigInt ten(10);
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("BigInt: bad digit in numeral");
        out = out * ten + BigInt(s[i] - '0');
    }
    if (neg) out = -out;
    return out;
}

std::string BigInt::to_string() const {
    if (sign_ == 0) return "0";
    std::vector<std::uint32_t> chunks;  // base 1e9, little-endian
    BigInt cur = abs();
    BigInt billion(1000000000);
    while (!cur.is_zero()) {
        BigInt q, r;
        divmod(cur, billion, q, r);
        chunks.push_back(r.mag_.empty() ? 0u : r.mag_[0]);
        cur = q;
    }
    std::string out = sign_ < 0 ? "-" : "";
    out += std::to_string(chunks.back());
    for (std::size_t i = chunks.size() - 1; i-- > 0;) {
        std::string part = std::to_string(chunks[i]);
        out += std::string(9 - part.size(), '0') + part;
    }
    return out;
}

Rational::Rational(long long num, long long den) : num_(num), den_(den) { normalize(); }

Rational::Rational(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) { normalize(); }

void Rational::normalize() {
    if (den_.is_zero()) throw std::domain_error("Rational: zero denominator");
    if (num_.is_zero()) {
        den_ = BigInt(1);
        return;
    }
    if (den_.sign() < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    BigInt g = BigInt::gcd(num_, den_);
    if (!(g == BigInt(1))) {
        num_ = num_ / g;
        den_ = den_ / g;
    }
}

Rational operator+(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.num_, a.den_ * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero()) throw std::domain_error("Rational: division by zero");
    return Rational(a.num_ * b.den_, a.den_ * b.num_);
}

Rational Rational::operator-() const {
    Rational out = *this;
    out.num_ = -out.num_;
    return out;
}

bool operator==(const Rational& a, const Rational& b) { return a.num_ == b.num_ && a.den_ == b.den_; }

bool operator<(const Rational& a, const Rational& b) { return a.num_ * b.den_ < b.num_ * a.den_; }

Rational Rational::parse(std::string_view s) {
    auto slash = s.find('/');
    if (slash == std::string_view::npos) return Rational(BigInt::from_string(s), BigInt(1));
    return Rational(BigInt::from_string(s.substr(0, slash)), BigInt::from_string(s.substr(slash + 1)));
}

std::string Rational::str() const {
    if (den_ == BigInt(1)) return num_.to_string();
    return num_.to_string() + "/" + den_.to_string();
}

double Rational::to_double() const { return num_.to_double() / den_.to_double(); }

}  // namespace idvoi
