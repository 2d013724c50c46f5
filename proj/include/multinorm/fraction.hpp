#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <string>

#include "multinorm/arith.hpp"
#include "multinorm/base.hpp"

namespace multinorm {

// Element of Q/Z in lowest terms with representative in [0, 1).
class QmodZ {
 public:
  QmodZ() : num_(0), den_(1) {}
  QmodZ(int64_t num, int64_t den) {
    if (den == 0) fail(ErrorCode::ZeroInput, "QmodZ: zero denominator");
    if (den < 0) { den = -den; num = -num; }
    num = mod_reduce(num, den);
    int64_t g = std::gcd(num, den);
    num_ = num / g;
    den_ = den / g;
  }

  int64_t num() const { return num_; }
  int64_t den() const { return den_; }
  bool is_zero() const { return num_ == 0; }

  QmodZ operator+(const QmodZ& o) const {
    int64_t g = std::gcd(den_, o.den_);
    int64_t l = den_ / g * o.den_;
    __int128 n = static_cast<__int128>(num_) * (o.den_ / g) +
                 static_cast<__int128>(o.num_) * (den_ / g);
    __int128 nm = n % l;
    if (nm < 0) nm += l;
    return QmodZ(static_cast<int64_t>(nm), l);
  }

  QmodZ operator-() const { return QmodZ(-num_, den_); }
  QmodZ operator-(const QmodZ& o) const { return *this + (-o); }

  QmodZ times(int64_t k) const {
    k = mod_reduce(k, den_);
    return QmodZ(mulmod(mod_reduce(num_, den_), k, den_), den_);
  }

  friend bool operator==(const QmodZ&, const QmodZ&) = default;
  friend auto operator<=>(const QmodZ& a, const QmodZ& b) {
    return static_cast<__int128>(a.num_) * b.den_ <=>
           static_cast<__int128>(b.num_) * a.den_;
  }

  std::string str() const {
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  int64_t num_, den_;
};

}  // namespace multinorm
