#pragma once
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <complex>
#include <cstdint>
#include <sstream>
#include <string>

namespace rw {

using complexd = std::complex<double>;
using bigrat = boost::multiprecision::cpp_rational;

// Complex numbers over exact rationals. std::complex requires a
// floating-point value type, so exact mode uses this stand-in.
struct ratc {
  bigrat re, im;
  ratc() : re(0), im(0) {}
  ratc(int v) : re(v), im(0) {}
  ratc(const bigrat& r) : re(r), im(0) {}
  ratc(bigrat r, bigrat i) : re(std::move(r)), im(std::move(i)) {}

  ratc& operator+=(const ratc& o) { re += o.re; im += o.im; return *this; }
  ratc& operator-=(const ratc& o) { re -= o.re; im -= o.im; return *this; }
  ratc& operator*=(const ratc& o) {
    bigrat r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(r);
    return *this;
  }
  ratc& operator/=(const ratc& o) {
    bigrat d = o.re * o.re + o.im * o.im;
    bigrat r = (re * o.re + im * o.im) / d;
    im = (im * o.re - re * o.im) / d;
    re = std::move(r);
    return *this;
  }
  friend ratc operator+(ratc a, const ratc& b) { return a += b; }
  friend ratc operator-(ratc a, const ratc& b) { return a -= b; }
  friend ratc operator*(ratc a, const ratc& b) { return a *= b; }
  friend ratc operator/(ratc a, const ratc& b) { return a /= b; }
  friend ratc operator-(const ratc& a) { return ratc(-a.re, -a.im); }
  friend bool operator==(const ratc& a, const ratc& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const ratc& a, const ratc& b) { return !(a == b); }
};

template <class S>
struct scalar;

template <>
struct scalar<complexd> {
  static constexpr bool exact = false;
  static complexd from_ratio(long long num, long long den) {
    return complexd(double(num) / double(den), 0.0);
  }
  static complexd from_parts(double re, double im) { return complexd(re, im); }
  static double mag(const complexd& v) { return std::abs(v.real()) + std::abs(v.imag()); }
  static bool is_zero(const complexd& v, double tol) { return mag(v) <= tol; }
  static std::string str(const complexd& v) {
    std::ostringstream os;
    os.precision(17);
    os << v.real() << (v.imag() < 0 ? "-" : "+") << std::abs(v.imag()) << "i";
    return os.str();
  }
  static std::string json_re(const complexd& v) {
    std::ostringstream os;
    os.precision(17);
    os << v.real();
    return os.str();
  }
  static std::string json_im(const complexd& v) {
    std::ostringstream os;
    os.precision(17);
    os << v.imag();
    return os.str();
  }
};

template <>
struct scalar<ratc> {
  static constexpr bool exact = true;
  static ratc from_ratio(long long num, long long den) {
    return ratc(bigrat(num) / bigrat(den));
  }
  static ratc from_parts(double re, double im) {
    // exact conversion of doubles that are themselves dyadic rationals
    return ratc(dyadic(re), dyadic(im));
  }
  static double mag(const ratc& v) {
    return std::abs(v.re.convert_to<double>()) + std::abs(v.im.convert_to<double>());
  }
  static bool is_zero(const ratc& v, double) { return v.re == 0 && v.im == 0; }
  static std::string str(const ratc& v) {
    std::ostringstream os;
    os << v.re << (v.im < 0 ? "-" : "+");
    bigrat a = v.im < 0 ? bigrat(-v.im) : v.im;
    os << a << "i";
    return os.str();
  }
  static std::string json_re(const ratc& v) {
    std::ostringstream os;
    os << '"' << v.re << '"';
    return os.str();
  }
  static std::string json_im(const ratc& v) {
    std::ostringstream os;
    os << '"' << v.im << '"';
    return os.str();
  }

 private:
  static bigrat dyadic(double x) {
    bigrat r = 0;
    bigrat p = 1;
    // decompose x = m * 2^e exactly
    int e = 0;
    double m = std::frexp(x, &e);
    long long mi = (long long)std::ldexp(m, 53);
    e -= 53;
    r = mi;
    if (e >= 0)
      for (int i = 0; i < e; ++i) r *= 2;
    else
      for (int i = 0; i < -e; ++i) r /= 2;
    (void)p;
    return r;
  }
};

}  // namespace rw
