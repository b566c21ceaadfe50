// SPDX-License-Identifier: Apache-2.0

#include "polydiff/types.hpp"

#include <sstream>

#include "polydiff/errors.hpp"

namespace polydiff {

namespace {

boost::multiprecision::cpp_int int_from_string(const std::string& s) {
  if (s.empty()) throw Error(ErrorKind::Parse, "empty integer literal");
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) throw Error(ErrorKind::Parse, "bad integer literal '" + s + "'");
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9')
      throw Error(ErrorKind::Parse, "bad integer literal '" + s + "'");
  }
  return boost::multiprecision::cpp_int(s);
}

}  // namespace

Rat rat_from_string(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) return Rat(int_from_string(s));
  const auto num = int_from_string(s.substr(0, slash));
  const auto den = int_from_string(s.substr(slash + 1));
  if (den == 0) throw Error(ErrorKind::Parse, "zero denominator in '" + s + "'");
  return Rat(num, den);
}

std::string rat_to_string(const Rat& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

Vec to_vec(const VecQ& q) {
  Vec v(static_cast<Eigen::Index>(q.size()));
  for (std::size_t i = 0; i < q.size(); ++i) v[static_cast<Eigen::Index>(i)] = to_double(q[i]);
  return v;
}

VecQ to_vecq(const Vec& v) {
  VecQ q(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) q[static_cast<std::size_t>(i)] = rat_from_double(v[i]);
  return q;
}

Rat dot(const VecQ& a, const VecQ& b) {
  Rat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace polydiff
