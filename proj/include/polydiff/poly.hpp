// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <vector>

#include "polydiff/types.hpp"

namespace polydiff {

// Sparse multivariate polynomial. T is double for the dynamics and Rat for
// the exact per-face identity checks (double coefficients lift exactly to
// dyadic rationals, so the symbolic route has no rounding of its own).
template <class T>
class Polynomial {
 public:
  using Terms = std::map<std::vector<int>, T>;

  Polynomial() = default;
  explicit Polynomial(int nvars) : nvars_(nvars) {}

  static Polynomial constant(int nvars, const T& c) {
    Polynomial p(nvars);
    p.add_term(std::vector<int>(nvars, 0), c);
    return p;
  }
  static Polynomial variable(int nvars, int i) {
    Polynomial p(nvars);
    std::vector<int> e(nvars, 0);
    e[i] = 1;
    p.add_term(std::move(e), T(1));
    return p;
  }

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  const Terms& terms() const { return terms_; }

  int degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_) {
      int s = 0;
      for (int k : e) s += k;
      d = std::max(d, s);
    }
    return d;
  }

  void add_term(std::vector<int> exp, const T& c) {
    if (c == T(0)) return;
    auto it = terms_.find(exp);
    if (it == terms_.end()) {
      terms_.emplace(std::move(exp), c);
    } else {
      it->second += c;
      if (it->second == T(0)) terms_.erase(it);
    }
  }

  template <class X>
  X eval_at(const std::vector<X>& x) const {
    X total(0);
    for (const auto& [e, c] : terms_) {
      X term(c);
      for (int k = 0; k < nvars_; ++k)
        for (int p = 0; p < e[k]; ++p) term *= x[k];
      total += term;
    }
    return total;
  }

  T eval(const Vec& x) const {
    T total(0);
    for (const auto& [e, c] : terms_) {
      T term = c;
      for (int k = 0; k < nvars_; ++k)
        for (int p = 0; p < e[k]; ++p) term *= static_cast<T>(x[k]);
      total += term;
    }
    return total;
  }

  Polynomial partial(int var) const {
    Polynomial out(nvars_);
    for (const auto& [e, c] : terms_) {
      if (e[var] == 0) continue;
      std::vector<int> d = e;
      d[var] -= 1;
      out.add_term(std::move(d), c * T(e[var]));
    }
    return out;
  }

  Polynomial operator+(const Polynomial& o) const {
    Polynomial out = *this;
    for (const auto& [e, c] : o.terms_) out.add_term(e, c);
    return out;
  }

  Polynomial operator*(const Polynomial& o) const {
    Polynomial out(nvars_);
    for (const auto& [ea, ca] : terms_) {
      for (const auto& [eb, cb] : o.terms_) {
        std::vector<int> e(nvars_);
        for (int k = 0; k < nvars_; ++k) e[k] = ea[k] + eb[k];
        out.add_term(std::move(e), ca * cb);
      }
    }
    return out;
  }

  Polynomial scaled(const T& s) const {
    Polynomial out(nvars_);
    for (const auto& [e, c] : terms_) out.add_term(e, c * s);
    return out;
  }

  // Composition x_k -> repl[k]; all repl share a variable space.
  Polynomial substitute(const std::vector<Polynomial>& repl) const {
    const int out_vars = repl.empty() ? 0 : repl[0].nvars();
    Polynomial out(out_vars);
    for (const auto& [e, c] : terms_) {
      Polynomial term = Polynomial::constant(out_vars, c);
      for (int k = 0; k < nvars_; ++k)
        for (int p = 0; p < e[k]; ++p) term = term * repl[k];
      out = out + term;
    }
    return out;
  }

 private:
  int nvars_ = 0;
  Terms terms_;
};

using PolyD = Polynomial<double>;
using PolyQ = Polynomial<Rat>;

// Exact lift of double coefficients to rationals.
inline PolyQ lift_exact(const PolyD& p) {
  PolyQ out(p.nvars());
  for (const auto& [e, c] : p.terms()) out.add_term(e, rat_from_double(c));
  return out;
}

}  // namespace polydiff
