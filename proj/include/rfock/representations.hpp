#pragma once

// Holonomy and translation operators on cylinder functions, in the Haar
// representation and in the r-Fock representation over a fixed hoop family.
//
// Translation convention (both representations):
//   (V(lambda) psi)(theta) = sqrt(rho(theta)) psi(theta + c),
//   rho = d(mu shifted by -c)/d(mu),
// where c is the angle shift of lambda. This V is unitary and satisfies
//   V(lambda) Pi(T_a) = e^{i c_a(lambda)} Pi(T_a) V(lambda),
//   [dV(lambda), Pi(T_a)] = c_a(lambda) Pi(T_a)
// with dV the generator of V(t lambda) = exp(i t dV(lambda)).

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <map>
#include <variant>
#include <vector>

#include "rfock/covariance.hpp"
#include "rfock/cylindrical.hpp"
#include "rfock/geometry.hpp"
#include "rfock/parallel.hpp"
#include "rfock/rng.hpp"

namespace rfock {

using Complex = std::complex<double>;

/// psi = sum_h c_h Psi_h with Psi_h(A) = A(h).
class CylinderFunction {
 public:
  using Terms = std::map<Hoop, Complex>;

  CylinderFunction() = default;

  static CylinderFunction basis(const Hoop& h, Complex coefficient = 1.0) {
    CylinderFunction f;
    f.add(h, coefficient);
    return f;
  }

  /// The constant function 1 = Psi_identity.
  static CylinderFunction one() { return basis(Hoop::identity()); }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  CylinderFunction& add(const Hoop& h, Complex c) {
    if (c == Complex(0.0)) return *this;
    auto [it, inserted] = terms_.try_emplace(h, c);
    if (!inserted) {
      it->second += c;
      if (it->second == Complex(0.0)) terms_.erase(it);
    }
    return *this;
  }

 private:
  Terms terms_;
};

inline CylinderFunction apply_holonomy(const CylinderFunction& psi, const Hoop& alpha) {
  CylinderFunction out;
  for (const auto& [h, c] : psi.terms()) out.add(hoop_compose(alpha, h), c);
  return out;
}

/// Haar translation V_0(lambda): Psi_h picks up e^{i \oint_h lambda}.
inline CylinderFunction apply_haar_translation(const CylinderFunction& psi, const TestField& lambda,
                                               Mollifier conv = Mollifier::PaperLiteral,
                                               double tol = kDefaultTol) {
  CylinderFunction out;
  for (const auto& [h, c] : psi.terms())
    out.add(h, c * std::polar(1.0, line_pairing(lambda, h, conv, tol)));
  return out;
}

/// <f, g> in L^2 of the Haar measure; characters are orthonormal.
inline Complex haar_inner(const CylinderFunction& f, const CylinderFunction& g) {
  Complex s = 0.0;
  for (const auto& [h, c] : f.terms()) {
    auto it = g.terms().find(h);
    if (it != g.terms().end()) s += std::conj(c) * it->second;
  }
  return s;
}

struct HolonomyOp {
  Hoop hoop;
};

struct TranslationOp {
  TestField field;
};

using FockOp = std::variant<HolonomyOp, TranslationOp>;

/// Operator word applied right to left: word[0] acts last.
using OpWord = std::vector<FockOp>;

struct MatrixElement {
  Complex closed_form;
  Complex monte_carlo;
  double mc_standard_error = 0.0;
  std::size_t draws = 0;
};

/// The r-Fock representation restricted to cylinder functions over the family
/// of a Gaussian marginal. Matrix elements are Gaussian integrals of
/// exponentials of linear forms, evaluated in the unwrapped picture where the
/// square-root density factor is exp(-(P c).(theta - mean)/2 - c.P c/4),
/// P = Sigma^{-1}.
class FockRepresentation {
 public:
  explicit FockRepresentation(CylindricalMeasure m) : m_(std::move(m)) {
    if (!m_.is_gaussian()) throw InvalidArgument("Fock representation needs a Gaussian measure");
    const Eigen::Index n = m_.sigma().rows();
    Eigen::LLT<Eigen::MatrixXd> llt(m_.sigma());
    if (n == 0 || llt.info() != Eigen::Success)
      throw SingularCovariance("translation operators need a positive-definite covariance");
    precision_ = llt.solve(Eigen::MatrixXd::Identity(n, n));
    precision_ = 0.5 * (precision_ + precision_.transpose());
  }

  const CylindricalMeasure& measure() const { return m_; }

  Eigen::VectorXd labels(const Hoop& h) const { return to_vector(family_coordinates(m_.family, h)); }

  Eigen::VectorXd shift(const TestField& lambda) const {
    return shift_vector(lambda, m_.family, SmearingScale(m_.cov.r), m_.cov.conv, m_.cov.tol);
  }

  /// Sum of coefficient * exp(z . theta) terms.
  struct State {
    struct Term {
      Complex coef;
      Eigen::VectorXcd z;
    };
    std::vector<Term> terms;
  };

  /// Word with operands resolved to label or shift vectors.
  struct ResolvedOp {
    bool holonomy;
    Eigen::VectorXd vec;
  };
  using ResolvedWord = std::vector<ResolvedOp>;

  ResolvedWord resolve(const OpWord& word) const {
    ResolvedWord out;
    for (const auto& op : word) {
      if (const auto* h = std::get_if<HolonomyOp>(&op))
        out.push_back({true, labels(h->hoop)});
      else
        out.push_back({false, shift(std::get<TranslationOp>(op).field)});
    }
    return out;
  }

  State state(const CylinderFunction& f) const {
    State s;
    for (const auto& [h, c] : f.terms())
      s.terms.push_back({c, Complex(0.0, 1.0) * labels(h).cast<Complex>()});
    return s;
  }

  void apply_holonomy(State& s, const Eigen::VectorXd& labels) const {
    const Eigen::VectorXcd add = Complex(0.0, 1.0) * labels.cast<Complex>();
    for (auto& t : s.terms) t.z += add;
  }

  void apply_translation(State& s, const Eigen::VectorXd& c) const {
    const Eigen::VectorXd pc = precision_ * c;
    const double constant = 0.5 * pc.dot(m_.mean) - 0.25 * c.dot(pc);
    const Eigen::VectorXcd pcc = pc.cast<Complex>();
    for (auto& t : s.terms) {
      const Complex zc = (t.z.transpose() * c.cast<Complex>())(0);
      t.coef *= std::exp(zc + constant);
      t.z -= 0.5 * pcc;
    }
  }

  void apply(State& s, const ResolvedWord& word) const {
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
      if (it->holonomy)
        apply_holonomy(s, it->vec);
      else
        apply_translation(s, it->vec);
    }
  }

  /// E[conj(g) f] = sum conj(a) b exp(w . mean + w^T Sigma w / 2), w = conj(z_g) + z_f.
  Complex inner(const State& g, const State& f) const {
    Complex total = 0.0;
    const Eigen::VectorXcd mean = m_.mean.cast<Complex>();
    const Eigen::MatrixXcd sigma = m_.sigma().cast<Complex>();
    for (const auto& a : g.terms)
      for (const auto& b : f.terms) {
        const Eigen::VectorXcd w = a.z.conjugate() + b.z;
        const Complex lin = (w.transpose() * mean)(0);
        const Complex quad = (w.transpose() * sigma * w)(0);
        total += std::conj(a.coef) * b.coef * std::exp(lin + 0.5 * quad);
      }
    return total;
  }

  Complex closed_form(const CylinderFunction& bra, const ResolvedWord& word,
                      const CylinderFunction& ket) const {
    State s = state(ket);
    apply(s, word);
    return inner(state(bra), s);
  }

  /// Monte Carlo estimate with wrapped samples and wrapped Radon-Nikodym
  /// factors. Returns (mean, standard error).
  std::pair<Complex, double> monte_carlo(const CylinderFunction& bra, const ResolvedWord& word,
                                         const CylinderFunction& ket, std::size_t draws,
                                         std::uint64_t seed, unsigned threads = 1,
                                         int terms = 3) const {
    const CylSample smp = sample(m_, draws, seed, threads);
    const WrappedGaussian base(m_.mean, m_.sigma(), terms);
    std::vector<std::optional<WrappedGaussian>> moved;
    for (const auto& op : word)
      moved.emplace_back(op.holonomy ? std::nullopt
                                     : std::optional<WrappedGaussian>(std::in_place,
                                                                      m_.mean - op.vec, m_.sigma(), terms));
    auto eval_fn = [this](const CylinderFunction& f, const Eigen::VectorXd& theta) {
      Complex v = 0.0;
      for (const auto& [h, c] : f.terms()) v += c * std::polar(1.0, labels_cached(h).dot(theta));
      return v;
    };
    // cache labels once; the lambda above reads the cache
    for (const auto& [h, c] : bra.terms()) labels_cached(h);
    for (const auto& [h, c] : ket.terms()) labels_cached(h);
    std::vector<Complex> values(draws);
    parallel_for(draws, 1, [&](std::size_t d) {
      Eigen::VectorXd theta = smp.angles.row(static_cast<Eigen::Index>(d)).transpose();
      const Complex bra_value = std::conj(eval_fn(bra, theta));
      Complex factor = 1.0;
      Eigen::VectorXd point = theta;
      for (std::size_t k = 0; k < word.size(); ++k) {
        if (word[k].holonomy) {
          factor *= std::polar(1.0, word[k].vec.dot(point));
        } else {
          const double log_rho = moved[k]->log_density(point) - base.log_density(point);
          factor *= std::exp(0.5 * log_rho);
          point += word[k].vec;
        }
      }
      values[d] = bra_value * factor * eval_fn(ket, point);
    });
    Complex mean = 0.0;
    for (const auto& v : values) mean += v;
    mean /= static_cast<double>(draws);
    double var = 0.0;
    for (const auto& v : values) var += std::norm(v - mean);
    var /= static_cast<double>(draws > 1 ? draws - 1 : 1);
    return {mean, std::sqrt(var / static_cast<double>(draws))};
  }

 private:
  const Eigen::VectorXd& labels_cached(const Hoop& h) const {
    auto it = label_cache_.find(h);
    if (it == label_cache_.end()) it = label_cache_.emplace(h, labels(h)).first;
    return it->second;
  }

  CylindricalMeasure m_;
  Eigen::MatrixXd precision_;
  mutable std::map<Hoop, Eigen::VectorXd> label_cache_;
};

/// <bra, word(ket)> in L^2(mu_r): closed form, plus a Monte Carlo cross-check
/// when `draws` > 0.
inline MatrixElement fock_matrix_element(const CylinderFunction& bra, const OpWord& word,
                                         const CylinderFunction& ket, const CylindricalMeasure& m,
                                         std::size_t draws = 0, std::uint64_t seed = 0,
                                         unsigned threads = 1) {
  const FockRepresentation rep(m);
  const auto resolved = rep.resolve(word);
  MatrixElement out;
  out.closed_form = rep.closed_form(bra, resolved, ket);
  if (draws > 0) {
    auto [mc, se] = rep.monte_carlo(bra, resolved, ket, draws, seed, threads);
    out.monte_carlo = mc;
    out.mc_standard_error = se;
    out.draws = draws;
  }
  return out;
}

/// Default probe states: the constant function and each family character.
inline std::vector<CylinderFunction> default_probe_states(const CylindricalMeasure& m,
                                                          std::size_t max_states = 5) {
  std::vector<CylinderFunction> states{CylinderFunction::one()};
  for (const auto& h : m.family) {
    if (states.size() >= max_states) break;
    states.push_back(CylinderFunction::basis(h));
  }
  return states;
}

/// max over state pairs of |<g, V Pi f> - e^{i c_a} <g, Pi V f>|, with c_a
/// computed directly from the double line integral for `alpha`.
inline double weyl_check(const Hoop& alpha, const TestField& lambda, const CylindricalMeasure& m,
                         const std::vector<CylinderFunction>& states) {
  const FockRepresentation rep(m);
  const Eigen::VectorXd labels = rep.labels(alpha);
  const Eigen::VectorXd c = rep.shift(lambda);
  const double phase =
      shift_coefficient(lambda, alpha, SmearingScale(m.cov.r), m.cov.conv, m.cov.tol);
  const FockRepresentation::ResolvedWord v_pi{{false, c}, {true, labels}};
  const FockRepresentation::ResolvedWord pi_v{{true, labels}, {false, c}};
  double worst = 0.0;
  for (const auto& g : states)
    for (const auto& f : states) {
      const Complex lhs = rep.closed_form(g, v_pi, f);
      const Complex rhs = std::polar(1.0, phase) * rep.closed_form(g, pi_v, f);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  return worst;
}

/// Central difference in t of <g, [V(t lambda), Pi(T_a)] f> / i at t = 0,
/// compared against c_a(lambda) <g, Pi(T_a) f>. Returns the max discrepancy.
inline double generator_commutator_check(const Hoop& alpha, const TestField& lambda,
                                         const CylindricalMeasure& m, double h_step,
                                         const std::vector<CylinderFunction>& states) {
  if (!(h_step > 0.0)) throw InvalidArgument("h_step must be > 0");
  if (lambda.empty()) return 0.0;
  const FockRepresentation rep(m);
  const Eigen::VectorXd labels = rep.labels(alpha);
  const Eigen::VectorXd c = rep.shift(lambda);
  const double coeff =
      shift_coefficient(lambda, alpha, SmearingScale(m.cov.r), m.cov.conv, m.cov.tol);
  auto commutator = [&](const CylinderFunction& g, const CylinderFunction& f, double t) {
    const Eigen::VectorXd ct = t * c;
    const FockRepresentation::ResolvedWord v_pi{{false, ct}, {true, labels}};
    const FockRepresentation::ResolvedWord pi_v{{true, labels}, {false, ct}};
    return rep.closed_form(g, v_pi, f) - rep.closed_form(g, pi_v, f);
  };
  const FockRepresentation::ResolvedWord pi_only{{true, labels}};
  double worst = 0.0;
  for (const auto& g : states)
    for (const auto& f : states) {
      const Complex fd =
          (commutator(g, f, h_step) - commutator(g, f, -h_step)) / (2.0 * h_step * Complex(0.0, 1.0));
      const Complex expected = coeff * rep.closed_form(g, pi_only, f);
      worst = std::max(worst, std::abs(fd - expected));
    }
  return worst;
}

/// Same protocol in the Haar representation, where the phase is the
/// unsmeared line integral \oint_a lambda.
inline double haar_commutator_check(const Hoop& alpha, const TestField& lambda, double h_step,
                                    const std::vector<CylinderFunction>& states,
                                    Mollifier conv = Mollifier::PaperLiteral,
                                    double tol = kDefaultTol) {
  if (!(h_step > 0.0)) throw InvalidArgument("h_step must be > 0");
  if (lambda.empty()) return 0.0;
  std::map<Hoop, double> phase;
  auto line = [&](const Hoop& h) {
    auto it = phase.find(h);
    if (it == phase.end()) it = phase.emplace(h, line_pairing(lambda, h, conv, tol)).first;
    return it->second;
  };
  auto translate = [&](const CylinderFunction& f, double t) {
    CylinderFunction out;
    for (const auto& [h, c] : f.terms()) out.add(h, c * std::polar(1.0, t * line(h)));
    return out;
  };
  auto commutator = [&](const CylinderFunction& g, const CylinderFunction& f, double t) {
    return haar_inner(g, translate(apply_holonomy(f, alpha), t)) -
           haar_inner(g, apply_holonomy(translate(f, t), alpha));
  };
  const double coeff = line(alpha);
  double worst = 0.0;
  for (const auto& g : states)
    for (const auto& f : states) {
      const Complex fd =
          (commutator(g, f, h_step) - commutator(g, f, -h_step)) / (2.0 * h_step * Complex(0.0, 1.0));
      const Complex expected = coeff * haar_inner(g, apply_holonomy(f, alpha));
      worst = std::max(worst, std::abs(fd - expected));
    }
  return worst;
}

}  // namespace rfock
