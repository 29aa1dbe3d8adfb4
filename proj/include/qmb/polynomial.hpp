#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qmb/canon.hpp"
#include "qmb/error.hpp"

namespace qmb {

inline constexpr double kTermDropTolerance = 1e-15;

struct Term {
  double coefficient = 0.0;
  // Sorted; at most one literal per bit position.
  std::vector<BitLiteral> literals;
};

// Sum of (coefficient x product of bit literals) over a fixed encoding.
class BitPolynomial {
 public:
  BitPolynomial() = default;
  explicit BitPolynomial(std::shared_ptr<const BitEncoding> enc)
      : enc_(std::move(enc)) {}

  static BitPolynomial constant(double c,
                                std::shared_ptr<const BitEncoding> enc) {
    BitPolynomial p(std::move(enc));
    if (c != 0.0) p.terms_.push_back({c, {}});
    return p;
  }

  const std::shared_ptr<const BitEncoding>& encoding() const { return enc_; }
  const std::vector<Term>& terms() const { return terms_; }

  void add_term(double c, std::vector<BitLiteral> lits) {
    std::sort(lits.begin(), lits.end());
    for (std::size_t i = 1; i < lits.size(); ++i) {
      if (lits[i].block == lits[i - 1].block &&
          lits[i].offset == lits[i - 1].offset) {
        if (lits[i].positive != lits[i - 1].positive) return;  // b(1-b) = 0
      }
    }
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    terms_.push_back({c, std::move(lits)});
  }

  void add(const BitPolynomial& o, double weight = 1.0) {
    check_compatible(o);
    if (!enc_) enc_ = o.enc_;
    for (const Term& t : o.terms_) {
      terms_.push_back({weight * t.coefficient, t.literals});
    }
  }

  BitPolynomial scaled(double w) const {
    BitPolynomial p = *this;
    for (Term& t : p.terms_) t.coefficient *= w;
    return p;
  }

  // Product with a single literal.
  BitPolynomial times(const BitLiteral& lit) const {
    BitPolynomial p(enc_);
    for (const Term& t : terms_) {
      bool drop = false;
      bool present = false;
      for (const BitLiteral& l : t.literals) {
        if (l.block == lit.block && l.offset == lit.offset) {
          present = true;
          drop = l.positive != lit.positive;
        }
      }
      if (drop) continue;
      Term n = t;
      if (!present) {
        n.literals.insert(
            std::upper_bound(n.literals.begin(), n.literals.end(), lit), lit);
      }
      p.terms_.push_back(std::move(n));
    }
    return p;
  }

  // Merges terms with identical literal sets, drops near-zero coefficients
  // and sorts terms by literal list.
  void canonicalize() {
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) {
      return a.literals < b.literals;
    });
    std::vector<Term> merged;
    for (Term& t : terms_) {
      if (!merged.empty() && merged.back().literals == t.literals) {
        merged.back().coefficient += t.coefficient;
      } else {
        merged.push_back(std::move(t));
      }
    }
    std::erase_if(merged, [](const Term& t) {
      return std::abs(t.coefficient) <= kTermDropTolerance;
    });
    terms_ = std::move(merged);
  }

  bool is_constant() const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const Term& t) { return t.literals.empty(); });
  }

  double constant_part() const {
    double c = 0.0;
    for (const Term& t : terms_) {
      if (t.literals.empty()) c += t.coefficient;
    }
    return c;
  }

  int max_degree() const {
    int d = 0;
    for (const Term& t : terms_) {
      d = std::max(d, static_cast<int>(t.literals.size()));
    }
    return d;
  }

  double eval(const BitString& u) const {
    double s = 0.0;
    for (const Term& t : terms_) {
      bool on = true;
      for (const BitLiteral& l : t.literals) {
        if (!literal_value(*enc_, u, l)) {
          on = false;
          break;
        }
      }
      if (on) s += t.coefficient;
    }
    return s;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    os.precision(6);
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (i) os << " + ";
      os << terms_[i].coefficient;
      for (const BitLiteral& l : terms_[i].literals) {
        os << "*" << (enc_ ? enc_->literal_name(l) : "?");
      }
    }
    return os.str();
  }

 private:
  void check_compatible(const BitPolynomial& o) const {
    if (enc_ && o.enc_ && enc_ != o.enc_ && !(*enc_ == *o.enc_)) {
      throw PreconditionError("polynomials use different bit encodings");
    }
    if ((!enc_ && !is_constant()) || (!o.enc_ && !o.is_constant())) {
      throw PreconditionError("polynomial has literals but no encoding");
    }
  }

  std::shared_ptr<const BitEncoding> enc_;
  std::vector<Term> terms_;
};

inline double eval_gamma(const BitPolynomial& p, const BitString& u) {
  return p.eval(u);
}

inline double eval_gamma(const BitPolynomial& p, std::uint64_t u) {
  if (p.is_constant()) return p.constant_part();
  return p.eval(BitString::from_index(u, p.encoding()->total_bits()));
}

// Weighted sum of polynomials over one encoding, e.g. an average treatment
// effect as P(y|do(X=1)) - P(y|do(X=0)).
inline BitPolynomial combine_linear(
    const std::vector<std::pair<double, BitPolynomial>>& queries) {
  BitPolynomial out;
  for (const auto& [w, p] : queries) out.add(p, w);
  out.canonicalize();
  return out;
}

// Word-sized evaluator for polynomials over layouts of at most 63 bits.
class MaskedPolynomial {
 public:
  explicit MaskedPolynomial(const BitPolynomial& p) {
    for (const Term& t : p.terms()) {
      if (t.literals.empty()) {
        constant_ += t.coefficient;
      } else {
        terms_.emplace_back(t.coefficient, masked(*p.encoding(), t.literals));
      }
    }
  }

  double eval(std::uint64_t u) const {
    double s = constant_;
    for (const auto& [c, m] : terms_) {
      if (m.eval(u)) s += c;
    }
    return s;
  }

 private:
  double constant_ = 0.0;
  std::vector<std::pair<double, MaskedProduct>> terms_;
};

}  // namespace qmb
