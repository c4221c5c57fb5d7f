#include "reglab/polynomial.hpp"

#include <sstream>

#include "reglab/errors.hpp"

namespace reglab {

Polynomial::Polynomial(std::initializer_list<Rational> coeffs) : c_(coeffs) { trim(); }

Polynomial::Polynomial(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

Polynomial Polynomial::monomial(int k, Rational c) {
    if (k < 0) throw DomainError("negative monomial degree");
    std::vector<Rational> v(k + 1, Rational(0));
    v[k] = c;
    return Polynomial(std::move(v));
}

void Polynomial::trim() {
    while (c_.size() > 1 && c_.back().is_zero()) c_.pop_back();
    if (c_.empty()) c_.emplace_back(0);
}

const Rational& Polynomial::operator[](int k) const {
    static const Rational zero(0);
    return (k >= 0 && k <= degree()) ? c_[k] : zero;
}

Polynomial Polynomial::derivative(int order) const {
    if (order < 0) throw DomainError("negative derivative order");
    if (order > degree()) return Polynomial();
    std::vector<Rational> d(c_.size() - order, Rational(0));
    for (int k = order; k <= degree(); ++k) {
        std::int64_t falling = 1;
        for (int j = 0; j < order; ++j) falling *= (k - j);
        d[k - order] = c_[k] * Rational(falling);
    }
    return Polynomial(std::move(d));
}

Polynomial Polynomial::shift(int p) const {
    if (is_zero()) return *this;
    std::vector<Rational> v(p, Rational(0));
    v.insert(v.end(), c_.begin(), c_.end());
    return Polynomial(std::move(v));
}

Rational Polynomial::operator()(const Rational& y) const {
    Rational acc(0);
    for (int k = degree(); k >= 0; --k) acc = acc * y + c_[k];
    return acc;
}

double Polynomial::operator()(double y) const {
    double acc = 0.0;
    for (int k = degree(); k >= 0; --k) acc = acc * y + c_[k].to_double();
    return acc;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Rational(0));
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    trim();
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Rational(0));
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
    trim();
    return *this;
}

Polynomial& Polynomial::operator*=(const Rational& s) {
    for (auto& c : c_) c *= s;
    trim();
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    std::vector<Rational> v(a.c_.size() + b.c_.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(v));
}

std::string Polynomial::str(const char* var) const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int k = degree(); k >= 0; --k) {
        const Rational& c = c_[k];
        if (c.is_zero()) continue;
        const bool neg = c.num() < 0;
        const Rational mag = neg ? -c : c;
        if (first) {
            if (neg) os << "-";
        } else {
            os << (neg ? " - " : " + ");
        }
        first = false;
        const bool unit = mag == Rational(1);
        if (!unit || k == 0) os << mag.str();
        if (k > 0) {
            if (!unit) os << "*";
            os << var;
            if (k > 1) os << "^" << k;
        }
    }
    return os.str();
}

}  // namespace reglab
