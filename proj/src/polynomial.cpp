#include "folab/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace folab {

Polynomial Polynomial::monomial(int degree, double coeff) {
    std::vector<double> c(static_cast<std::size_t>(degree) + 1, 0.0);
    c.back() = coeff;
    return Polynomial(std::move(c));
}

void Polynomial::trim() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

double Polynomial::operator()(double t) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + *it;
    return acc;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
}

Polynomial& Polynomial::operator*=(double s) {
    for (auto& v : c_) v *= s;
    trim();
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<double> c(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(c));
}

Polynomial Polynomial::shifted_up() const {
    if (is_zero()) return {};
    std::vector<double> c(c_.size() + 1, 0.0);
    std::copy(c_.begin(), c_.end(), c.begin() + 1);
    return Polynomial(std::move(c));
}

Polynomial Polynomial::derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<double> c(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) c[i - 1] = static_cast<double>(i) * c_[i];
    return Polynomial(std::move(c));
}

Polynomial Polynomial::integral() const {
    if (is_zero()) return {};
    std::vector<double> c(c_.size() + 1, 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i) c[i + 1] = c_[i] / static_cast<double>(i + 1);
    return Polynomial(std::move(c));
}

Polynomial Polynomial::compose_affine(double a, double b) const {
    // Horner in polynomial arithmetic: p(L) with L = a t + b.
    const Polynomial lin({b, a});
    Polynomial acc;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * lin + Polynomial::constant(*it);
    return acc;
}

double Polynomial::max_abs_coeff() const {
    double m = 0.0;
    for (double v : c_) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace folab
