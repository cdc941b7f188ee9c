#pragma once

#include <initializer_list>
#include <span>
#include <vector>

namespace folab {

// Dense real polynomial in one variable; coeffs()[i] multiplies t^i.
// Trailing zeros are trimmed, so the zero polynomial has no coefficients.
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(std::initializer_list<double> c) : c_(c) { trim(); }
    explicit Polynomial(std::vector<double> c) : c_(std::move(c)) { trim(); }

    static Polynomial constant(double v) { return Polynomial({v}); }
    static Polynomial monomial(int degree, double coeff = 1.0);

    // -1 for the zero polynomial.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    double operator[](std::size_t i) const { return i < c_.size() ? c_[i] : 0.0; }
    std::span<const double> coeffs() const { return c_; }

    double operator()(double t) const;

    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial& operator*=(double s);

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
    friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    Polynomial operator-() const { return *this * -1.0; }

    bool operator==(const Polynomial&) const = default;

    // t * p(t)
    Polynomial shifted_up() const;
    Polynomial derivative() const;
    // Antiderivative vanishing at t = 0.
    Polynomial integral() const;
    // p(a*t + b)
    Polynomial compose_affine(double a, double b) const;
    double max_abs_coeff() const;

private:
    void trim();
    std::vector<double> c_;
};

}  // namespace folab
