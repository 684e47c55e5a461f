#include "fsm/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace fsm {

Polynomial Polynomial::from_real(const std::vector<double>& re) {
    Polynomial p;
    p.c.reserve(re.size());
    for (double v : re) p.c.emplace_back(v, 0.0);
    return p;
}

double Polynomial::max_coeff() const {
    double m = 0.0;
    for (const cd& v : c) m = std::max(m, std::abs(v));
    return m;
}

int Polynomial::degree() const {
    for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k)
        if (c[static_cast<std::size_t>(k)] != cd(0.0, 0.0)) return k;
    return -1;
}

bool Polynomial::is_zero() const {
    return max_coeff() == 0.0;
}

cd Polynomial::eval(cd z) const {
    cd sum = 0.0;
    for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k)
        sum = sum * z + c[static_cast<std::size_t>(k)];
    return sum;
}

Polynomial Polynomial::derivative() const {
    Polynomial d;
    if (c.size() <= 1) return d;
    d.c.resize(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k)
        d.c[k - 1] = c[k] * static_cast<double>(k);
    return d;
}

void Polynomial::trim(double rel_tol) {
    double m = max_coeff();
    if (m == 0.0) { c.clear(); return; }
    for (cd& v : c)
        if (std::abs(v) <= rel_tol * m) v = 0.0;
    while (!c.empty() && c.back() == cd(0.0, 0.0)) c.pop_back();
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    Polynomial r;
    r.c.resize(std::max(c.size(), o.c.size()), cd(0.0, 0.0));
    for (std::size_t k = 0; k < c.size(); ++k) r.c[k] += c[k];
    for (std::size_t k = 0; k < o.c.size(); ++k) r.c[k] += o.c[k];
    return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
    Polynomial r;
    r.c.resize(std::max(c.size(), o.c.size()), cd(0.0, 0.0));
    for (std::size_t k = 0; k < c.size(); ++k) r.c[k] += c[k];
    for (std::size_t k = 0; k < o.c.size(); ++k) r.c[k] -= o.c[k];
    return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    Polynomial r;
    if (c.empty() || o.c.empty()) return r;
    r.c.assign(c.size() + o.c.size() - 1, cd(0.0, 0.0));
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] == cd(0.0, 0.0)) continue;
        for (std::size_t j = 0; j < o.c.size(); ++j)
            r.c[i + j] += c[i] * o.c[j];
    }
    return r;
}

Polynomial Polynomial::scaled(cd s) const {
    Polynomial r = *this;
    for (cd& v : r.c) v *= s;
    return r;
}

} // namespace fsm
