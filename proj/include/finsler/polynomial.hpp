#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <finsler/errors.hpp>

namespace finsler {

/// Multivariate polynomial stored as a multi-index coefficient table, the
/// canonical representation for m-th-root metrics. Terms are kept sorted
/// lexicographically by exponent row; duplicate rows are rejected.
class Polynomial {
public:
    struct Term {
        std::vector<int> powers;
        double coeff;
    };

    Polynomial(int dimension, std::vector<Term> terms)
        : dim_(dimension), terms_(std::move(terms)) {
        if (dim_ <= 0) throw InvalidMetric("polynomial dimension must be positive");
        for (const Term& t : terms_) {
            if (static_cast<int>(t.powers.size()) != dim_)
                throw InvalidMetric("exponent row length does not match dimension");
            for (int p : t.powers)
                if (p < 0) throw InvalidMetric("negative exponent in coefficient table");
        }
        std::sort(terms_.begin(), terms_.end(),
                  [](const Term& a, const Term& b) { return a.powers < b.powers; });
        for (std::size_t i = 1; i < terms_.size(); ++i)
            if (terms_[i].powers == terms_[i - 1].powers)
                throw InvalidMetric("duplicate multi-index in coefficient table");
    }

    int dimension() const { return dim_; }
    const std::vector<Term>& terms() const { return terms_; }

    int total_degree() const {
        int d = 0;
        for (const Term& t : terms_) {
            int s = 0;
            for (int p : t.powers) s += p;
            d = std::max(d, s);
        }
        return d;
    }

    /// True when every term has the same total degree m.
    bool homogeneous_of_degree(int m) const {
        for (const Term& t : terms_) {
            int s = 0;
            for (int p : t.powers) s += p;
            if (s != m) return false;
        }
        return true;
    }

    /// Generic over the scalar type so the same table evaluates with plain
    /// doubles and with second-order Taylor numbers.
    template <class T>
    T operator()(std::span<const T> y) const {
        T acc{0.0};
        for (const Term& t : terms_) {
            T m{t.coeff};
            for (int i = 0; i < dim_; ++i)
                for (int k = 0; k < t.powers[static_cast<std::size_t>(i)]; ++k)
                    m *= y[static_cast<std::size_t>(i)];
            acc += m;
        }
        return acc;
    }

    /// Exact partial derivative: differentiates the coefficient table.
    Polynomial partial(int k) const {
        std::vector<Term> out;
        for (const Term& t : terms_) {
            const int p = t.powers[static_cast<std::size_t>(k)];
            if (p == 0) continue;
            Term d = t;
            d.coeff *= p;
            d.powers[static_cast<std::size_t>(k)] -= 1;
            out.push_back(std::move(d));
        }
        return Polynomial(dim_, std::move(out));
    }

    bool operator==(const Polynomial& o) const {
        if (dim_ != o.dim_ || terms_.size() != o.terms_.size()) return false;
        for (std::size_t i = 0; i < terms_.size(); ++i)
            if (terms_[i].powers != o.terms_[i].powers || terms_[i].coeff != o.terms_[i].coeff)
                return false;
        return true;
    }

private:
    int dim_;
    std::vector<Term> terms_;
};

} // namespace finsler
