#pragma once

#include "lorentree/scalar.hpp"

#include <cmath>
#include <initializer_list>
#include <map>
#include <utility>
#include <vector>

namespace lorentree {

// Finitely supported function Key -> S. Zero coefficients are never stored:
// exactly zero for rationals, |c| <= eps() for doubles.
template <class Key, class S>
class SparseVec {
public:
    using map_type = std::map<Key, S>;

    SparseVec() = default;
    SparseVec(std::initializer_list<std::pair<const Key, S>> init)
    {
        for (const auto& [k, c] : init)
            add(k, c);
    }

    static SparseVec delta(const Key& k)
    {
        SparseVec v;
        v.set(k, ScalarTraits<S>::from_int(1));
        return v;
    }

    S get(const Key& k) const
    {
        auto it = coeffs_.find(k);
        return it == coeffs_.end() ? S(0) : it->second;
    }

    void set(const Key& k, const S& c)
    {
        if (ScalarTraits<S>::is_zero(c))
            coeffs_.erase(k);
        else
            coeffs_[k] = c;
    }

    void add(const Key& k, const S& c)
    {
        auto it = coeffs_.find(k);
        if (it == coeffs_.end()) {
            if (!ScalarTraits<S>::is_zero(c))
                coeffs_.emplace(k, c);
            return;
        }
        it->second += c;
        if (ScalarTraits<S>::is_zero(it->second))
            coeffs_.erase(it);
    }

    // this += c * other
    void axpy(const S& c, const SparseVec& other)
    {
        for (const auto& [k, v] : other.coeffs_)
            add(k, c * v);
    }

    SparseVec& operator+=(const SparseVec& o)
    {
        for (const auto& [k, v] : o.coeffs_)
            add(k, v);
        return *this;
    }

    SparseVec& operator-=(const SparseVec& o)
    {
        for (const auto& [k, v] : o.coeffs_)
            add(k, -v);
        return *this;
    }

    SparseVec& operator*=(const S& c)
    {
        if (ScalarTraits<S>::is_zero(c)) {
            coeffs_.clear();
            return *this;
        }
        for (auto it = coeffs_.begin(); it != coeffs_.end();) {
            it->second *= c;
            if (ScalarTraits<S>::is_zero(it->second))
                it = coeffs_.erase(it);
            else
                ++it;
        }
        return *this;
    }

    friend SparseVec operator+(SparseVec a, const SparseVec& b) { return a += b; }
    friend SparseVec operator-(SparseVec a, const SparseVec& b) { return a -= b; }
    friend SparseVec operator*(const S& c, SparseVec a) { return a *= c; }
    SparseVec operator-() const
    {
        SparseVec r = *this;
        for (auto& [k, v] : r.coeffs_)
            v = -v;
        return r;
    }

    bool empty() const { return coeffs_.empty(); }
    std::size_t size() const { return coeffs_.size(); }
    const map_type& coeffs() const { return coeffs_; }
    auto begin() const { return coeffs_.begin(); }
    auto end() const { return coeffs_.end(); }

    std::vector<Key> support() const
    {
        std::vector<Key> keys;
        keys.reserve(coeffs_.size());
        for (const auto& kv : coeffs_)
            keys.push_back(kv.first);
        return keys;
    }

    // Euclidean (l2) norm, as a double.
    double l2_norm() const
    {
        double s = 0.0;
        for (const auto& kv : coeffs_) {
            double d = ScalarTraits<S>::to_double(kv.second);
            s += d * d;
        }
        return std::sqrt(s);
    }

    double max_abs() const
    {
        double m = 0.0;
        for (const auto& kv : coeffs_)
            m = std::max(m, std::fabs(ScalarTraits<S>::to_double(kv.second)));
        return m;
    }

    friend bool operator==(const SparseVec& a, const SparseVec& b) { return a.coeffs_ == b.coeffs_; }

private:
    map_type coeffs_;
};

// Plain Euclidean dot product on the common support.
template <class Key, class S>
S euclid_dot(const SparseVec<Key, S>& x, const SparseVec<Key, S>& y)
{
    const auto& small = x.size() <= y.size() ? x : y;
    const auto& large = x.size() <= y.size() ? y : x;
    S acc = S(0);
    for (const auto& [k, v] : small)
        acc += v * large.get(k);
    return acc;
}

// max |x_k - y_k| as a double, computed without the zero filter of operator-.
template <class Key, class S>
double max_coeff_gap(const SparseVec<Key, S>& x, const SparseVec<Key, S>& y)
{
    double m = 0.0;
    for (const auto& [k, c] : x)
        m = std::max(m, std::fabs(ScalarTraits<S>::to_double(c - y.get(k))));
    for (const auto& [k, c] : y)
        if (!x.coeffs().count(k))
            m = std::max(m, std::fabs(ScalarTraits<S>::to_double(c)));
    return m;
}

// B for the diagonal form with -1 at w and +1 elsewhere.
template <class Key, class S>
S minkowski_B(const Key& w, const SparseVec<Key, S>& x, const SparseVec<Key, S>& y)
{
    S acc = euclid_dot(x, y);
    acc -= ScalarTraits<S>::from_int(2) * x.get(w) * y.get(w);
    return acc;
}

template <class Key, class S>
S minkowski_Q(const Key& w, const SparseVec<Key, S>& x)
{
    return minkowski_B(w, x, x);
}

} // namespace lorentree
