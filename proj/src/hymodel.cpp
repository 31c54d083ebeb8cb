#include "lorentree/hymodel.hpp"

#include <cmath>
#include <fmt/format.h>

namespace lorentree {

namespace {

Vec scaled(const Vec& v, double c)
{
    Vec r = v;
    for (auto& x : r)
        x *= c;
    return r;
}

Vec combine(double a, const Vec& x, double b, const Vec& y)
{
    Vec r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        r[i] = a * x[i] + b * y[i];
    return r;
}

double norm_sq(const Vec& v)
{
    double s = 0.0;
    for (double x : v)
        s += x * x;
    return s;
}

Vec default_time(const QuadForm<double>& form)
{
    if (form.kind() == QuadForm<double>::Kind::minkowski) {
        Vec t(form.dim(), 0.0);
        t[form.distinguished()] = 1.0;
        return t;
    }
    auto decomp = pm_decomposition(form);
    if (decomp.minus.size() != 1)
        throw InvalidInput("hyperboloid model needs exactly one negative direction");
    Vec t = decomp.minus.front();
    double q = eval_B(form, t, t);
    t = scaled(t, 1.0 / std::sqrt(-q));
    // Orient so the largest-magnitude coordinate is positive.
    std::size_t best = 0;
    for (std::size_t i = 1; i < t.size(); ++i)
        if (std::fabs(t[i]) > std::fabs(t[best]))
            best = i;
    if (t[best] < 0)
        t = scaled(t, -1.0);
    return t;
}

} // namespace

double dist_from_pairing(double bxy, double qx, double qy)
{
    if (!(qx < 0.0) || !(qy < 0.0))
        throw Error("distance requires two negative vectors");
    double c = std::fabs(bxy) / std::sqrt(qx * qy);
    return guarded_arcosh(c);
}

double busemann_from_pairings(double bxy, double bxz, double qy, double qz)
{
    if (bxy == 0.0 || bxz == 0.0)
        throw Error("Busemann cocycle: vanishing pairing with the boundary point");
    return std::log(std::fabs(bxy)) - std::log(std::fabs(bxz)) +
           0.5 * (std::log(std::fabs(qz)) - std::log(std::fabs(qy)));
}

HyperboloidModel::HyperboloidModel(QuadForm<double> form)
    : form_(std::move(form)), time_(default_time(form_))
{
}

HyperboloidModel::HyperboloidModel(QuadForm<double> form, Vec time)
    : form_(std::move(form)), time_(std::move(time))
{
    if (time_.size() != form_.dim())
        throw InvalidInput("time direction has wrong length");
    double q = Q(time_);
    if (!(q < 0.0))
        throw InvalidInput("time direction must be a negative vector");
    time_ = scaled(time_, 1.0 / std::sqrt(-q));
}

HPoint HyperboloidModel::point(const Vec& v) const
{
    double q = Q(v);
    if (!(q < -eps() * std::max(1.0, norm_sq(v))))
        throw InvalidInput(fmt::format("not a negative vector (Q = {:.3e})", q));
    double c = 1.0 / std::sqrt(-q);
    if (B(v, time_) > 0.0)
        c = -c;
    return {scaled(v, c)};
}

BPoint HyperboloidModel::boundary(const Vec& v) const
{
    double scale = std::max(1.0, norm_sq(v));
    double q = Q(v);
    if (std::fabs(q) > eps() * scale)
        throw InvalidInput(fmt::format("not an isotropic vector (Q = {:.3e})", q));
    double t = -B(v, time_);
    if (std::fabs(t) <= eps() * std::sqrt(scale))
        throw InvalidInput("zero vector is not a boundary point");
    return {scaled(v, 1.0 / t)};
}

double HyperboloidModel::dist(const HPoint& p, const HPoint& q) const
{
    return dist_from_pairing(B(p.vec, q.vec), Q(p.vec), Q(q.vec));
}

HPoint HyperboloidModel::exp_map(const Vec& v) const
{
    double along = B(v, time_);
    if (std::fabs(along) > eps() * std::max(1.0, std::sqrt(norm_sq(v))))
        throw InvalidInput("exp_map argument has a component along the time direction");
    double qv = Q(v);
    return {combine(1.0, v, std::sqrt(1.0 + qv), time_)};
}

Vec HyperboloidModel::log_map(const HPoint& p) const
{
    // p = v + c * time with c = -B(p, time) since Q(time) = -1.
    double c = -B(p.vec, time_);
    return combine(1.0, p.vec, -c, time_);
}

Geodesic HyperboloidModel::geodesic(const HPoint& base, const Vec& dir) const
{
    double scale = std::max(1.0, std::sqrt(norm_sq(dir)));
    if (std::fabs(B(base.vec, dir)) > eps() * scale)
        throw InvalidInput("geodesic direction is not orthogonal to the base point");
    double q = Q(dir);
    if (!(q > 0.0))
        throw InvalidInput("geodesic direction must be spacelike");
    return {base, scaled(dir, 1.0 / std::sqrt(q))};
}

HPoint HyperboloidModel::geodesic_point(const Geodesic& g, double t) const
{
    return point(combine(std::cosh(t), g.base.vec, std::sinh(t), g.dir));
}

double HyperboloidModel::busemann(const BPoint& x, const HPoint& y, const HPoint& z) const
{
    return busemann_from_pairings(B(x.vec, y.vec), B(x.vec, z.vec), Q(y.vec), Q(z.vec));
}

} // namespace lorentree
