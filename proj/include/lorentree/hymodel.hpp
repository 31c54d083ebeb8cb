#pragma once

#include "lorentree/quadspace.hpp"

namespace lorentree {

using Vec = DenseVec<double>;

// Point of H: Q(vec) = -1, future pointing with respect to the model's time
// direction.
struct HPoint {
    Vec vec;
};

// Boundary point: isotropic, normalized so that -B(vec, time) = 1.
struct BPoint {
    Vec vec;
};

struct Geodesic {
    HPoint base;
    Vec dir;
};

// arcosh(|B(x,y)| / sqrt(Q(x)Q(y))) for negative vectors x, y.
double dist_from_pairing(double bxy, double qx, double qy);

// Busemann cocycle of an isotropic x at y, z from raw pairings,
// evaluated in log space.
double busemann_from_pairings(double bxy, double bxz, double qy, double qz);

// The hyperboloid model attached to a form of index one. The time direction
// is a fixed negative vector with Q = -1; for the Minkowski form it is the
// distinguished basis vector.
class HyperboloidModel {
public:
    explicit HyperboloidModel(QuadForm<double> form);
    HyperboloidModel(QuadForm<double> form, Vec time);

    const QuadForm<double>& form() const { return form_; }
    const Vec& time() const { return time_; }
    std::size_t dim() const { return form_.dim(); }

    double B(const Vec& x, const Vec& y) const { return eval_B(form_, x, y); }
    double Q(const Vec& x) const { return eval_B(form_, x, x); }

    // Normalizes any negative vector to its representative on H.
    HPoint point(const Vec& v) const;
    // Normalizes a nonzero isotropic vector.
    BPoint boundary(const Vec& v) const;

    double dist(const HPoint& p, const HPoint& q) const;

    // v must be B-orthogonal to the time direction.
    HPoint exp_map(const Vec& v) const;
    // Inverse of exp_map: the component of p orthogonal to the time direction.
    Vec log_map(const HPoint& p) const;

    Geodesic geodesic(const HPoint& base, const Vec& dir) const;
    HPoint geodesic_point(const Geodesic& g, double t) const;

    double busemann(const BPoint& x, const HPoint& y, const HPoint& z) const;
    double horosphere_level(const BPoint& x, const HPoint& z, const HPoint& p) const
    {
        return busemann(x, p, z);
    }

private:
    QuadForm<double> form_;
    Vec time_;
};

} // namespace lorentree
