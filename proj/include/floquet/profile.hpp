#pragma once

#include <vector>
#include <string>
#include "floquet/types.hpp"

namespace floquet {

enum class CoeffKind { Constant, Polynomial, Sampled };

// One material coefficient on a segment.
//   Constant:   data = {value}
//   Polynomial: data = {c0, c1, ...}, evaluated in the global (unit-period) y
//   Sampled:    data = {y0, v0, y1, v1, ...}, strictly increasing y, linear
//               interpolation; nodes must span the segment
struct Coefficient {
    CoeffKind kind = CoeffKind::Constant;
    std::vector<double> data;

    double eval(double y) const;
    bool constant() const;

    static Coefficient constant_value(double v) { return {CoeffKind::Constant, {v}}; }
    static Coefficient polynomial(std::vector<double> c) { return {CoeffKind::Polynomial, std::move(c)}; }
};

struct Segment {
    double from = 0.0, to = 1.0; // half-open [from, to)
    Coefficient rho, mu1, mu2;
};

struct MaterialPoint {
    double rho, mu1, mu2;
};

// Monoclinic stiffness input; reduces to the two shear moduli as
// mu1 = c44, mu2 = c55 - c45^2/c44.
struct MonoclinicSegment {
    double from = 0.0, to = 1.0;
    Coefficient c44, c45, c55, rho;
};

enum class ProfileExpr { Mu2OverRho, RhoOverMu2, Rho, Mu1, Mu2 };

// Piecewise material profile on the unit period. A profile supplied on a
// physical period T is rescaled to [0,1) at construction (from/to divided by
// T, polynomial coefficients c_j -> c_j T^j, sampled nodes divided by T);
// frequencies are then the nondimensional omega*T, k*T. period_scale() keeps
// the original T for unit conversion only.
class MaterialProfile {
public:
    MaterialProfile(std::vector<Segment> segments, double period = 1.0);

    MaterialPoint at(double y) const;            // y taken mod 1; right-limit at jumps
    double rho(double y) const { return at(y).rho; }
    double mu1(double y) const { return at(y).mu1; }
    double mu2(double y) const { return at(y).mu2; }

    const std::vector<Segment>& segments() const { return segs_; }
    double period_scale() const { return period_scale_; }

    // <f> = integral over one period; exact for Constant/Polynomial pieces,
    // adaptive quadrature (rel. 1e-13) for 1/mu1 and Sampled pieces
    double mean_rho() const;
    double mean_mu1() const;
    double mean_mu2() const;
    double mean_inv_mu1() const;

    // min/max over [0,1]: closed segment endpoints, polynomial critical
    // points (degree <= 3), and a dense sample with local refinement
    std::pair<double, double> extremum(ProfileExpr expr) const;

    bool piecewise_constant() const;
    std::vector<MaterialPoint> layers(std::vector<double>* widths = nullptr) const;

    // segment boundaries in (0,1); 0 and 1 are implicit
    const std::vector<double>& breakpoints() const { return breaks_; }

    static MaterialProfile homogeneous(double rho, double mu1, double mu2);
    static MaterialProfile bilayer(const MaterialPoint& a, const MaterialPoint& b,
                                   double d1 = 0.5, double period = 1.0);

private:
    std::vector<Segment> segs_;
    std::vector<double> breaks_;
    double period_scale_ = 1.0;
    mutable double means_[4]; // rho, mu1, mu2, 1/mu1
    mutable bool means_ready_ = false;
    void compute_means() const;
    const Segment& segment_at(double y) const;
};

MaterialProfile reduce_monoclinic(const std::vector<MonoclinicSegment>& segments,
                                  double period = 1.0);

} // namespace floquet
