#pragma once

// Radial conformal factors u(|x|) evaluated through Taylor jets, so that
// derivatives and iterated Laplacians are exact up to roundoff.

#include <functional>
#include <memory>
#include <string>

#include "qdeficit/jet.hpp"

namespace qdeficit {

// u(r) = -alpha log r + c + O(r^-k) as r -> inf, k = correction_order.
// correction_order < 0 marks an undeclared subleading behaviour.
struct TailDescriptor {
    double alpha = 0.0;
    double c = 0.0;
    int correction_order = -1;
};

class ProfileModel {
public:
    virtual ~ProfileModel() = default;
    // Taylor coefficients of u(r + h) in h.
    virtual Jet radial_jet(double r, int order) const = 0;
    // Laplacian^m of u(|x|) on R^n at |x| = r (no sign flip).
    virtual double laplacian_power(double r, int n, int m) const = 0;
};

class RadialProfile {
public:
    RadialProfile(std::shared_ptr<const ProfileModel> model, TailDescriptor tail, std::string family,
                  double parameter);

    double value(double r) const { return jet(r, 0).value(); }
    double derivative(double r, int k) const { return jet(r, k).derivative(k); }
    Jet jet(double r, int order) const;
    double laplacian_power(double r, int n, int m) const;

    const TailDescriptor& tail() const { return tail_; }
    const std::string& family() const { return family_; }
    double parameter() const { return parameter_; }
    const std::shared_ptr<const ProfileModel>& model() const { return model_; }

private:
    std::shared_ptr<const ProfileModel> model_;
    TailDescriptor tail_;
    std::string family_;
    double parameter_;
};

// A profile given as an expression in rho = r^2 evaluated on jets.
using RhoExpression = std::function<Jet(const Jet& rho)>;
RadialProfile rho_profile(RhoExpression expr, TailDescriptor tail, std::string family, double parameter);

RadialProfile flat_profile(double c = 0.0);

// u = -(alpha/2) log(1 + r^2), alpha in [0, 2).
RadialProfile family_alpha(double alpha);

// Same expression for any real alpha; used for controls outside the family.
RadialProfile log_profile(double alpha);

// u = log(2 / (1 + r^2)), the round sphere pulled back by stereographic projection.
RadialProfile sphere_factor();

// Smooth caps of -log r at the origin: variant 0 is -(1/2) log(1 + r^2),
// variant 1 is -(1/4) log(1 + r^4).
RadialProfile capped_log(int variant);

// u(lambda r).
RadialProfile dilate(const RadialProfile& u, double lambda);

}  // namespace qdeficit
