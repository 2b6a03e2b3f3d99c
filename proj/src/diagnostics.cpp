#include "vepsim/diagnostics.hpp"

#include <cmath>

namespace vepsim {

bool is_spd(const Tensor2& c) { return c.trace() > 0.0 && c.det() > 1e-14; }

double elastic_density(const Tensor2& c) {
  const double tr = c.trace();
  return 0.25 * tr * tr - 0.5 * std::log(c.det());
}

EnergyReport energy_components(const Mesh& mesh, const ModelParams& params, const ScalarField& phi,
                               const ScalarField& q, const VectorField& u, const TensorField& C) {
  EnergyReport r;
  double e_grad = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Vec2 g = element_gradient(mesh, phi, e);
    e_grad += mesh.geometry(e).area * (g.x * g.x + g.y * g.y);
  }
  r.E_mix = 0.5 * params.c0 * e_grad + integrate(mesh, [&](const QuadPoint& qp) {
              return potential_F(params, eval_at(mesh, phi, qp.element, qp.bary));
            });
  r.E_bulk = 0.5 * integrate(mesh, [&](const QuadPoint& qp) {
               const double v = eval_at(mesh, q, qp.element, qp.bary);
               return v * v;
             });
  r.E_kin = 0.5 * integrate(mesh, [&](const QuadPoint& qp) {
              const Vec2 v = eval_at(mesh, u, qp.element, qp.bary);
              return v.x * v.x + v.y * v.y;
            });
  r.E_el = integrate(mesh, [&](const QuadPoint& qp) {
    const Tensor2 c = eval_at(mesh, C, qp.element, qp.bary);
    return is_spd(c) ? elastic_density(c) : 0.0;
  });
  const double frob = 0.25 * integrate(mesh, [&](const QuadPoint& qp) {
                        const Tensor2 c = eval_at(mesh, C, qp.element, qp.bary);
                        return c.xx * c.xx + 2.0 * c.xy * c.xy + c.yy * c.yy;
                      });
  r.E_tot = r.E_mix + r.E_bulk + r.E_kin + r.E_el;
  r.E_alg = r.E_mix + r.E_bulk + r.E_kin + frob;
  r.mass = mass(mesh, phi);
  int spd = 0;
  for (int i = 0; i < C.size(); ++i) spd += is_spd(C.at(i)) ? 1 : 0;
  r.spd_fraction = C.size() > 0 ? static_cast<double>(spd) / C.size() : 1.0;
  return r;
}

double mass(const Mesh& mesh, const ScalarField& phi) { return mean(mesh, phi); }

double mass_drift(double current, double initial) { return current - initial; }

double elastic_source_rate(const Mesh& mesh, const ModelParams& params, const ScalarField& phi,
                           const TensorField& C) {
  const Coefficients coeff(params);
  return 0.5 * integrate(mesh, [&](const QuadPoint& qp) {
           const double tr = eval_at(mesh, C, qp.element, qp.bary).trace();
           return coeff.h(eval_at(mesh, phi, qp.element, qp.bary)) * tr * tr;
         });
}

}  // namespace vepsim
