#include "mfg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mfg {

namespace {

// Density transported to the terminal time: one forward continuity step
// from the last interval. This is what the adjoint pairs with the
// terminal slice, so using it keeps the gap exact at the saddle point.
std::vector<double> terminal_density(const DensityField& m,
                                     const FluxField& w,
                                     const ModelSpec& model,
                                     const SpaceTimeGrid& grid) {
  const std::size_t N = grid.num_nodes();
  const std::size_t last = grid.nt - 1;
  std::vector<double> rate(N, 0.0);
  apply_second_order_transpose(grid, model.diffusion, m.slice(last),
                               rate.data());
  apply_gradient_transpose(grid, w.v.data() + last * N * grid.d,
                           rate.data());
  std::vector<double> out(m.slice(last), m.slice(last) + N);
  for (std::size_t x = 0; x < N; ++x) out[x] += grid.dt() * rate[x];
  return out;
}

}  // namespace

GapResult duality_gap(const ScalarField& phi, const DensityField& alpha,
                      const DensityField& m, const FluxField& w,
                      const ModelSpec& model, const SpaceTimeGrid& grid) {
  const std::size_t N = grid.num_nodes();
  const double cw = grid.cell_weight();
  const double vol = grid.cell_volume();

  double primal = 0.0;
  for (std::size_t k = 0; k < grid.nt; ++k)
    for (std::size_t x = 0; x < N; ++x)
      primal += eval_Fstar(model.coupling, x, alpha.at(k, x));
  primal *= cw;
  double init_pairing = 0.0;
  for (std::size_t x = 0; x < N; ++x)
    init_pairing += model.m0[x] * phi.at(0, x);
  primal -= vol * init_pairing;

  double dual = 0.0;
  bool infinite = false;
  for (std::size_t k = 0; k < grid.nt && !infinite; ++k)
    for (std::size_t x = 0; x < N; ++x) {
      const double mv = m.at(k, x);
      const double* wv = w.node(k, x);
      if (mv < 0.0) {
        infinite = true;
        break;
      }
      if (mv == 0.0) {
        for (std::size_t i = 0; i < grid.d; ++i)
          if (wv[i] != 0.0) {
            infinite = true;
            break;
          }
        continue;  // m H*(-w/m) = 0 and F(0) = 0
      }
      double vvec[2] = {0.0, 0.0};
      for (std::size_t i = 0; i < grid.d; ++i) vvec[i] = -wv[i] / mv;
      dual += eval_F(model.coupling, x, mv) +
              mv * eval_Hstar(model.hamiltonian, x, vvec, grid.d);
    }
  GapResult out{};
  if (infinite) {
    out.primal = primal;
    out.dual = kInf;
    out.gap = kInf;
    out.relative = kInf;
    return out;
  }
  dual *= cw;
  const std::vector<double> mT = terminal_density(m, w, model, grid);
  double term_pairing = 0.0;
  for (std::size_t x = 0; x < N; ++x)
    term_pairing += model.phiT[x] * mT[x];
  dual += vol * term_pairing;

  out.primal = primal;
  out.dual = dual;
  out.gap = primal + dual;
  out.relative = out.gap / (std::abs(primal) + std::abs(dual) + 1.0);
  return out;
}

double energy_identity_residual(const ScalarField& phi, const DensityField& m,
                                const FluxField& w, const ModelSpec& model,
                                const SpaceTimeGrid& grid) {
  const std::size_t N = grid.num_nodes();
  const double inv_h = 1.0 / grid.h();
  double acc = 0.0;
  for (std::size_t k = 0; k < grid.nt; ++k) {
    const double* sl = phi.slice(k + 1);
    for (std::size_t x = 0; x < N; ++x) {
      const double mv = m.at(k, x);
      if (mv == 0.0) continue;
      double g[2] = {0.0, 0.0};
      for (std::size_t i = 0; i < grid.d; ++i)
        g[i] = (sl[grid.shift(x, i, +1)] - sl[x]) * inv_h;
      double dph[2];
      eval_DpH(model.hamiltonian, x, g, grid.d, dph);
      acc += mv * (eval_f(model.coupling, x, mv) +
                   eval_Hstar(model.hamiltonian, x, dph, grid.d));
    }
  }
  acc *= grid.cell_weight();
  const std::vector<double> mT = terminal_density(m, w, model, grid);
  double boundary = 0.0;
  for (std::size_t x = 0; x < N; ++x)
    boundary += model.phiT[x] * mT[x] - model.m0[x] * phi.at(0, x);
  return acc + boundary * grid.cell_volume();
}

double continuity_residual(const DensityField& m, const FluxField& w,
                           const ModelSpec& model, const SpaceTimeGrid& grid) {
  ScalarField adj = apply_lambda_adjoint(grid, model.diffusion, m, w);
  const std::size_t N = grid.num_nodes();
  const double inv_dt = 1.0 / grid.dt();
  double acc = 0.0;
  for (std::size_t j = 0; j < grid.nt; ++j) {
    const double* sl = adj.slice(j);
    for (std::size_t x = 0; x < N; ++x) {
      const double src = j == 0 ? -model.m0[x] * inv_dt : 0.0;
      acc += std::abs(sl[x] - src);
    }
  }
  // dt * L1(dt dx) norm: one factor of dt turns the rate into a per-step
  // mass defect so the number is grid-consistent.
  return acc * grid.cell_weight() * grid.dt();
}

double mass_drift(const DensityField& m, const SpaceTimeGrid& grid) {
  double drift = 0.0;
  for (std::size_t k = 0; k < grid.nt; ++k)
    drift = std::max(drift, std::abs(integrate_density(m, grid, k) - 1.0));
  return drift;
}

double lower_bound_constant(const ModelSpec& model, const SpaceTimeGrid& grid) {
  const std::size_t N = grid.num_nodes();
  const double inv_h = 1.0 / grid.h();
  std::vector<double> second(N, 0.0);
  apply_second_order(grid, model.diffusion, model.phiT.data(), second.data());
  double c = 0.0;
  for (std::size_t x = 0; x < N; ++x) {
    double g[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < grid.d; ++i)
      g[i] = (model.phiT[grid.shift(x, i, +1)] - model.phiT[x]) * inv_h;
    c = std::max(c, eval_H(model.hamiltonian, x, g, grid.d) + second[x]);
  }
  return c;
}

double phi_lower_bound_violation(const ScalarField& phi,
                                 const ModelSpec& model,
                                 const SpaceTimeGrid& grid) {
  const double C = lower_bound_constant(model, grid);
  const double phiT_min =
      *std::min_element(model.phiT.begin(), model.phiT.end());
  double worst = 0.0;
  for (std::size_t k = 0; k <= grid.nt; ++k) {
    const double bound =
        phiT_min - C * (grid.T - static_cast<double>(k) * grid.dt());
    const double* sl = phi.slice(k);
    for (std::size_t x = 0; x < phi.nodes; ++x)
      worst = std::max(worst, bound - sl[x]);
  }
  return worst;
}

std::vector<CertificateItem> weak_solution_certificate(
    const ScalarField& phi, const DensityField& m, const FluxField& w,
    const ModelSpec& model, const SpaceTimeGrid& grid,
    const WeakSolutionTolerances& tol, std::uint64_t seed,
    std::size_t num_test_functions) {
  std::vector<CertificateItem> items;
  const std::size_t N = grid.num_nodes();
  const auto exps = conjugate_exponents(model);

  // (i) integrability: all discrete norms must be finite.
  {
    const double s_w = exps.r_conj * model.coupling.q /
                       (exps.r_conj + model.coupling.q - 1.0);
    const double mq = field_norm(m, grid, model.coupling.q);
    const double ws = field_norm(w, grid, s_w);
    double cross = 0.0;
    const double inv_h = 1.0 / grid.h();
    for (std::size_t k = 0; k < grid.nt; ++k) {
      const double* sl = phi.slice(k + 1);
      for (std::size_t x = 0; x < N; ++x) {
        double g[2] = {0.0, 0.0};
        for (std::size_t i = 0; i < grid.d; ++i)
          g[i] = (sl[grid.shift(x, i, +1)] - sl[x]) * inv_h;
        double dph[2];
        eval_DpH(model.hamiltonian, x, g, grid.d, dph);
        cross +=
            m.at(k, x) * eval_Hstar(model.hamiltonian, x, dph, grid.d);
      }
    }
    cross *= grid.cell_weight();
    const bool finite =
        std::isfinite(mq) && std::isfinite(ws) && std::isfinite(cross);
    items.push_back({"(i) integrability", finite ? 0.0 : kInf, 1.0, finite});
  }

  // (ii) HJ inequality paired against random smooth nonnegative test
  // functions, in the scheme-consistent interval sampling.
  {
    LambdaImage img = apply_lambda(grid, model.diffusion, phi);
    std::vector<double> excess(grid.nt * N);
    for (std::size_t k = 0; k < grid.nt; ++k)
      for (std::size_t x = 0; x < N; ++x) {
        const double hj = -img.a.at(k, x) +
                          eval_H(model.hamiltonian, x, img.b.node(k, x),
                                 grid.d);
        excess[k * N + x] = hj - eval_f(model.coupling, x, m.at(k, x));
      }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double worst = 0.0;
    for (std::size_t t = 0; t < num_test_functions; ++t) {
      // zeta(t,x) = (t/T)^2 * g(x)^2, g a random low-frequency trig
      // polynomial; smooth, nonnegative, vanishing at t = 0.
      const int modes = 3;
      std::vector<double> amp(modes), freq(modes), phase(modes);
      for (int j = 0; j < modes; ++j) {
        amp[j] = unif(rng);
        freq[j] = 1.0 + std::floor(unif(rng) * 3.0);
        phase[j] = 2.0 * M_PI * unif(rng);
      }
      double pairing = 0.0, zmass = 0.0;
      for (std::size_t k = 0; k < grid.nt; ++k) {
        const double tk = (static_cast<double>(k) + 1.0) * grid.dt();
        const double chi = (tk / grid.T) * (tk / grid.T);
        for (std::size_t x = 0; x < N; ++x) {
          double gsum = 0.0;
          for (int j = 0; j < modes; ++j) {
            double arg = phase[j];
            for (std::size_t ax = 0; ax < grid.d; ++ax)
              arg += 2.0 * M_PI * freq[j] * grid.coord(x, ax);
            gsum += amp[j] * std::cos(arg);
          }
          const double zeta = chi * gsum * gsum;
          pairing += zeta * excess[k * N + x];
          zmass += zeta;
        }
      }
      if (zmass > 0.0) worst = std::max(worst, pairing / zmass);
    }
    items.push_back({"(ii) HJ inequality (distributional)", worst,
                     tol.distributional, worst <= tol.distributional});
  }

  // (iii) continuity equation residual.
  {
    const double res = continuity_residual(m, w, model, grid);
    items.push_back(
        {"(iii) continuity equation", res, tol.continuity,
         res <= tol.continuity});
  }

  // (iv) energy identity, relative to the scale of its terms.
  {
    const double e = energy_identity_residual(phi, m, w, model, grid);
    double scale = 1.0;
    for (std::size_t k = 0; k < grid.nt; ++k)
      for (std::size_t x = 0; x < N; ++x) {
        const double mv = m.at(k, x);
        if (mv > 0.0)
          scale += grid.cell_weight() * mv *
                   std::abs(eval_f(model.coupling, x, mv));
      }
    const double rel = std::abs(e) / scale;
    items.push_back({"(iv) energy identity", rel, tol.energy,
                     rel <= tol.energy});
  }
  return items;
}

double w1_distance_1d(const std::vector<double>& mu,
                      const std::vector<double>& nu, double h) {
  if (mu.size() != nu.size())
    throw std::invalid_argument("w1_distance_1d: size mismatch");
  const std::size_t n = mu.size();
  double mass_gap = 0.0;
  for (std::size_t i = 0; i < n; ++i) mass_gap += (mu[i] - nu[i]) * h;
  if (std::abs(mass_gap) > 1e-10)
    throw std::invalid_argument("w1_distance_1d: mass mismatch");
  std::vector<double> cum(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += (mu[i] - nu[i]) * h;
    cum[i] = acc;
  }
  // Optimal constant shift is a median of the cumulative differences.
  std::vector<double> sorted = cum;
  std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
  const double s = sorted[n / 2];
  double dist = 0.0;
  for (double c : cum) dist += std::abs(c - s);
  return dist * h;
}

HolderFit holder_regression(const DensityField& m, const ModelSpec& model,
                            const SpaceTimeGrid& grid, double r) {
  if (grid.d != 1)
    throw std::invalid_argument("holder_regression: requires d = 1");
  HolderFit fit;
  std::size_t g = grid.nt / 2;
  while (g >= 1) {
    double dmax = 0.0;
    for (std::size_t s = 0; s + g < grid.nt; s += g) {
      std::vector<double> a(m.slice(s), m.slice(s) + m.nodes);
      std::vector<double> b(m.slice(s + g), m.slice(s + g) + m.nodes);
      // slice masses agree only to solver tolerance; the distance is
      // between the normalized probability densities
      for (auto* slice : {&a, &b}) {
        double mass = 0.0;
        for (double v : *slice) mass += v * grid.h();
        if (mass > 0.0)
          for (double& v : *slice) v /= mass;
      }
      dmax = std::max(dmax, w1_distance_1d(a, b, grid.h()));
    }
    fit.gaps.push_back(static_cast<double>(g) * grid.dt());
    fit.distances.push_back(dmax);
    if (g == 1) break;
    g /= 2;
  }
  if (fit.gaps.size() < 4)
    throw std::invalid_argument("holder_regression: fewer than 4 usable gaps");

  const double dmax_all =
      *std::max_element(fit.distances.begin(), fit.distances.end());
  if (dmax_all <= 1e-12) {
    fit.bound_ok = true;
    fit.fit_done = false;
    return fit;
  }
  // log-log least squares for the decay exponent.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t cnt = 0;
  for (std::size_t i = 0; i < fit.gaps.size(); ++i) {
    if (fit.distances[i] <= 0.0) continue;
    const double lx = std::log(fit.gaps[i]);
    const double ly = std::log(fit.distances[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++cnt;
  }
  if (cnt >= 2)
    fit.fit_exponent = (static_cast<double>(cnt) * sxy - sx * sy) /
                       (static_cast<double>(cnt) * sxx - sx * sx);
  fit.fit_done = cnt >= 2;
  const double expo = std::min(1.0 / r, 0.5);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < fit.gaps.size(); ++i) {
    const double ge = std::pow(fit.gaps[i], expo);
    num += fit.distances[i] * ge;
    den += ge * ge;
  }
  const double chat = den > 0.0 ? num / den : 0.0;
  fit.bound_ok = true;
  for (std::size_t i = 0; i < fit.gaps.size(); ++i)
    if (fit.distances[i] > 1.2 * chat * std::pow(fit.gaps[i], expo))
      fit.bound_ok = false;
  return fit;
}

std::map<std::string, double> norm_report(const ScalarField& phi,
                                          const DensityField& m,
                                          const FluxField& w,
                                          const ModelSpec& model,
                                          const SpaceTimeGrid& grid) {
  const auto exps = conjugate_exponents(model);
  const auto est =
      estimate_exponents(grid.d, model.hamiltonian.r, exps.p);
  ScalarField phi_plus = phi;
  for (double& v : phi_plus.v) v = std::max(v, 0.0);
  std::map<std::string, double> table;
  table["phi_plus_Linf_Leta"] =
      field_norm(phi_plus, grid, est.eta, NormMode::SupInTime);
  table["phi_plus_Lgamma"] = field_norm(phi_plus, grid, est.gamma);
  table["m_Lq"] = field_norm(m, grid, model.coupling.q);
  const double s_w = exps.r_conj * model.coupling.q /
                     (exps.r_conj + model.coupling.q - 1.0);
  table["w_Lrqs"] = field_norm(w, grid, s_w);
  return table;
}

std::string DiagnosticsReport::to_json() const {
  nlohmann::json j;
  j["iter"] = iter;
  j["primal_value"] = primal_value;
  j["dual_value"] = dual_value;
  j["gap"] = gap;
  j["gap_relative"] = gap_relative;
  j["hj_residual_Lp"] = hj_residual_Lp;
  j["optimality_w_residual_L1"] = optimality_w_residual_L1;
  j["alpha_match"] = alpha_match;
  j["energy_identity_residual"] = energy_identity_residual;
  j["mass_drift"] = mass_drift;
  j["continuity_residual"] = continuity_residual;
  j["phi_lower_bound_violation"] = phi_lower_bound_violation;
  j["holder_exponent_fit"] = holder_exponent_fit;
  j["holder_bound_ok"] = holder_bound_ok;
  j["w_integrability_norm"] = w_integrability_norm;
  j["outside_hypotheses"] = outside_hypotheses;
  j["converged"] = converged;
  j["norm_table"] = norm_table;
  return j.dump(2);
}

std::string DiagnosticsReport::csv_header() {
  return "config_hash,version,iter,gap,gap_relative,hj_residual_Lp,"
         "optimality_w_residual_L1,alpha_match,energy_identity_residual,"
         "mass_drift,continuity_residual,phi_lower_bound_violation,"
         "holder_exponent_fit,holder_bound_ok,w_integrability_norm,"
         "outside_hypotheses,converged";
}

std::string DiagnosticsReport::csv_row(const std::string& config_hash,
                                       const std::string& version) const {
  std::ostringstream os;
  os.precision(17);
  os << config_hash << ',' << version << ',' << iter << ',' << gap << ','
     << gap_relative << ',' << hj_residual_Lp << ','
     << optimality_w_residual_L1 << ',' << alpha_match << ','
     << energy_identity_residual << ',' << mass_drift << ','
     << continuity_residual << ',' << phi_lower_bound_violation << ','
     << holder_exponent_fit << ',' << (holder_bound_ok ? 1 : 0) << ','
     << w_integrability_norm << ',' << (outside_hypotheses ? 1 : 0) << ','
     << (converged ? 1 : 0);
  return os.str();
}

}  // namespace mfg
