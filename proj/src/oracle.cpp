#include "mixmi/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mixmi/errors.hpp"

namespace mixmi {

namespace {

// Log densities of every class and of the marginal at one point. Logs come
// from log_pdf directly so tail values stay finite after the pdf underflows.
struct PointLogs {
  std::vector<double> log_fi;  // log f_i, valid where in_support
  std::vector<char> in_support;
  std::vector<double> log_gi;  // log p_i + log f_i
  double log_f = 0.0;
  bool any = false;

  void evaluate(const MixedPairModel& model, std::span<const double> y) {
    const std::size_t m = model.num_classes();
    log_fi.resize(m);
    log_gi.resize(m);
    in_support.assign(m, 0);
    any = false;
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const auto lp = model.conditionals()[i].log_pdf(y);
      if (!lp) continue;
      in_support[i] = 1;
      log_fi[i] = *lp;
      log_gi[i] = std::log(model.probs()[i]) + *lp;
      top = std::max(top, log_gi[i]);
      any = true;
    }
    if (!any) return;
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (in_support[i]) s += std::exp(log_gi[i] - top);
    }
    log_f = top + std::log(s);
  }
};

DomainIntegrator make_integrator(const MixedPairModel& model, const QuadratureSpec& spec,
                                 MultiDimMethod method) {
  return DomainIntegrator(model.conditionals(), spec, method);
}

// All moment integrals the oracle needs, each with its quadrature error.
struct Moments {
  QuadResult h_y;                  // -E log f
  QuadResult e_log_f_sq;           // E (log f)^2
  std::vector<QuadResult> h_cond;  // -E_i log f_i
  std::vector<QuadResult> e_i_log_fi_sq;
  std::vector<QuadResult> e_i_cross;  // E_i [log f_i log f]
  QuadResult h_z;
  QuadResult kl;      // sum_i p_i E_i log(f_i / f)
  QuadResult direct;  // sum_i p_i E_i (log f - log f_i)^2
  bool radial = false;
};

enum class Want { Entropies = 1, Variance = 2, All = 3 };

Moments compute_moments(const MixedPairModel& model, const QuadratureSpec& spec,
                        MultiDimMethod method, Want want) {
  const auto integrator = make_integrator(model, spec, method);
  const std::size_t m = model.num_classes();
  const auto& probs = model.probs();
  Moments mo;
  mo.radial = integrator.radial();

  auto over = [&](auto&& term) {
    return integrator.integrate([&](std::span<const double> y) {
      thread_local PointLogs pl;
      pl.evaluate(model, y);
      if (!pl.any) return 0.0;
      return term(pl);
    });
  };

  mo.h_y = over([](const PointLogs& p) { return -std::exp(p.log_f) * p.log_f; });
  mo.h_cond.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    mo.h_cond[i] = over([i](const PointLogs& p) {
      return p.in_support[i] ? -std::exp(p.log_fi[i]) * p.log_fi[i] : 0.0;
    });
  }
  const bool entropies = static_cast<int>(want) & static_cast<int>(Want::Entropies);
  const bool variance = static_cast<int>(want) & static_cast<int>(Want::Variance);
  if (entropies) {
    mo.h_z = over([m](const PointLogs& p) {
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (p.in_support[i]) s -= std::exp(p.log_gi[i]) * p.log_gi[i];
      }
      return s;
    });
  }
  if (entropies || variance) {
    mo.kl = over([m, &probs](const PointLogs& p) {
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (p.in_support[i]) s += probs[i] * std::exp(p.log_fi[i]) * (p.log_fi[i] - p.log_f);
      }
      return s;
    });
  }
  if (variance) {
    mo.e_log_f_sq = over([](const PointLogs& p) { return std::exp(p.log_f) * p.log_f * p.log_f; });
    mo.e_i_log_fi_sq.resize(m);
    mo.e_i_cross.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      mo.e_i_log_fi_sq[i] = over([i](const PointLogs& p) {
        return p.in_support[i] ? std::exp(p.log_fi[i]) * p.log_fi[i] * p.log_fi[i] : 0.0;
      });
      mo.e_i_cross[i] = over([i](const PointLogs& p) {
        return p.in_support[i] ? std::exp(p.log_fi[i]) * p.log_fi[i] * p.log_f : 0.0;
      });
    }
    mo.direct = over([m, &probs](const PointLogs& p) {
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (!p.in_support[i]) continue;
        const double r = p.log_f - p.log_fi[i];
        s += probs[i] * std::exp(p.log_fi[i]) * r * r;
      }
      return s;
    });
  }
  return mo;
}

QuadResult termwise_variance(const MixedPairModel& model, const Moments& mo) {
  const auto& p = model.probs();
  const std::size_t m = p.size();
  const double b = -mo.h_y.value;  // E log f
  const double eb = mo.h_y.error;
  double value = mo.e_log_f_sq.value - b * b;
  double err = mo.e_log_f_sq.error + 2.0 * std::abs(b) * eb;
  std::vector<double> d(m);
  std::vector<double> ed(m);
  for (std::size_t i = 0; i < m; ++i) {
    d[i] = -mo.h_cond[i].value;
    ed[i] = mo.h_cond[i].error;
  }
  for (std::size_t i = 0; i < m; ++i) {
    value += p[i] * mo.e_i_log_fi_sq[i].value - p[i] * p[i] * d[i] * d[i];
    err += p[i] * mo.e_i_log_fi_sq[i].error + 2.0 * p[i] * p[i] * std::abs(d[i]) * ed[i];
    value -= 2.0 * p[i] * (mo.e_i_cross[i].value - d[i] * b);
    err += 2.0 * p[i] * (mo.e_i_cross[i].error + std::abs(d[i]) * eb + std::abs(b) * ed[i]);
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      value -= 2.0 * p[i] * p[j] * d[i] * d[j];
      err += 2.0 * p[i] * p[j] * (std::abs(d[j]) * ed[i] + std::abs(d[i]) * ed[j]);
    }
  }
  return {value, err};
}

QuadResult direct_variance(const Moments& mo) {
  const double mi = mo.kl.value;
  return {mo.direct.value - mi * mi, mo.direct.error + 2.0 * std::abs(mi) * mo.kl.error};
}

void check_variance_sign(const QuadResult& v, const char* what) {
  if (v.value < -10.0 * v.error) {
    std::ostringstream msg;
    msg << what << " is negative (" << v.value << " with estimated error " << v.error << ")";
    throw NegativeVariance(msg.str());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// DomainIntegrator

DomainIntegrator::DomainIntegrator(std::span<const ContinuousDensity> densities,
                                   QuadratureSpec spec, MultiDimMethod method)
    : dim_(densities.empty() ? 0 : densities.front().dim()), spec_(spec) {
  if (densities.empty()) throw ContractViolation("domain needs at least one density");
  if (dim_ == 1) {
    for (const auto& d : densities) {
      if (auto lb = d.support_lower_bound()) breaks_.push_back(*lb);
    }
    std::sort(breaks_.begin(), breaks_.end());
    breaks_.erase(std::unique(breaks_.begin(), breaks_.end()), breaks_.end());
    return;
  }

  // Radial eligibility: every density a multivariate t with one centre and
  // shapes proportional to the first.
  bool eligible = true;
  const MultivariateT* base = nullptr;
  for (const auto& d : densities) {
    const auto* t = std::get_if<MultivariateT>(&d.params());
    if (t == nullptr) {
      eligible = false;
      break;
    }
    if (base == nullptr) {
      base = t;
      continue;
    }
    if (t->loc() != base->loc()) {
      eligible = false;
      break;
    }
    const double c = t->shape()[0] / base->shape()[0];
    for (std::size_t k = 0; k < t->shape().size(); ++k) {
      const double want = c * base->shape()[k];
      if (std::abs(t->shape()[k] - want) > 1e-12 * (std::abs(want) + std::abs(t->shape()[k]))) {
        eligible = false;
      }
    }
    if (!eligible) break;
  }

  if (method == MultiDimMethod::Radial && !eligible) {
    throw ContractViolation("radial reduction needs elliptical densities with a common centre");
  }
  radial_ = eligible && method != MultiDimMethod::Iterated;
  if (!radial_ && dim_ != 2) {
    throw ContractViolation("quadrature over R^d for d > 2 needs the radial reduction");
  }
  if (radial_) {
    const std::size_t d = dim_;
    centre_ = base->loc();
    direction_.resize(d);
    for (std::size_t i = 0; i < d; ++i) direction_[i] = base->cholesky()[i * d + 0];
    const double dd = static_cast<double>(d);
    const double sphere =
        2.0 * std::pow(std::numbers::pi, 0.5 * dd) / std::tgamma(0.5 * dd);
    radial_jacobian_ = std::exp(0.5 * base->log_det_shape()) * sphere;
  } else {
    centre_.assign(dim_, 0.0);
  }
}

QuadResult DomainIntegrator::integrate_1d(const Function& f, double lo, double hi) const {
  std::vector<double> cuts{lo};
  for (double b : breaks_) {
    if (b > lo && b < hi) cuts.push_back(b);
  }
  cuts.push_back(hi);
  QuadResult total;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const auto part = mixmi::integrate(
        [&](double y) { return f(std::span<const double>(&y, 1)); }, cuts[s], cuts[s + 1], spec_);
    total.value += part.value;
    total.error += part.error;
  }
  return total;
}

QuadResult DomainIntegrator::integrate_radial(const Function& f, double radius) const {
  const std::size_t d = dim_;
  const double power = static_cast<double>(d) - 1.0;
  auto r = mixmi::integrate(
      [&](double rho) {
        double y_small[8];
        std::vector<double> y_big;
        double* y = y_small;
        if (d > 8) {
          y_big.resize(d);
          y = y_big.data();
        }
        for (std::size_t i = 0; i < d; ++i) y[i] = centre_[i] + rho * direction_[i];
        return std::pow(rho, power) * f(std::span<const double>(y, d));
      },
      0.0, radius, spec_);
  return {radial_jacobian_ * r.value, radial_jacobian_ * r.error};
}

QuadResult DomainIntegrator::integrate_iterated(const Function& f, double radius) const {
  QuadratureSpec inner = spec_;
  inner.abs_tol = spec_.abs_tol * 0.1;
  inner.rel_tol = spec_.rel_tol * 0.1;
  const double lo = -radius;
  const double hi = radius;
  double inner_error = 0.0;
  const auto outer = mixmi::integrate(
      [&](double y1) {
        const auto r = mixmi::integrate(
            [&](double y2) {
              const double y[2] = {y1, y2};
              return f(std::span<const double>(y, 2));
            },
            lo, hi, inner);
        inner_error = std::max(inner_error, r.error);
        return r.value;
      },
      lo, hi, spec_);
  return {outer.value, outer.error + inner_error};
}

QuadResult DomainIntegrator::integrate(const Function& f) const {
  if (dim_ == 1) return integrate_1d(f, -kInf, kInf);
  if (radial_) return integrate_radial(f, kInf);
  return integrate_iterated(f, kInf);
}

QuadResult DomainIntegrator::integrate_within(const Function& f, double radius) const {
  if (!(radius > 0.0)) throw ContractViolation("integration radius must be positive");
  if (dim_ == 1) return integrate_1d(f, -radius, radius);
  if (radial_) return integrate_radial(f, radius);
  return integrate_iterated(f, radius);
}

// ---------------------------------------------------------------------------
// Entropies and mutual information

QuadResult entropy(const ContinuousDensity& density, const QuadratureSpec& spec,
                   MultiDimMethod method) {
  const DomainIntegrator integrator(std::span<const ContinuousDensity>(&density, 1), spec, method);
  return integrator.integrate([&](std::span<const double> y) {
    const auto lp = density.log_pdf(y);
    return lp ? -std::exp(*lp) * *lp : 0.0;
  });
}

QuadResult entropy(const MixedPairModel& model, const QuadratureSpec& spec,
                   MultiDimMethod method) {
  const auto integrator = make_integrator(model, spec, method);
  return integrator.integrate([&](std::span<const double> y) {
    thread_local PointLogs pl;
    pl.evaluate(model, y);
    return pl.any ? -std::exp(pl.log_f) * pl.log_f : 0.0;
  });
}

QuadResult mixed_entropy(const MixedPairModel& model, const QuadratureSpec& spec,
                         MultiDimMethod method) {
  const auto integrator = make_integrator(model, spec, method);
  const std::size_t m = model.num_classes();
  return integrator.integrate([&](std::span<const double> y) {
    thread_local PointLogs pl;
    pl.evaluate(model, y);
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (pl.in_support[i]) s -= std::exp(pl.log_gi[i]) * pl.log_gi[i];
    }
    return s;
  });
}

OracleResult mutual_information(const MixedPairModel& model, const QuadratureSpec& spec,
                                MultiDimMethod method) {
  const auto mo = compute_moments(model, spec, method, Want::All);
  const auto& p = model.probs();
  const std::size_t m = p.size();

  OracleResult r;
  r.radial = mo.radial;
  r.h_y = mo.h_y.value;
  r.quad_error.h_y = mo.h_y.error;
  r.h_cond.resize(m);
  r.quad_error.h_cond.resize(m);
  r.mi = r.h_y;
  r.quad_error.mi = mo.h_y.error;
  for (std::size_t i = 0; i < m; ++i) {
    r.h_cond[i] = mo.h_cond[i].value;
    r.quad_error.h_cond[i] = mo.h_cond[i].error;
    r.mi -= p[i] * r.h_cond[i];
    r.quad_error.mi += p[i] * mo.h_cond[i].error;
    r.h_x -= p[i] * std::log(p[i]);
  }
  r.h_z = mo.h_z.value;
  r.quad_error.h_z = mo.h_z.error;
  r.mi_kl = mo.kl.value;
  r.quad_error.mi_kl = mo.kl.error;
  r.mi_3h = r.h_x + r.h_y - r.h_z;
  r.quad_error.mi_3h = mo.h_y.error + mo.h_z.error;

  const auto termwise = termwise_variance(model, mo);
  const auto direct = direct_variance(mo);
  check_variance_sign(termwise, "a'Sigma a");
  r.var_clt = termwise.value;
  r.quad_error.var_clt = termwise.error;
  r.var_clt_direct = direct.value;
  r.quad_error.var_clt_direct = direct.error;
  return r;
}

QuadResult clt_variance(const MixedPairModel& model, const QuadratureSpec& spec,
                        MultiDimMethod method) {
  const auto v = termwise_variance(model, compute_moments(model, spec, method, Want::Variance));
  check_variance_sign(v, "a'Sigma a");
  return v;
}

QuadResult clt_variance_direct(const MixedPairModel& model, const QuadratureSpec& spec,
                               MultiDimMethod method) {
  const auto v = direct_variance(compute_moments(model, spec, method, Want::Variance));
  check_variance_sign(v, "a'Sigma a (direct form)");
  return v;
}

GoodPairCheck check_good_pair(const MixedPairModel& model, const QuadratureSpec& spec) {
  GoodPairCheck out;
  const std::size_t m = model.num_classes();
  std::optional<DomainIntegrator> integrator;
  try {
    integrator.emplace(model.conditionals(), spec);
  } catch (const ContractViolation& e) {
    out.diagnostic = std::string("inconclusive: ") + e.what();
    return out;
  }
  constexpr double kRadii[] = {1e0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6};
  out.partials.assign(m, {});
  out.totals.assign(m, 0.0);
  std::ostringstream diag;
  out.good = true;
  for (std::size_t i = 0; i < m; ++i) {
    const double log_p = std::log(model.probs()[i]);
    const auto& fi = model.conditionals()[i];
    const DomainIntegrator::Function abs_g_log_g = [&](std::span<const double> y) {
      const auto lp = fi.log_pdf(y);
      if (!lp) return 0.0;
      const double lg = log_p + *lp;
      return std::abs(std::exp(lg) * lg);
    };
    double total = 0.0;
    try {
      total = integrator->integrate(abs_g_log_g).value;
      for (double radius : kRadii) {
        out.partials[i].push_back(integrator->integrate_within(abs_g_log_g, radius).value);
      }
    } catch (const NonConvergence& e) {
      out.good = false;
      out.offending_class = i;
      diag << "class " << i << ": integral of |g log g| did not converge (" << e.what() << ")";
      out.diagnostic = diag.str();
      return out;
    }
    out.totals[i] = total;
    const auto& part = out.partials[i];
    const std::size_t k = part.size();
    const double last_step = part[k - 1] - part[k - 2];
    const double prev_step = part[k - 2] - part[k - 3];
    const double remainder = total - part[k - 1];
    const double slack = 10.0 * spec.abs_tol + 1e-9 * total;
    const bool settling = last_step <= prev_step + slack || last_step <= slack;
    if (!std::isfinite(total) || !settling || remainder < -slack) {
      out.good = false;
      out.offending_class = i;
      diag << "class " << i << ": partial integrals of |g log g| do not settle (last step "
           << last_step << ", previous " << prev_step << ", remainder " << remainder << ")";
      out.diagnostic = diag.str();
      return out;
    }
  }
  diag << "all " << m << " class integrals of |g log g| converge";
  out.diagnostic = diag.str();
  return out;
}

}  // namespace mixmi
