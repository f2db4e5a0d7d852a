#include "rkhs/serialization.hpp"

#include <cmath>

#include "rkhs/errors.hpp"

namespace rkhs {

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<double> to_std(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

}  // namespace

void to_json(json& j, const KernelSpec& spec) {
  j = json{{"family", "matern"}, {"order", spec.order()}, {"shape", spec.shape()}};
}

void from_json(const json& j, KernelSpec& spec) {
  try {
    if (j.at("family").get<std::string>() != "matern") {
      throw invalid_argument("kernel family must be \"matern\"");
    }
    spec = KernelSpec(j.at("order").get<int>(), j.at("shape").get<double>());
  } catch (const json::exception& e) {
    throw invalid_argument(std::string("malformed kernel JSON: ") + e.what());
  }
}

void to_json(json& j, const BoxDomain& domain) {
  j = json{{"lo", to_std(domain.lo())}, {"hi", to_std(domain.hi())}};
}

BoxDomain domain_from_json(const json& j) {
  const auto lo = j.at("lo").get<std::vector<double>>();
  const auto hi = j.at("hi").get<std::vector<double>>();
  return BoxDomain(Eigen::Map<const Vector>(lo.data(), static_cast<Eigen::Index>(lo.size())),
                   Eigen::Map<const Vector>(hi.data(), static_cast<Eigen::Index>(hi.size())));
}

void to_json(json& j, const SolveDiagnostics& d) {
  j = json{{"matrix_size", d.matrix_size},
           {"smallest_pivot", d.smallest_pivot},
           {"jitter_used", d.jitter_used},
           {"relative_residual", d.relative_residual},
           {"norm_discrepancy", d.norm_discrepancy},
           {"approximate", d.approximate()}};
}

void to_json(json& j, const Interpolant& s) {
  json centers = json::array();
  for (std::size_t i = 0; i < s.centers().size(); ++i) centers.push_back(to_std(s.centers().point(i)));
  j = json{{"kernel", s.spec()},
           {"domain", s.centers().domain()},
           {"centers", centers},
           {"coefficients", to_std(s.coefficients())},
           {"norm_squared", s.norm_squared()},
           {"diagnostics", s.diagnostics()}};
}

Interpolant interpolant_from_json(const json& j) {
  try {
    const auto spec = j.at("kernel").get<KernelSpec>();
    const BoxDomain domain = domain_from_json(j.at("domain"));
    const auto centers = j.at("centers").get<std::vector<std::vector<double>>>();
    const auto coefficients = j.at("coefficients").get<std::vector<double>>();
    Matrix pts(domain.dim(), static_cast<Eigen::Index>(centers.size()));
    for (std::size_t i = 0; i < centers.size(); ++i) {
      if (static_cast<int>(centers[i].size()) != domain.dim()) {
        throw invalid_argument("interpolant JSON: center has the wrong dimension");
      }
      for (int a = 0; a < domain.dim(); ++a) pts(a, static_cast<Eigen::Index>(i)) = centers[i][static_cast<std::size_t>(a)];
    }
    Vector alpha = Eigen::Map<const Vector>(coefficients.data(), static_cast<Eigen::Index>(coefficients.size()));
    return Interpolant(spec, PointSet(std::move(pts), domain), std::move(alpha),
                       j.at("norm_squared").get<double>());
  } catch (const json::exception& e) {
    throw invalid_argument(std::string("malformed interpolant JSON: ") + e.what());
  }
}

void to_json(json& j, const SaturatingFit& fit) {
  json profile = json::array();
  for (const auto& [beta, sse] : fit.profile) profile.push_back({beta, finite_or_null(sse)});
  j = json{{"model", "c1 - c1_prime * h^beta1"},
           {"c1", fit.c1},
           {"c1_prime", fit.c1_prime},
           {"beta1", fit.beta1},
           {"residual_rms", fit.residual_rms},
           {"points_used", fit.points_used},
           {"profile", profile},
           {"warnings", fit.warnings}};
}

void to_json(json& j, const PowerLawFit& fit) {
  j = json{{"model", "c2 * h^beta2"},
           {"c2", fit.c2},
           {"beta2", fit.beta2},
           {"residual_rms_log", fit.residual_rms_log},
           {"points_used", fit.points_used},
           {"intercept", to_string(fit.intercept)}};
}

void to_json(json& j, const EstimateReport& r) {
  j = json{{"algorithm", r.algorithm},
           {"norm_estimate", r.norm_estimate},
           {"norm_squared_estimate", r.norm_squared_estimate},
           {"last_norm", r.last_norm},
           {"burn_in_used", r.burn_in_used},
           {"exact", r.exact},
           {"diagnostics", r.diagnostics}};
  if (r.saturating) j["fit"] = *r.saturating;
  if (r.powerlaw) j["fit"] = *r.powerlaw;
  if (r.algorithm == 2) {
    j["tail_sum"] = r.tail_sum;
    j["rho_used"] = r.rho_used;
  }
}

void to_json(json& j, const MembershipReport& r) {
  j = json{{"classification", to_string(r.classification)},
           {"difference_rate", r.difference_rate},
           {"saturating_rss", finite_or_null(r.saturating_rss)},
           {"growth_rss", finite_or_null(r.growth_rss)},
           {"reason", r.reason}};
}

void to_json(json& j, const EstimateSummary& s) {
  j = json{{"membership", s.membership}};
  j["alg1"] = s.alg1 ? json(*s.alg1) : json{{"error", s.alg1_error}};
  j["alg2"] = s.alg2 ? json(*s.alg2) : json{{"error", s.alg2_error}};
}

void to_json(json& j, const NormTrace& trace) {
  json levels = json::array();
  for (const auto& level : trace.levels) {
    json l{{"h", level.fill_distance}, {"norm_squared", level.norm_squared}, {"num_points", level.num_points}};
    l["increment_norm"] = level.increment_norm ? json(*level.increment_norm) : json(nullptr);
    levels.push_back(l);
  }
  j = json{{"kernel", trace.spec}, {"nested", trace.nested}, {"levels", levels}, {"warnings", trace.warnings}};
}

void to_json(json& j, const CertificationReport& r) {
  j = json{{"norm_bound", r.norm_bound},
           {"interpolant_norm", r.interpolant_norm},
           {"subset_size", r.subset.size()},
           {"subset", r.subset},
           {"grid_points", r.grid.cols()},
           {"violations", r.violations},
           {"max_ratio", r.max_ratio},
           {"max_error", r.max_error},
           {"membership", r.membership},
           {"trace", r.trace},
           {"diagnostics", r.diagnostics}};
  if (r.estimate) j["estimate"] = *r.estimate;
}

}  // namespace rkhs
