#pragma once

#include <json.hpp>

#include "rkhs/estimator.hpp"
#include "rkhs/fitting.hpp"
#include "rkhs/interpolation.hpp"
#include "rkhs/kernel.hpp"
#include "rkhs/testbed.hpp"

namespace rkhs {

using json = nlohmann::json;

/// {"family":"matern","order":n,"shape":eps}
void to_json(json& j, const KernelSpec& spec);
void from_json(const json& j, KernelSpec& spec);

void to_json(json& j, const BoxDomain& domain);
BoxDomain domain_from_json(const json& j);

void to_json(json& j, const SolveDiagnostics& diagnostics);
/// Centers, coefficients, kernel, norm_squared and domain.
void to_json(json& j, const Interpolant& s);
/// Restored interpolants carry no factorization.
Interpolant interpolant_from_json(const json& j);

/// Infeasible profile entries are written as null.
void to_json(json& j, const SaturatingFit& fit);
void to_json(json& j, const PowerLawFit& fit);
void to_json(json& j, const EstimateReport& report);
void to_json(json& j, const MembershipReport& report);
void to_json(json& j, const EstimateSummary& summary);
void to_json(json& j, const NormTrace& trace);
/// Summary statistics only; the surface goes to CSV.
void to_json(json& j, const CertificationReport& report);

}  // namespace rkhs
